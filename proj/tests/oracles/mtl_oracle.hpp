#pragma once

// Reference evaluators for formulas, written directly from the definitions:
// every operator re-scans its window at every time index. Quadratic or
// worse, and deliberately free of any code from the library evaluator.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "scenfalsify/mtl.hpp"

namespace oracle {

using Signals = std::map<std::string, std::vector<double>>;

struct Window {
  long first;
  long last;  // inclusive; already clipped to the trace
};

// Sample indices of [k + a, k + b] clipped to the trace; a empty window has
// first > last.
inline Window window_at(const scenfalsify::mtl::Interval& iv, double dt, long k, long n) {
  long lo = static_cast<long>(std::floor(iv.lo / dt + 1e-9));
  long hi = iv.hi ? static_cast<long>(std::ceil(*iv.hi / dt - 1e-9)) : n;
  if (hi < lo) hi = lo;
  return {k + lo, std::min(n - 1, k + hi)};
}

inline double rho(const scenfalsify::mtl::Formula& f, const Signals& sig, double dt, long k) {
  using scenfalsify::mtl::Cmp;
  using scenfalsify::mtl::Op;
  const double inf = std::numeric_limits<double>::infinity();
  long n = static_cast<long>(sig.begin()->second.size());
  switch (f.op) {
    case Op::predicate: {
      double v = sig.at(f.signal)[static_cast<std::size_t>(k)];
      return (f.cmp == Cmp::gt || f.cmp == Cmp::ge) ? v - f.threshold : f.threshold - v;
    }
    case Op::negation: return -rho(*f.lhs, sig, dt, k);
    case Op::conjunction: return std::min(rho(*f.lhs, sig, dt, k), rho(*f.rhs, sig, dt, k));
    case Op::disjunction: return std::max(rho(*f.lhs, sig, dt, k), rho(*f.rhs, sig, dt, k));
    case Op::implication: return std::max(-rho(*f.lhs, sig, dt, k), rho(*f.rhs, sig, dt, k));
    case Op::globally: {
      auto w = window_at(f.interval, dt, k, n);
      double r = inf;
      for (long j = w.first; j <= w.last; ++j) r = std::min(r, rho(*f.lhs, sig, dt, j));
      return r;
    }
    case Op::eventually: {
      auto w = window_at(f.interval, dt, k, n);
      double r = -inf;
      for (long j = w.first; j <= w.last; ++j) r = std::max(r, rho(*f.lhs, sig, dt, j));
      return r;
    }
    case Op::until: {
      auto w = window_at(f.interval, dt, k, n);
      double r = -inf;
      for (long j = w.first; j <= w.last; ++j) {
        double hold = inf;
        for (long m = k; m < j; ++m) hold = std::min(hold, rho(*f.lhs, sig, dt, m));
        r = std::max(r, std::min(rho(*f.rhs, sig, dt, j), hold));
      }
      return r;
    }
  }
  return 0.0;
}

// Classical two-valued semantics on the same sample grid.
inline bool holds(const scenfalsify::mtl::Formula& f, const Signals& sig, double dt, long k) {
  using scenfalsify::mtl::Cmp;
  using scenfalsify::mtl::Op;
  long n = static_cast<long>(sig.begin()->second.size());
  switch (f.op) {
    case Op::predicate: {
      double v = sig.at(f.signal)[static_cast<std::size_t>(k)];
      switch (f.cmp) {
        case Cmp::gt: return v > f.threshold;
        case Cmp::ge: return v >= f.threshold;
        case Cmp::lt: return v < f.threshold;
        case Cmp::le: return v <= f.threshold;
      }
      return false;
    }
    case Op::negation: return !holds(*f.lhs, sig, dt, k);
    case Op::conjunction: return holds(*f.lhs, sig, dt, k) && holds(*f.rhs, sig, dt, k);
    case Op::disjunction: return holds(*f.lhs, sig, dt, k) || holds(*f.rhs, sig, dt, k);
    case Op::implication: return !holds(*f.lhs, sig, dt, k) || holds(*f.rhs, sig, dt, k);
    case Op::globally: {
      auto w = window_at(f.interval, dt, k, n);
      for (long j = w.first; j <= w.last; ++j) {
        if (!holds(*f.lhs, sig, dt, j)) return false;
      }
      return true;
    }
    case Op::eventually: {
      auto w = window_at(f.interval, dt, k, n);
      for (long j = w.first; j <= w.last; ++j) {
        if (holds(*f.lhs, sig, dt, j)) return true;
      }
      return false;
    }
    case Op::until: {
      auto w = window_at(f.interval, dt, k, n);
      for (long j = w.first; j <= w.last; ++j) {
        if (!holds(*f.rhs, sig, dt, j)) continue;
        bool ok = true;
        for (long m = k; m < j && ok; ++m) ok = holds(*f.lhs, sig, dt, m);
        if (ok) return true;
      }
      return false;
    }
  }
  return false;
}

}  // namespace oracle
