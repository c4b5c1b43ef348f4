#pragma once

// Metric temporal logic over uniformly sampled signals, with the standard
// quantitative (space-robustness) semantics evaluated at sample points.
//
// Concrete syntax:
//   expr    := impl
//   impl    := or [ "->" impl ]
//   or      := and { ("|" | "or") and }
//   and     := until { ("&" | "and") until }
//   until   := unary [ "U" [interval] until ]
//   unary   := ("!" | "not") unary | ("G" | "F") [interval] unary | atom
//   atom    := "(" expr ")" | SIGNAL cmp NUMBER
//   cmp     := ">" | "<" | ">=" | "<=" | "≥" | "≤"
//   interval:= "[" NUMBER "," (NUMBER | "inf") "]"     (seconds)

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenfalsify/detail/text.hpp"
#include "scenfalsify/error.hpp"

namespace scenfalsify::mtl {

enum class Op { predicate, negation, conjunction, disjunction, implication, globally, eventually, until };
enum class Cmp { gt, lt, ge, le };

struct Interval {
  double lo = 0.0;
  std::optional<double> hi;  // nullopt: up to the end of the trace

  bool bounded() const { return hi.has_value(); }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op = Op::predicate;
  // predicate
  std::string signal;
  Cmp cmp = Cmp::gt;
  double threshold = 0.0;
  // temporal operators
  Interval interval;
  // operands; unary operators use lhs only
  FormulaPtr lhs;
  FormulaPtr rhs;
};

inline bool operator==(const Formula& a, const Formula& b);

inline bool equal_ptr(const FormulaPtr& a, const FormulaPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.op != b.op) return false;
  if (a.op == Op::predicate) return a.signal == b.signal && a.cmp == b.cmp && a.threshold == b.threshold;
  bool temporal = a.op == Op::globally || a.op == Op::eventually || a.op == Op::until;
  if (temporal && !(a.interval == b.interval)) return false;
  return equal_ptr(a.lhs, b.lhs) && equal_ptr(a.rhs, b.rhs);
}

inline void validate_interval(const Interval& iv) {
  if (!std::isfinite(iv.lo) || iv.lo < 0.0) throw Error("interval lower bound must be finite and non-negative");
  if (iv.hi) {
    if (!std::isfinite(*iv.hi)) throw Error("interval upper bound must be finite or inf");
    if (*iv.hi < iv.lo) throw Error("interval upper < lower");
  }
}

inline FormulaPtr pred(std::string signal, Cmp cmp, double threshold) {
  auto f = std::make_shared<Formula>();
  f->op = Op::predicate;
  f->signal = std::move(signal);
  f->cmp = cmp;
  f->threshold = threshold;
  return f;
}

inline FormulaPtr unary(Op op, FormulaPtr child, Interval iv = {}) {
  validate_interval(iv);
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->interval = iv;
  f->lhs = std::move(child);
  return f;
}

inline FormulaPtr binary(Op op, FormulaPtr lhs, FormulaPtr rhs, Interval iv = {}) {
  validate_interval(iv);
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->interval = iv;
  f->lhs = std::move(lhs);
  f->rhs = std::move(rhs);
  return f;
}

inline FormulaPtr negation(FormulaPtr f) { return unary(Op::negation, std::move(f)); }
inline FormulaPtr globally(FormulaPtr f, Interval iv = {}) { return unary(Op::globally, std::move(f), iv); }
inline FormulaPtr eventually(FormulaPtr f, Interval iv = {}) { return unary(Op::eventually, std::move(f), iv); }
inline FormulaPtr conjunction(FormulaPtr a, FormulaPtr b) { return binary(Op::conjunction, std::move(a), std::move(b)); }
inline FormulaPtr disjunction(FormulaPtr a, FormulaPtr b) { return binary(Op::disjunction, std::move(a), std::move(b)); }
inline FormulaPtr implication(FormulaPtr a, FormulaPtr b) { return binary(Op::implication, std::move(a), std::move(b)); }
inline FormulaPtr until(FormulaPtr a, FormulaPtr b, Interval iv = {}) {
  return binary(Op::until, std::move(a), std::move(b), iv);
}

inline std::string to_string(const Formula& f) {
  auto interval = [&](const Interval& iv) -> std::string {
    if (!iv.bounded() && iv.lo == 0.0) return "";
    return "[" + detail::shortest(iv.lo) + "," + (iv.hi ? detail::shortest(*iv.hi) : std::string("inf")) + "]";
  };
  switch (f.op) {
    case Op::predicate: {
      static constexpr const char* cmp_text[] = {">", "<", ">=", "<="};
      return f.signal + " " + cmp_text[static_cast<int>(f.cmp)] + " " + detail::shortest(f.threshold);
    }
    case Op::negation:
      return "!(" + to_string(*f.lhs) + ")";
    case Op::conjunction:
      return "(" + to_string(*f.lhs) + ") & (" + to_string(*f.rhs) + ")";
    case Op::disjunction:
      return "(" + to_string(*f.lhs) + ") | (" + to_string(*f.rhs) + ")";
    case Op::implication:
      return "(" + to_string(*f.lhs) + ") -> (" + to_string(*f.rhs) + ")";
    case Op::globally:
      return "G" + interval(f.interval) + " (" + to_string(*f.lhs) + ")";
    case Op::eventually:
      return "F" + interval(f.interval) + " (" + to_string(*f.lhs) + ")";
    case Op::until:
      return "(" + to_string(*f.lhs) + ") U" + interval(f.interval) + " (" + to_string(*f.rhs) + ")";
  }
  return {};
}

namespace detail {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, std::span<const std::string> signals) : text_(text), signals_(signals) {}

  FormulaPtr parse() {
    auto f = implication_expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(msg, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  // Keyword match that does not swallow a prefix of a longer identifier.
  bool accept_word(std::string_view word) {
    skip_ws();
    if (text_.substr(pos_, word.size()) != word) return false;
    size_t end = pos_ + word.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  std::optional<std::string> identifier() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      return std::string(text_.substr(start, pos_ - start));
    }
    return std::nullopt;
  }

  double number() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' || text_[pos_] == 'e' ||
            text_[pos_] == 'E' ||
            ((text_[pos_] == '-' || text_[pos_] == '+') && (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
      ++pos_;
    }
    auto v = scenfalsify::detail::parse_double(text_.substr(start, pos_ - start));
    if (!v) {
      pos_ = start;
      fail("expected number");
    }
    return *v;
  }

  Interval interval() {
    Interval iv;
    skip_ws();
    if (!accept("[")) return iv;
    size_t open = pos_ - 1;
    iv.lo = number();
    expect(",");
    if (accept_word("inf")) {
      iv.hi.reset();
    } else {
      iv.hi = number();
    }
    expect("]");
    if (iv.lo < 0.0) {
      pos_ = open;
      fail("interval lower bound is negative");
    }
    if (iv.hi && *iv.hi < iv.lo) {
      pos_ = open;
      fail("interval upper < lower");
    }
    return iv;
  }

  FormulaPtr implication_expr() {
    auto lhs = or_expr();
    if (accept("->")) return implication(lhs, implication_expr());
    return lhs;
  }

  FormulaPtr or_expr() {
    auto lhs = and_expr();
    while (accept("|") || accept_word("or")) lhs = disjunction(lhs, and_expr());
    return lhs;
  }

  FormulaPtr and_expr() {
    auto lhs = until_expr();
    while (accept("&") || accept_word("and")) lhs = conjunction(lhs, until_expr());
    return lhs;
  }

  FormulaPtr until_expr() {
    auto lhs = unary_expr();
    if (accept_word("U")) {
      auto iv = interval();
      return until(lhs, until_expr(), iv);
    }
    return lhs;
  }

  FormulaPtr unary_expr() {
    if (accept("!") || accept("~") || accept_word("not")) return negation(unary_expr());
    if (accept_word("G")) {
      auto iv = interval();
      return globally(unary_expr(), iv);
    }
    if (accept_word("F")) {
      auto iv = interval();
      return eventually(unary_expr(), iv);
    }
    return atom();
  }

  FormulaPtr atom() {
    if (accept("(")) {
      auto f = implication_expr();
      expect(")");
      return f;
    }
    size_t start = (skip_ws(), pos_);
    auto name = identifier();
    if (!name) fail("expected predicate or '('");
    if (!signals_.empty() && std::find(signals_.begin(), signals_.end(), *name) == signals_.end()) {
      pos_ = start;
      fail("unknown signal '" + *name + "'");
    }
    Cmp cmp;
    if (accept(">=") || accept("≥")) {
      cmp = Cmp::ge;
    } else if (accept("<=") || accept("≤")) {
      cmp = Cmp::le;
    } else if (accept(">")) {
      cmp = Cmp::gt;
    } else if (accept("<")) {
      cmp = Cmp::lt;
    } else {
      fail("expected comparison operator");
    }
    return pred(*name, cmp, number());
  }

  std::string_view text_;
  std::span<const std::string> signals_;
  size_t pos_ = 0;
};

}  // namespace detail

/// Parses a formula. When `signals` is non-empty every predicate must
/// reference one of them.
inline FormulaPtr parse_formula(std::string_view text, std::span<const std::string> signals = {}) {
  return detail::FormulaParser(text, signals).parse();
}

/// Named, uniformly sampled signals sharing one time base (t_i = i * dt).
struct SignalTable {
  double dt = 1.0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t size() const { return columns.empty() ? 0 : columns.front().size(); }

  const std::vector<double>& column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return columns[i];
    }
    throw Error("unknown signal '" + std::string(name) + "'");
  }

  void add(std::string name, std::vector<double> values) {
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
  }
};

/// Sample offsets of an interval: floor(lo/dt) .. ceil(hi/dt). Unbounded
/// upper ends map to nullopt.
struct IndexWindow {
  std::size_t lo = 0;
  std::optional<std::size_t> hi;
};

inline IndexWindow snap_interval(const Interval& iv, double dt) {
  constexpr double slack = 1e-9;
  IndexWindow w;
  w.lo = static_cast<std::size_t>(std::floor(iv.lo / dt + slack));
  if (iv.hi) w.hi = static_cast<std::size_t>(std::max(0.0, std::ceil(*iv.hi / dt - slack)));
  if (w.hi && *w.hi < w.lo) w.hi = w.lo;
  return w;
}

namespace detail {

inline constexpr double pos_inf = std::numeric_limits<double>::infinity();
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// out[k] = min (or max) of v over [k+lo, min(k+hi, n-1)]; empty windows give
// +inf for min and -inf for max. Monotone-deque sliding extremum, O(n).
inline std::vector<double> sliding_extremum(const std::vector<double>& v, const IndexWindow& w, bool take_min) {
  const std::size_t n = v.size();
  std::vector<double> out(n, take_min ? pos_inf : neg_inf);
  std::deque<std::size_t> dq;
  std::size_t next = 0;
  auto better = [&](double a, double b) { return take_min ? a <= b : a >= b; };
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t left = k + w.lo;
    if (left >= n) break;
    std::size_t right = w.hi ? std::min(n - 1, k + *w.hi) : n - 1;
    if (next < left) next = left;
    while (next <= right) {
      while (!dq.empty() && better(v[next], v[dq.back()])) dq.pop_back();
      dq.push_back(next++);
    }
    while (!dq.empty() && dq.front() < left) dq.pop_front();
    out[k] = v[dq.front()];
  }
  return out;
}

inline std::vector<double> until_arrays(const std::vector<double>& phi, const std::vector<double>& psi,
                                        const IndexWindow& w) {
  const std::size_t n = phi.size();
  // inner[m] = max over m' in [m, m+span] of min(psi[m'], min phi over [m, m'))
  std::vector<double> inner(n, neg_inf);
  if (!w.hi) {
    double next = neg_inf;
    for (std::size_t m = n; m-- > 0;) {
      next = std::max(psi[m], std::min(phi[m], next));
      inner[m] = next;
    }
  } else {
    std::size_t span = *w.hi - w.lo;
    for (std::size_t m = 0; m < n; ++m) {
      double running = pos_inf;
      double best = neg_inf;
      std::size_t last = std::min(n - 1, m + span);
      for (std::size_t j = m; j <= last; ++j) {
        best = std::max(best, std::min(psi[j], running));
        running = std::min(running, phi[j]);
      }
      inner[m] = best;
    }
  }
  // prefix[k] = min phi over [k, k+lo)
  std::vector<double> prefix(n, pos_inf);
  if (w.lo > 0) {
    IndexWindow pw{0, w.lo - 1};
    prefix = sliding_extremum(phi, pw, true);
  }
  std::vector<double> out(n, neg_inf);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t start = k + w.lo;
    if (start >= n) break;
    out[k] = std::min(prefix[k], inner[start]);
  }
  return out;
}

inline std::vector<double> evaluate_all(const Formula& f, const SignalTable& table) {
  const std::size_t n = table.size();
  switch (f.op) {
    case Op::predicate: {
      const auto& s = table.column(f.signal);
      std::vector<double> out(n);
      bool above = f.cmp == Cmp::gt || f.cmp == Cmp::ge;
      for (std::size_t i = 0; i < n; ++i) out[i] = above ? s[i] - f.threshold : f.threshold - s[i];
      return out;
    }
    case Op::negation: {
      auto out = evaluate_all(*f.lhs, table);
      for (auto& x : out) x = -x;
      return out;
    }
    case Op::conjunction:
    case Op::disjunction:
    case Op::implication: {
      auto a = evaluate_all(*f.lhs, table);
      auto b = evaluate_all(*f.rhs, table);
      for (std::size_t i = 0; i < n; ++i) {
        if (f.op == Op::conjunction) {
          a[i] = std::min(a[i], b[i]);
        } else if (f.op == Op::disjunction) {
          a[i] = std::max(a[i], b[i]);
        } else {
          a[i] = std::max(-a[i], b[i]);
        }
      }
      return a;
    }
    case Op::globally:
    case Op::eventually:
      return sliding_extremum(evaluate_all(*f.lhs, table), snap_interval(f.interval, table.dt),
                              f.op == Op::globally);
    case Op::until:
      return until_arrays(evaluate_all(*f.lhs, table), evaluate_all(*f.rhs, table),
                          snap_interval(f.interval, table.dt));
  }
  return {};
}

}  // namespace detail

/// Robustness at every sample index. Entries whose evaluation needs samples
/// past the end of the trace are +/-inf (inf/sup over an empty window).
inline std::vector<double> robustness_signal(const Formula& f, const SignalTable& table) {
  if (table.size() == 0) throw Error("robustness of an empty trace");
  if (!(table.dt > 0.0)) throw Error("trace dt must be positive");
  return detail::evaluate_all(f, table);
}

/// Robustness rho of `f` at time t0 (snapped down to a sample index).
inline double robustness(const Formula& f, const SignalTable& table, double t0 = 0.0) {
  auto values = robustness_signal(f, table);
  if (t0 < 0.0) throw Error("t0 must be non-negative");
  auto k = static_cast<std::size_t>(std::floor(t0 / table.dt + 1e-9));
  if (k >= values.size()) throw Error("t0 lies beyond the end of the trace");
  double rho = values[k];
  if (!std::isfinite(rho)) throw Error("empty window after snapping: formula needs samples past the end of the trace");
  return rho;
}

/// rho > 0 is satisfaction; the boundary rho = 0 counts as a violation.
inline bool is_satisfied(double rho) { return rho > 0.0; }

}  // namespace scenfalsify::mtl
