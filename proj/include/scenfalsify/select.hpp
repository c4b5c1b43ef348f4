#pragma once

// Labeling campaign cases as failing (F), marginal (M), or robustly safe (S),
// and picking a spread-out handful of each for follow-up testing.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "scenfalsify/detail/text.hpp"
#include "scenfalsify/error.hpp"
#include "scenfalsify/falsify.hpp"

namespace scenfalsify {

enum class Label { F, M, S };

inline char to_char(Label l) { return l == Label::F ? 'F' : l == Label::M ? 'M' : 'S'; }

struct SelectionConfig {
  double epsilon = 0.08;           // radius in min-max normalized parameter space
  std::array<int, 3> counts{2, 3, 2};  // representatives wanted for F, M, S

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
    for (int c : counts) {
      if (c < 0) throw Error("class counts must be non-negative");
    }
  }
};

/// Parses "F:M:S", e.g. "2:3:2".
inline std::array<int, 3> parse_counts(std::string_view text) {
  auto parts = detail::split(text, ':');
  if (parts.size() != 3) throw Error("counts must look like F:M:S, got '" + std::string(text) + "'");
  std::array<int, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = detail::parse_double(parts[i]);
    if (!v || *v < 0 || *v != std::floor(*v) || *v > 1e6) {
      throw Error("bad class count '" + std::string(parts[i]) + "'");
    }
    out[i] = static_cast<int>(*v);
  }
  return out;
}

/// Per-axis affine map onto [0, 1]. Zero-width axes are dropped.
struct Normalizer {
  std::vector<std::size_t> axes;
  std::vector<double> lo;
  std::vector<double> width;

  std::vector<double> apply(const ParamVector& pv) const {
    std::vector<double> out;
    out.reserve(axes.size());
    for (std::size_t k = 0; k < axes.size(); ++k) out.push_back((pv.values[axes[k]] - lo[k]) / width[k]);
    return out;
  }
};

inline Normalizer fit_normalizer(const std::vector<CaseResult>& cases, const std::vector<std::string>& names,
                                 std::vector<std::string>& warnings) {
  Normalizer n;
  if (cases.empty()) return n;
  std::size_t dims = cases.front().params.values.size();
  for (std::size_t d = 0; d < dims; ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : cases) {
      lo = std::min(lo, c.params.values[d]);
      hi = std::max(hi, c.params.values[d]);
    }
    if (!(hi > lo)) {
      std::string name = d < names.size() ? names[d] : std::to_string(d);
      warnings.push_back("parameter '" + name + "' has zero width; dropped from normalization");
      continue;
    }
    n.axes.push_back(d);
    n.lo.push_back(lo);
    n.width.push_back(hi - lo);
  }
  return n;
}

struct LabeledCase {
  CaseResult result;  // without the trace
  Label label = Label::S;
  std::vector<double> normalized;
};

struct Labeling {
  std::vector<LabeledCase> cases;  // ordered by case id
  std::vector<std::string> warnings;
};

inline double normalized_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// F if rho <= 0; otherwise M when some error-table case lies within
/// epsilon (inclusive) in normalized space, else S.
inline Labeling label_cases(const CampaignReport& rep, const SelectionConfig& cfg) {
  cfg.validate();
  Labeling out;
  auto cases = rep.cases();
  if (cases.empty()) throw Error("campaign has no cases to label");
  for (const auto& c : cases) {
    if (c.params.values.size() != cases.front().params.values.size()) {
      throw Error("cases have differing parameter counts");
    }
  }
  auto norm = fit_normalizer(cases, rep.param_names, out.warnings);

  out.cases.reserve(cases.size());
  for (auto& c : cases) {
    LabeledCase lc;
    lc.normalized = norm.apply(c.params);
    lc.label = mtl::is_satisfied(c.rho) ? Label::S : Label::F;
    c.trace.reset();
    lc.result = std::move(c);
    out.cases.push_back(std::move(lc));
  }

  // Error points sorted on the first normalized coordinate; each safe case
  // only scans the slab within epsilon of its own first coordinate.
  std::vector<const LabeledCase*> errors;
  for (const auto& lc : out.cases) {
    if (lc.label == Label::F) errors.push_back(&lc);
  }
  auto key = [](const LabeledCase* p) { return p->normalized.empty() ? 0.0 : p->normalized.front(); };
  std::sort(errors.begin(), errors.end(), [&](auto* a, auto* b) { return key(a) < key(b); });
  for (auto& lc : out.cases) {
    if (lc.label == Label::F) continue;
    double x = lc.normalized.empty() ? 0.0 : lc.normalized.front();
    auto it = std::lower_bound(errors.begin(), errors.end(), x - cfg.epsilon,
                               [&](const LabeledCase* p, double v) { return key(p) < v; });
    for (; it != errors.end() && key(*it) <= x + cfg.epsilon; ++it) {
      if (normalized_distance(lc.normalized, (*it)->normalized) <= cfg.epsilon) {
        lc.label = Label::M;
        break;
      }
    }
  }
  return out;
}

struct Representative {
  std::string name;  // F1, F2, M1, ...
  LabeledCase item;
};

struct Selection {
  std::vector<Representative> picks;
  std::vector<std::string> warnings;
};

/// Greedy farthest-point selection within each class. The first pick is the
/// most extreme case (lowest rho for F and M, highest for S); each later pick
/// maximizes its distance to those already chosen. Ties go to the lowest
/// case id. Cases whose evaluation errored are never picked.
inline Selection pick_representatives(const std::vector<LabeledCase>& labeled, const SelectionConfig& cfg) {
  cfg.validate();
  if (labeled.empty()) throw Error("no labeled cases to select from");
  Selection out;
  for (Label cls : {Label::F, Label::M, Label::S}) {
    int want = cfg.counts[static_cast<std::size_t>(cls)];
    std::vector<const LabeledCase*> pool;
    for (const auto& lc : labeled) {
      if (lc.label == cls && lc.result.status != CaseStatus::error) pool.push_back(&lc);
    }
    std::sort(pool.begin(), pool.end(),
              [](auto* a, auto* b) { return a->result.case_id < b->result.case_id; });
    if (want == 0) continue;
    if (static_cast<int>(pool.size()) < want) {
      out.warnings.push_back(std::string("class ") + to_char(cls) + " has " + std::to_string(pool.size()) +
                             " case(s), " + std::to_string(want) + " requested");
    }

    std::vector<const LabeledCase*> chosen;
    std::vector<double> gap(pool.size(), std::numeric_limits<double>::infinity());
    std::vector<bool> used(pool.size(), false);
    while (static_cast<int>(chosen.size()) < want && chosen.size() < pool.size()) {
      std::size_t best = pool.size();
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i]) continue;
        if (best == pool.size()) {
          best = i;
          continue;
        }
        bool take;
        if (chosen.empty()) {
          double ri = pool[i]->result.rho, rb = pool[best]->result.rho;
          take = cls == Label::S ? ri > rb : ri < rb;
        } else {
          take = gap[i] > gap[best];
        }
        if (take) best = i;
      }
      used[best] = true;
      chosen.push_back(pool[best]);
      for (std::size_t i = 0; i < pool.size(); ++i) {
        gap[i] = std::min(gap[i], normalized_distance(pool[i]->normalized, pool[best]->normalized));
      }
    }
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      out.picks.push_back({std::string(1, to_char(cls)) + std::to_string(k + 1), *chosen[k]});
    }
  }
  return out;
}

inline void write_selection_csv(std::ostream& os, const std::vector<std::string>& param_names,
                                const Selection& sel) {
  os << "case,label";
  for (const auto& n : param_names) os << ',' << n;
  os << ",min_dist_sim\n";
  for (const auto& r : sel.picks) {
    os << r.name << ',' << to_char(r.item.label);
    for (double v : r.item.result.params.values) os << ',' << format_number(v);
    os << ',' << format_number(r.item.result.min_dist) << '\n';
  }
}

}  // namespace scenfalsify
