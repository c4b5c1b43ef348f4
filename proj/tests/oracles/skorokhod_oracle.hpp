#pragma once

// Exhaustive Skorokhod reference: walks every monotone alignment of the two
// sample sequences inside the band and keeps the best worst-case pair cost.
// Exponential; only for tiny inputs.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace oracle {

struct Pt {
  double t;
  double x;
  double y;
};

inline double pair_cost(const Pt& a, const Pt& b) {
  return std::max(std::abs(a.t - b.t), std::hypot(a.x - b.x, a.y - b.y));
}

inline void walk(const std::vector<Pt>& a, const std::vector<Pt>& b, long window, std::size_t i, std::size_t j,
                 double worst, double& best) {
  if (std::labs(static_cast<long>(i) - static_cast<long>(j)) > window) return;
  worst = std::max(worst, pair_cost(a[i], b[j]));
  if (worst >= best) return;
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = worst;
    return;
  }
  if (i + 1 < a.size()) walk(a, b, window, i + 1, j, worst, best);
  if (j + 1 < b.size()) walk(a, b, window, i, j + 1, worst, best);
  if (i + 1 < a.size() && j + 1 < b.size()) walk(a, b, window, i + 1, j + 1, worst, best);
}

/// +inf when no alignment fits the band.
inline double skorokhod_exhaustive(const std::vector<Pt>& a, const std::vector<Pt>& b, long window) {
  double best = std::numeric_limits<double>::infinity();
  walk(a, b, window, 0, 0, 0.0, best);
  return best;
}

}  // namespace oracle
