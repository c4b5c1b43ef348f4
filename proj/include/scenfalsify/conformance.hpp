#pragma once

// Distances between timed trajectories (Skorokhod, normalized DTW), minimum
// time-to-collision, and the repeated-simulation variance study.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenfalsify/error.hpp"
#include "scenfalsify/geometry.hpp"
#include "scenfalsify/sim_world.hpp"

namespace scenfalsify {

/// Timestamped planar positions, strictly increasing in time.
class TimedPath {
 public:
  struct Sample {
    double t = 0.0;
    Vec2 pos;
  };

  explicit TimedPath(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw Error("timed path needs at least two samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto& s = samples_[i];
      if (!std::isfinite(s.t) || !std::isfinite(s.pos.x) || !std::isfinite(s.pos.y)) {
        throw Error("timed path sample " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && !(s.t > samples_[i - 1].t)) {
        throw Error("timed path timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
      }
    }
  }

  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<Sample> samples_;
};

inline TimedPath ego_path(const Trace& trace) {
  std::vector<TimedPath::Sample> s;
  s.reserve(trace.states.size());
  for (const auto& w : trace.states) s.push_back({w.t, {w.av.x, w.av.y}});
  return TimedPath(std::move(s));
}

namespace detail {

inline double skorokhod_cost(const TimedPath::Sample& a, const TimedPath::Sample& b) {
  return std::max(std::abs(a.t - b.t), (a.pos - b.pos).norm());
}

}  // namespace detail

/// Discrete Skorokhod distance: the minimum, over monotone alignments of the
/// two sample sequences, of the worst per-pair max(|time gap|, position gap).
/// Seconds and meters weigh equally. Alignments stay within `window` samples
/// of the diagonal; window 0 pairs sample i with sample i only.
inline double skorokhod_distance(const TimedPath& a, const TimedPath& b, std::size_t window = 200) {
  const std::size_t n = a.size(), m = b.size();
  std::size_t skew = n > m ? n - m : m - n;
  if (skew > window) {
    throw Error("skorokhod window " + std::to_string(window) + " cannot align paths of " + std::to_string(n) +
                " and " + std::to_string(m) + " samples; use a window of at least " + std::to_string(skew));
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m, inf), cur(m, inf);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j_lo = i > window ? i - window : 0;
    std::size_t j_hi = std::min(m - 1, i + window);
    std::fill(cur.begin(), cur.end(), inf);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      double best;
      if (i == 0 && j == 0) {
        best = 0.0;
      } else {
        best = inf;
        if (i > 0) best = std::min(best, prev[j]);
        if (j > 0) best = std::min(best, cur[j - 1]);
        if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      }
      cur[j] = std::max(best, detail::skorokhod_cost(a[i], b[j]));
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

/// Dynamic time warping with Euclidean positional cost, divided by the
/// number of pairs on the optimal warping path. Among equal-cost paths the
/// shortest is used.
inline double dtw_normalized(const TimedPath& a, const TimedPath& b) {
  const std::size_t n = a.size(), m = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  struct Cell {
    double cost;
    std::size_t len;
  };
  auto better = [](const Cell& x, const Cell& y) { return x.cost < y.cost || (x.cost == y.cost && x.len < y.len); };
  std::vector<Cell> prev(m, {inf, 0}), cur(m, {inf, 0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      Cell best{inf, 0};
      if (i == 0 && j == 0) best = {0.0, 0};
      if (i > 0 && better(prev[j], best)) best = prev[j];
      if (j > 0 && better(cur[j - 1], best)) best = cur[j - 1];
      if (i > 0 && j > 0 && better(prev[j - 1], best)) best = prev[j - 1];
      cur[j] = {best.cost + (a[i].pos - b[j].pos).norm(), best.len + 1};
    }
    std::swap(prev, cur);
  }
  return prev[m - 1].cost / static_cast<double>(prev[m - 1].len);
}

struct GapReport {
  std::string label_a;
  std::string label_b;
  double skorokhod = 0.0;
  double dtw_normalized = 0.0;
};

inline GapReport compare_paths(const TimedPath& a, const TimedPath& b, std::size_t window = 200,
                               std::string label_a = "a", std::string label_b = "b") {
  return {std::move(label_a), std::move(label_b), skorokhod_distance(a, b, window), dtw_normalized(a, b)};
}

struct TtcOptions {
  double min_closing_speed = 0.1;  // m/s, slower timestamps are skipped
  double path_tolerance = 0.1;     // m, ego this close to the crossing line has reached it
};

/// Minimum over the approach of distance / closing speed, where closing
/// speed is the ego velocity projected on the line of sight to the
/// pedestrian. Evaluation stops once the pedestrian has finished crossing or
/// the ego reaches the pedestrian's crossing line (taken from the first and
/// last pedestrian positions in the trace).
inline std::optional<double> min_ttc(const Trace& trace, const TtcOptions& opt = {}) {
  if (trace.states.empty()) return std::nullopt;
  Vec2 p0{trace.states.front().ped.x, trace.states.front().ped.y};
  Vec2 p1{trace.states.back().ped.x, trace.states.back().ped.y};
  std::optional<Vec2> line_dir;
  if ((p1 - p0).norm() > 1e-9) line_dir = (p1 - p0).normalized();
  auto side = [&](Vec2 q) { return line_dir->cross(q - p0); };
  std::optional<double> first_side;
  if (line_dir) {
    const auto& s0 = trace.states.front();
    first_side = side({s0.av.x, s0.av.y});
  }

  std::optional<double> best;
  for (const auto& s : trace.states) {
    if (s.ped_phase == PedPhase::done) break;
    Vec2 ego{s.av.x, s.av.y};
    if (line_dir) {
      double d = side(ego);
      if (std::abs(d) <= opt.path_tolerance || (*first_side < 0.0) != (d < 0.0)) break;
    }
    Vec2 los = Vec2{s.ped.x, s.ped.y} - ego;
    double range = los.norm();
    if (range <= 0.0) continue;
    double closing = std::max(0.0, heading_vec(s.av.heading).dot(los) * s.av.speed / range);
    if (closing <= opt.min_closing_speed) continue;
    double ttc = s.dist / closing;
    if (!best || ttc < *best) best = ttc;
  }
  return best;
}

struct ResimPair {
  std::size_t i = 0;
  std::size_t j = 0;
  GapReport gap;
};

struct ResimReport {
  std::vector<std::uint64_t> seeds;
  std::vector<Trace> traces;
  std::vector<ResimPair> pairs;
  double mean_skorokhod = 0.0;
  double mean_dtw = 0.0;
  std::vector<std::string> warnings;
};

/// Simulates the same case once per noise seed and compares every pair of
/// ego paths.
inline ResimReport resim_variance(const Scene& scene, const ParamVector& params, const StackConfig& stack,
                                  const std::vector<std::uint64_t>& noise_seeds, const SimOptions& opt = {},
                                  std::size_t window = 200) {
  if (noise_seeds.size() < 2) throw Error("resimulation needs at least two runs");
  ResimReport rep;
  rep.seeds = noise_seeds;
  if (!(stack.nondet_noise_std > 0.0)) {
    rep.warnings.push_back("nondet_noise_std is 0; all resimulations are identical");
  }
  auto sorted = noise_seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    rep.warnings.push_back("duplicate noise seeds; the matching runs are identical");
  }
  std::vector<TimedPath> paths;
  for (auto seed : noise_seeds) {
    StackConfig cfg = stack;
    cfg.noise_seed = seed;
    rep.traces.push_back(simulate(scene, params, cfg, opt));
    paths.push_back(ego_path(rep.traces.back()));
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      auto gap = compare_paths(paths[i], paths[j], window, "run" + std::to_string(i + 1),
                               "run" + std::to_string(j + 1));
      rep.mean_skorokhod += gap.skorokhod;
      rep.mean_dtw += gap.dtw_normalized;
      rep.pairs.push_back({i, j, std::move(gap)});
    }
  }
  rep.mean_skorokhod /= static_cast<double>(rep.pairs.size());
  rep.mean_dtw /= static_cast<double>(rep.pairs.size());
  return rep;
}

/// k runs with noise seeds stack.noise_seed, stack.noise_seed + 1, ...
inline ResimReport resim_variance(const Scene& scene, const ParamVector& params, const StackConfig& stack,
                                  std::size_t k, const SimOptions& opt = {}, std::size_t window = 200) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < k; ++r) seeds.push_back(stack.noise_seed + r);
  return resim_variance(scene, params, stack, seeds, opt, window);
}

}  // namespace scenfalsify
