#pragma once

// Deterministic 2D surrogate world: an ego vehicle driving a fixed route
// under a perception -> prediction -> planning -> control stack, and a
// pedestrian crossing the post-turn lane with one hesitation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scenfalsify/error.hpp"
#include "scenfalsify/geometry.hpp"
#include "scenfalsify/mtl.hpp"
#include "scenfalsify/sampling.hpp"
#include "scenfalsify/scenario.hpp"

namespace scenfalsify {

enum class PedPhase { waiting, walking, hesitating, resumed, done };

inline std::string_view to_string(PedPhase p) {
  switch (p) {
    case PedPhase::waiting: return "waiting";
    case PedPhase::walking: return "walking";
    case PedPhase::hesitating: return "hesitating";
    case PedPhase::resumed: return "resumed";
    case PedPhase::done: return "done";
  }
  return "waiting";
}

inline PedPhase parse_ped_phase(std::string_view s) {
  for (auto p : {PedPhase::waiting, PedPhase::walking, PedPhase::hesitating, PedPhase::resumed, PedPhase::done}) {
    if (to_string(p) == s) return p;
  }
  throw Error("unknown pedestrian phase '" + std::string(s) + "'");
}

struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

struct WorldState {
  double t = 0.0;
  AgentState av;
  AgentState ped;  // heading unused in the trace schema
  PedPhase ped_phase = PedPhase::waiting;
  bool detected = false;
  double dist = 0.0;
};

namespace subsystem {
inline constexpr std::string_view perception = "perception";
inline constexpr std::string_view prediction = "prediction";
inline constexpr std::string_view planning = "planning";
inline constexpr std::string_view world = "world";
}  // namespace subsystem

namespace event {
inline constexpr std::string_view dropout = "dropout";
inline constexpr std::string_view mispredict = "mispredict";
inline constexpr std::string_view yield = "yield";
inline constexpr std::string_view overtake = "overtake";
inline constexpr std::string_view resume = "resume";
inline constexpr std::string_view collision = "collision";
}  // namespace event

struct Event {
  double t = 0.0;
  std::string subsystem;
  std::string description;
  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  double dt = 0.02;
  std::vector<WorldState> states;
  std::vector<Event> events;
  bool collision = false;
  bool horizon_exhausted = false;  // pedestrian trigger lies past the horizon
  std::string diagnostic;
};

/// Surrogate AV stack parameters. Defaults are the calibrated values
/// produced by tools/calibrate (see README).
struct StackConfig {
  double perception_range = 40.0;     // m
  double perception_fov = 2.0 * kPi / 3.0;  // rad, full cone
  double dropout_prob = 0.0;          // per tick
  std::uint64_t dropout_seed = 0;
  double track_timeout = 0.5;         // s a lost track is coasted
  double prediction_horizon = 3.0;    // s, constant-velocity extrapolation
  double prediction_step = 0.1;       // s
  double corridor_half_width = 1.9;   // m, lateral conflict band around the route
  double yield_distance = 10.0;       // m
  double stop_standoff = 5.0;         // m short of the conflict point where a yield aims to stop
  double resume_gap = 2.3;            // m
  double inch_speed = 0.9;            // m/s, creep speed while overtaking a stationary pedestrian
  double stationary_speed = 0.05;     // m/s
  double max_speed = 4.5;             // m/s
  double max_accel = 1.5;             // m/s^2
  double max_decel = 3.0;             // m/s^2
  double nondet_noise_std = 0.0;      // m/s^2 on the commanded acceleration
  std::uint64_t noise_seed = 0;

  void validate() const {
    auto nonneg = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(std::string(name) + " must be finite and non-negative");
    };
    nonneg(perception_range, "perception_range");
    nonneg(perception_fov, "perception_fov");
    nonneg(track_timeout, "track_timeout");
    nonneg(prediction_horizon, "prediction_horizon");
    nonneg(corridor_half_width, "corridor_half_width");
    nonneg(yield_distance, "yield_distance");
    nonneg(stop_standoff, "stop_standoff");
    nonneg(resume_gap, "resume_gap");
    nonneg(inch_speed, "inch_speed");
    nonneg(stationary_speed, "stationary_speed");
    nonneg(max_speed, "max_speed");
    nonneg(max_accel, "max_accel");
    nonneg(max_decel, "max_decel");
    nonneg(nondet_noise_std, "nondet_noise_std");
    if (!(prediction_step > 0.0)) throw Error("prediction_step must be positive");
    if (!(dropout_prob >= 0.0 && dropout_prob <= 1.0)) throw Error("dropout_prob must lie in [0, 1]");
  }
};

/// Fixed scene constants shared by every simulation.
struct WorldConfig {
  double lane_width = 6.0;          // m
  double blend_radius = 8.0;        // m, corner arc
  double collision_distance = 1.0;  // m, center-to-center
  double pass_margin = 10.0;        // m the ego must clear the crossing by
};

struct SimOptions {
  double dt = 0.02;
  double horizon = 40.0;
  WorldConfig world;
};

/// Effective pedestrian parameters. Undeclared ones default to an immediate
/// start with no hesitation.
struct PedestrianParams {
  double t_start = 0.0;
  double d_walk = std::numeric_limits<double>::infinity();
  double t_hesitate = 0.0;

  static PedestrianParams from(const ScenarioSpec& spec, const ParamVector& pv) {
    if (pv.values.size() != spec.params.size()) {
      throw Error("parameter vector has " + std::to_string(pv.values.size()) + " values, scenario declares " +
                  std::to_string(spec.params.size()));
    }
    PedestrianParams out;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
      const auto& name = spec.params[i].name;
      double v = pv.values[i];
      if (name == params::t_start) out.t_start = v;
      else if (name == params::d_walk) out.d_walk = v;
      else if (name == params::t_hesitate) out.t_hesitate = v;
    }
    return out;
  }
};

struct PedSample {
  double displacement = 0.0;
  PedPhase phase = PedPhase::waiting;
  double speed = 0.0;
};

/// Closed-form straight-line crossing with one hesitation:
/// wait until t_start, walk d_walk, hold for t_hesitate, walk the rest.
inline PedSample pedestrian_displacement(const PedestrianParams& p, double t, double speed, double crossing_length) {
  if (t < p.t_start) return {0.0, PedPhase::waiting, 0.0};
  double walk = std::clamp(p.d_walk, 0.0, crossing_length);
  double walk_end = p.t_start + walk / speed;
  if (t < walk_end) return {speed * (t - p.t_start), PedPhase::walking, speed};
  if (walk >= crossing_length) return {crossing_length, PedPhase::done, 0.0};
  double hes_end = walk_end + std::max(0.0, p.t_hesitate);
  if (t < hes_end) return {walk, PedPhase::hesitating, 0.0};
  double resume_end = hes_end + (crossing_length - walk) / speed;
  if (t < resume_end) return {walk + speed * (t - hes_end), PedPhase::resumed, speed};
  return {crossing_length, PedPhase::done, 0.0};
}

/// Scene geometry derived from a scenario: route, crossing line, and the
/// pedestrian's total crossing length (start to the far lane edge).
class Scene {
 public:
  Scene(const ScenarioSpec& spec, const WorldConfig& world)
      : spec_(spec), world_(world), route_(spec.route, world.blend_radius) {
    ped_origin_ = {spec.ped_pose.x, spec.ped_pose.y};
    ped_dir_ = heading_vec(spec.ped_pose.heading);
    ego_s0_ = route_.project({spec.ego_pose.x, spec.ego_pose.y}).s;
    locate_crossing();
  }

  const Route& route() const { return route_; }
  const ScenarioSpec& spec() const { return spec_; }
  const WorldConfig& world() const { return world_; }
  double ego_start_s() const { return ego_s0_; }
  double crossing_s() const { return crossing_s_; }
  double crossing_length() const { return crossing_length_; }
  Vec2 ped_origin() const { return ped_origin_; }
  Vec2 ped_direction() const { return ped_dir_; }

  struct PedPose {
    Vec2 pos;
    Vec2 vel;
    PedPhase phase;
  };

  PedPose pedestrian_at(const PedestrianParams& p, double t) const {
    auto s = pedestrian_displacement(p, t, spec_.ped_speed, crossing_length_);
    return {ped_origin_ + ped_dir_ * s.displacement, ped_dir_ * s.speed, s.phase};
  }

 private:
  void locate_crossing() {
    // March along the pedestrian's heading until the lateral offset changes sign.
    auto lateral = [&](double d) { return route_.project(ped_origin_ + ped_dir_ * d).lateral; };
    double step = 0.05;
    double prev = lateral(0.0);
    for (double d = step; d <= 200.0; d += step) {
      double cur = lateral(d);
      if ((prev < 0.0) != (cur < 0.0) || cur == 0.0) {
        double lo = d - step, hi = d;
        for (int i = 0; i < 60; ++i) {
          double mid = 0.5 * (lo + hi);
          if ((lateral(mid) < 0.0) == (prev < 0.0)) lo = mid;
          else hi = mid;
        }
        double cross = 0.5 * (lo + hi);
        crossing_s_ = route_.project(ped_origin_ + ped_dir_ * cross).s;
        crossing_length_ = cross + 0.5 * world_.lane_width;
        return;
      }
      prev = cur;
    }
    crossing_s_ = route_.project(ped_origin_).s;
    crossing_length_ = world_.lane_width;
  }

  ScenarioSpec spec_;
  WorldConfig world_;
  Route route_;
  Vec2 ped_origin_;
  Vec2 ped_dir_;
  double ego_s0_ = 0.0;
  double crossing_s_ = 0.0;
  double crossing_length_ = 0.0;
};

enum class PlannerMode { cruise, yield, overtake };

/// Mutable stack memory carried between ticks.
struct StackState {
  explicit StackState(std::uint64_t dropout_seed = 0, std::uint64_t noise_seed = 0)
      : dropout_rng(dropout_seed), noise_rng(noise_seed) {}

  PlannerMode mode = PlannerMode::cruise;
  struct Track {
    Vec2 pos;
    Vec2 vel;
    double t_seen = 0.0;
  };
  std::optional<Track> track;
  bool had_track = false;
  bool prev_conflict = false;
  Xoshiro256 dropout_rng;
  Xoshiro256 noise_rng;
};

/// What the stack sees each tick besides the logged WorldState.
struct StackInputs {
  const Route& route;
  double ego_s = 0.0;
  Vec2 ped_velocity;
  double dt = 0.02;
};

struct StackOutput {
  double accel = 0.0;
  bool detected = false;
  std::optional<double> conflict_gap;
  std::vector<Event> events;
};

namespace detail {

// Earliest constant-velocity prediction sample inside the route corridor and
// ahead of the ego; returns its arc-length gap.
inline std::optional<double> predicted_conflict(const StackState::Track& track, const StackInputs& in,
                                                const StackConfig& cfg) {
  int steps = static_cast<int>(std::floor(cfg.prediction_horizon / cfg.prediction_step + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    double tau = i * cfg.prediction_step;
    Vec2 p = track.pos + track.vel * tau;
    auto proj = in.route.project(p);
    double gap = proj.s - in.ego_s;
    if (std::abs(proj.lateral) < cfg.corridor_half_width && gap > 0.0) return gap;
  }
  return std::nullopt;
}

}  // namespace detail

/// One tick of perception, prediction, planning, and longitudinal control.
inline StackOutput step_stack(const WorldState& state, const StackConfig& cfg, StackState& mem,
                              const StackInputs& in) {
  StackOutput out;
  const double t = state.t;
  auto log = [&](std::string_view sub, std::string_view what) {
    out.events.push_back({t, std::string(sub), std::string(what)});
  };

  // Perception: range and field of view, then a per-tick dropout draw.
  Vec2 rel{state.ped.x - state.av.x, state.ped.y - state.av.y};
  double bearing = wrap_angle(std::atan2(rel.y, rel.x) - state.av.heading);
  bool visible = state.dist <= cfg.perception_range && std::abs(bearing) <= 0.5 * cfg.perception_fov;
  bool dropped = mem.dropout_rng.uniform01() < cfg.dropout_prob;
  out.detected = visible && !dropped;
  if (visible && dropped) log(subsystem::perception, event::dropout);

  if (out.detected) {
    mem.track = StackState::Track{{state.ped.x, state.ped.y}, in.ped_velocity, t};
  } else if (mem.track && t - mem.track->t_seen > cfg.track_timeout + 1e-9) {
    mem.track.reset();
  }

  // Prediction on the (possibly coasted) track.
  std::optional<StackState::Track> current;
  if (mem.track) {
    current = *mem.track;
    double age = t - mem.track->t_seen;
    current->pos = current->pos + current->vel * age;
  }
  if (current) out.conflict_gap = detail::predicted_conflict(*current, in, cfg);

  bool conflict = out.conflict_gap.has_value();
  if (out.detected && mem.had_track && !mem.prev_conflict && conflict && *out.conflict_gap < cfg.yield_distance) {
    log(subsystem::prediction, event::mispredict);
  }

  // Planning. From a near-stop behind a stationary pedestrian the planner
  // overtakes (creeps) until resume_gap; each time creeping reaches
  // inch_speed it falls back to yield, so inside the band between
  // resume_gap and yield_distance brake and accelerate commands alternate.
  bool stationary = current && current->vel.norm() < cfg.stationary_speed;
  const double v = state.av.speed;
  PlannerMode next = mem.mode;
  if (!conflict) {
    next = PlannerMode::cruise;
  } else {
    const double gap = *out.conflict_gap;
    switch (mem.mode) {
      case PlannerMode::cruise:
        if (gap < cfg.yield_distance) next = PlannerMode::yield;
        break;
      case PlannerMode::yield:
        if (stationary && v < cfg.inch_speed && gap > cfg.resume_gap) next = PlannerMode::overtake;
        break;
      case PlannerMode::overtake:
        if (!stationary || gap <= cfg.resume_gap || v >= cfg.inch_speed) next = PlannerMode::yield;
        break;
    }
  }
  if (next != mem.mode) {
    if (next == PlannerMode::yield) log(subsystem::planning, event::yield);
    else if (next == PlannerMode::overtake) log(subsystem::planning, event::overtake);
    else log(subsystem::planning, event::resume);
  }
  mem.mode = next;
  mem.prev_conflict = conflict;
  mem.had_track = current.has_value();

  // Control.
  double accel = 0.0;
  switch (next) {
    case PlannerMode::cruise: accel = (cfg.max_speed - v) / in.dt; break;
    case PlannerMode::yield: {
      // Constant deceleration that stops at the standoff; full braking inside it.
      double room = out.conflict_gap ? *out.conflict_gap - cfg.stop_standoff : 0.0;
      accel = room > 0.05 ? -(v * v) / (2.0 * room) : -cfg.max_decel;
      break;
    }
    case PlannerMode::overtake: accel = cfg.max_accel; break;
  }
  if (cfg.nondet_noise_std > 0.0) accel += cfg.nondet_noise_std * mem.noise_rng.normal();
  out.accel = std::clamp(accel, -cfg.max_decel, cfg.max_accel);
  return out;
}

/// Runs one test case. Pure function of its arguments.
inline Trace simulate(const Scene& scene, const ParamVector& params, const StackConfig& cfg,
                      const SimOptions& opt = {}) {
  if (!(opt.dt > 0.0 && opt.dt <= 0.1 + 1e-12)) throw Error("dt must lie in (0, 0.1]");
  if (!(opt.horizon > 0.0)) throw Error("horizon must be positive");
  cfg.validate();
  const auto ped_params = PedestrianParams::from(scene.spec(), params);
  const auto& route = scene.route();
  const auto& world = scene.world();

  auto case_stream = static_cast<std::uint64_t>(params.case_id);
  StackState mem(derive_seed(cfg.dropout_seed, case_stream), derive_seed(cfg.noise_seed, case_stream));

  Trace trace;
  trace.dt = opt.dt;
  auto ticks = static_cast<std::size_t>(std::floor(opt.horizon / opt.dt + 1e-9));
  trace.states.reserve(ticks + 1);

  double s = scene.ego_start_s();
  double v = 0.0;
  bool finished = false;
  for (std::size_t i = 0; i <= ticks; ++i) {
    const double t = static_cast<double>(i) * opt.dt;
    WorldState ws;
    ws.t = t;
    Vec2 ego = route.position(s);
    ws.av = {ego.x, ego.y, route.heading(s), v};
    auto ped = scene.pedestrian_at(ped_params, t);
    ws.ped = {ped.pos.x, ped.pos.y, 0.0, ped.vel.norm()};
    ws.ped_phase = ped.phase;
    ws.dist = std::hypot(ego.x - ped.pos.x, ego.y - ped.pos.y);

    StackInputs in{route, s, ped.vel, opt.dt};
    auto cmd = step_stack(ws, cfg, mem, in);
    ws.detected = cmd.detected;
    trace.states.push_back(ws);
    trace.events.insert(trace.events.end(), cmd.events.begin(), cmd.events.end());

    if (ws.dist < world.collision_distance) {
      trace.collision = true;
      trace.events.push_back({t, std::string(subsystem::world), std::string(event::collision)});
      finished = true;
      break;
    }
    if (s > scene.crossing_s() + world.pass_margin || s >= route.length()) {
      finished = true;
      break;
    }
    double s_next = s + v * opt.dt;
    v = std::max(0.0, v + cmd.accel * opt.dt);
    s = std::min(s_next, route.length());
  }
  if (!finished && ped_params.t_start > opt.horizon) {
    trace.horizon_exhausted = true;
    trace.diagnostic = "horizon too short to reach the pedestrian trigger";
  }
  return trace;
}

inline Trace simulate(const ScenarioSpec& spec, const ParamVector& params, const StackConfig& cfg,
                      const SimOptions& opt = {}) {
  return simulate(Scene(spec, opt.world), params, cfg, opt);
}

/// Pedestrian position at time t for a scenario (exposed for analysis and tests).
inline Scene::PedPose pedestrian_position(const ScenarioSpec& spec, const ParamVector& params, double t,
                                          const WorldConfig& world = {}) {
  if (t < 0.0) throw Error("t must be non-negative");
  Scene scene(spec, world);
  return scene.pedestrian_at(PedestrianParams::from(spec, params), t);
}

/// Trace signals usable in formulas. `speed` aliases av_speed.
inline const std::vector<std::string>& trace_signal_names() {
  static const std::vector<std::string> names = {"t",     "av_x",  "av_y",      "av_heading", "av_speed", "ped_x",
                                                 "ped_y", "ped_speed", "detected", "dist",    "speed"};
  return names;
}

inline mtl::SignalTable to_signal_table(const Trace& trace) {
  mtl::SignalTable table;
  table.dt = trace.dt;
  auto column = [&](auto get) {
    std::vector<double> out;
    out.reserve(trace.states.size());
    for (const auto& s : trace.states) out.push_back(get(s));
    return out;
  };
  table.add("t", column([](const WorldState& s) { return s.t; }));
  table.add("av_x", column([](const WorldState& s) { return s.av.x; }));
  table.add("av_y", column([](const WorldState& s) { return s.av.y; }));
  table.add("av_heading", column([](const WorldState& s) { return s.av.heading; }));
  table.add("av_speed", column([](const WorldState& s) { return s.av.speed; }));
  table.add("ped_x", column([](const WorldState& s) { return s.ped.x; }));
  table.add("ped_y", column([](const WorldState& s) { return s.ped.y; }));
  table.add("ped_speed", column([](const WorldState& s) { return s.ped.speed; }));
  table.add("detected", column([](const WorldState& s) { return s.detected ? 1.0 : 0.0; }));
  table.add("dist", column([](const WorldState& s) { return s.dist; }));
  table.add("speed", column([](const WorldState& s) { return s.av.speed; }));
  return table;
}

inline double min_distance(const Trace& trace) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.states) m = std::min(m, s.dist);
  return m;
}

enum class FailureKind { perception, prediction, planning };

inline std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::perception: return "perception";
    case FailureKind::prediction: return "prediction";
    case FailureKind::planning: return "planning";
  }
  return "";
}

struct AttributionThresholds {
  double perception_gap = 1.0;  // s without detection while in range
  int planning_flips = 2;       // yield/overtake flips ...
  double planning_window = 3.0; // ... within this many seconds
};

/// Hypothesized failure causes from a trace's event log.
inline std::set<FailureKind> attribute_failure(const Trace& trace, const AttributionThresholds& th = {}) {
  std::set<FailureKind> out;
  if (trace.states.empty()) return out;
  double t_min = trace.states.front().t;
  double d_min = trace.states.front().dist;
  for (const auto& s : trace.states) {
    if (s.dist < d_min) {
      d_min = s.dist;
      t_min = s.t;
    }
  }

  // Perception: a run of consecutive per-tick dropouts lasting >= 1 s that
  // began no later than the closest approach.
  const double link = 1.5 * trace.dt;
  std::optional<double> run_start;
  double run_last = 0.0;
  std::size_t run_ticks = 0;
  auto close_run = [&] {
    if (run_start && *run_start <= t_min + 1e-9 &&
        static_cast<double>(run_ticks) * trace.dt >= th.perception_gap - 1e-9) {
      out.insert(FailureKind::perception);
    }
  };
  std::vector<double> flips;
  for (const auto& e : trace.events) {
    if (e.subsystem == subsystem::perception && e.description == event::dropout) {
      if (run_start && e.t - run_last <= link) {
        ++run_ticks;
      } else {
        close_run();
        run_start = e.t;
        run_ticks = 1;
      }
      run_last = e.t;
    } else if (e.subsystem == subsystem::prediction && e.description == event::mispredict) {
      out.insert(FailureKind::prediction);
    } else if (e.subsystem == subsystem::planning &&
               (e.description == event::yield || e.description == event::overtake)) {
      flips.push_back(e.t);
    }
  }
  close_run();

  std::sort(flips.begin(), flips.end());
  auto need = static_cast<std::size_t>(std::max(1, th.planning_flips));
  for (std::size_t i = 0; i + need <= flips.size(); ++i) {
    if (flips[i + need - 1] - flips[i] <= th.planning_window + 1e-9) {
      out.insert(FailureKind::planning);
      break;
    }
  }
  return out;
}

}  // namespace scenfalsify
