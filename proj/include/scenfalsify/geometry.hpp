#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "scenfalsify/error.hpp"
#include "scenfalsify/scenario.hpp"

namespace scenfalsify {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  Vec2 normalized() const {
    double n = norm();
    return {x / n, y / n};
  }
  Vec2 left_normal() const { return {-y, x}; }
};

inline Vec2 to_vec(Point2 p) { return {p.x, p.y}; }
inline Vec2 heading_vec(double heading) { return {std::cos(heading), std::sin(heading)}; }

inline double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a < -kPi) a += 2.0 * kPi;
  return a;
}

/// Arc-length projection of a point onto a route.
struct RouteProjection {
  double s = 0.0;
  double lateral = 0.0;  // signed, positive to the left of travel
};

/// Polyline route whose interior corners are blended with circular arcs.
class Route {
 public:
  Route(const std::vector<Point2>& waypoints, double blend_radius) {
    if (waypoints.size() < 2) throw Error("route needs at least two waypoints");
    std::vector<Vec2> pts;
    for (auto p : waypoints) pts.push_back(to_vec(p));
    Vec2 cursor = pts.front();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      Vec2 dir = (pts[i + 1] - pts[i]).normalized();
      Vec2 seg_end = pts[i + 1];
      if (i + 2 < pts.size()) {
        Vec2 next_dir = (pts[i + 2] - pts[i + 1]).normalized();
        double turn = std::atan2(dir.cross(next_dir), dir.dot(next_dir));
        if (std::abs(turn) > 1e-9) {
          double len_in = (pts[i + 1] - pts[i]).norm();
          double len_out = (pts[i + 2] - pts[i + 1]).norm();
          double tangent = blend_radius * std::tan(std::abs(turn) / 2.0);
          double max_tangent = 0.5 * std::min(len_in, len_out);
          double radius = blend_radius;
          if (tangent > max_tangent) {
            tangent = max_tangent;
            radius = tangent / std::tan(std::abs(turn) / 2.0);
          }
          Vec2 arc_start = pts[i + 1] - dir * tangent;
          add_line(cursor, arc_start);
          add_arc(arc_start, dir, turn, radius);
          cursor = pts[i + 1] + next_dir * tangent;
          continue;
        }
      }
      add_line(cursor, seg_end);
      cursor = seg_end;
    }
  }

  double length() const { return total_; }

  Vec2 position(double s) const {
    const auto& p = piece_at(s);
    double u = std::clamp(s - p.s0, 0.0, p.length);
    if (!p.arc) return p.start + p.dir * u;
    double ang = p.angle0 + p.sign * u / p.radius;
    return p.center + Vec2{std::cos(ang), std::sin(ang)} * p.radius;
  }

  double heading(double s) const {
    const auto& p = piece_at(s);
    if (!p.arc) return std::atan2(p.dir.y, p.dir.x);
    double u = std::clamp(s - p.s0, 0.0, p.length);
    return wrap_angle(p.heading0 + p.sign * u / p.radius);
  }

  RouteProjection project(Vec2 q) const {
    RouteProjection best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& p : pieces_) {
      double u = 0.0;
      if (!p.arc) {
        u = std::clamp((q - p.start).dot(p.dir), 0.0, p.length);
      } else {
        Vec2 r = q - p.center;
        double ang = std::atan2(r.y, r.x);
        double du = wrap_angle(ang - p.angle0) * p.sign;
        // arc spans [0, sweep]; points past either end clamp to the nearer end
        double sweep = p.length / p.radius;
        if (du < 0.0 || du > sweep) {
          double to_start = std::abs(wrap_angle(ang - p.angle0));
          double to_end = std::abs(wrap_angle(ang - (p.angle0 + p.sign * sweep)));
          du = to_start <= to_end ? 0.0 : sweep;
        }
        u = du * p.radius;
      }
      double s = p.s0 + u;
      Vec2 foot = position(s);
      double d = (q - foot).norm();
      if (d < best_dist - 1e-12) {
        best_dist = d;
        Vec2 tangent = heading_vec(heading(s));
        best.s = s;
        best.lateral = tangent.cross(q - foot);
      }
    }
    return best;
  }

 private:
  struct Piece {
    bool arc = false;
    double s0 = 0.0;
    double length = 0.0;
    Vec2 start;
    Vec2 dir;  // line pieces
    Vec2 center;
    double radius = 0.0;
    double angle0 = 0.0;    // polar angle of the start point around center
    double heading0 = 0.0;  // travel heading at the start point
    double sign = 1.0;      // +1 counter-clockwise (left turn), -1 clockwise
  };

  void add_line(Vec2 a, Vec2 b) {
    double len = (b - a).norm();
    if (len <= 1e-12) return;
    Piece p;
    p.s0 = total_;
    p.length = len;
    p.start = a;
    p.dir = (b - a) * (1.0 / len);
    pieces_.push_back(p);
    total_ += len;
  }

  void add_arc(Vec2 start, Vec2 dir, double turn, double radius) {
    Piece p;
    p.arc = true;
    p.s0 = total_;
    p.sign = turn > 0 ? 1.0 : -1.0;
    p.radius = radius;
    p.length = radius * std::abs(turn);
    p.start = start;
    Vec2 normal = dir.left_normal() * p.sign;
    p.center = start + normal * radius;
    Vec2 r = start - p.center;
    p.angle0 = std::atan2(r.y, r.x);
    p.heading0 = std::atan2(dir.y, dir.x);
    pieces_.push_back(p);
    total_ += p.length;
  }

  const Piece& piece_at(double s) const {
    for (const auto& p : pieces_) {
      if (s < p.s0 + p.length) return p;
    }
    return pieces_.back();
  }

  std::vector<Piece> pieces_;
  double total_ = 0.0;
};

}  // namespace scenfalsify
