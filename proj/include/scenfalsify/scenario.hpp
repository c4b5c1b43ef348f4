#pragma once

// Line-oriented scenario files (.scn):
//
//   # comment
//   ego at X Y heading H
//   pedestrian at X Y heading H speed V
//   route X Y -> X Y { -> X Y }
//   param NAME = Uniform(LO, HI)
//   param NAME = VALUE
//
// Only the three pedestrian parameters understood by the built-in crossing
// behavior (t_start, d_walk, t_hesitate) may be declared.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenfalsify/detail/text.hpp"
#include "scenfalsify/error.hpp"

namespace scenfalsify {

enum class DistributionKind { uniform, constant };
enum class Unit { seconds, meters };

struct Distribution {
  DistributionKind kind = DistributionKind::constant;
  double lo = 0.0;
  double hi = 0.0;

  static Distribution uniform(double lo, double hi) { return {DistributionKind::uniform, lo, hi}; }
  static Distribution constant(double v) { return {DistributionKind::constant, v, v}; }

  double width() const { return hi - lo; }
  friend bool operator==(const Distribution&, const Distribution&) = default;
};

struct ParamDecl {
  std::string name;
  Distribution dist;
  Unit unit = Unit::seconds;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

struct ScenarioSpec {
  Pose ego_pose;
  Pose ped_pose;
  double ped_speed = 1.0;
  std::vector<ParamDecl> params;
  std::vector<Point2> route;

  const ParamDecl* find_param(std::string_view name) const {
    auto it = std::find_if(params.begin(), params.end(), [&](const ParamDecl& p) { return p.name == name; });
    return it == params.end() ? nullptr : &*it;
  }
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

namespace params {
inline constexpr std::string_view t_start = "t_start";
inline constexpr std::string_view d_walk = "d_walk";
inline constexpr std::string_view t_hesitate = "t_hesitate";
}  // namespace params

/// The parameter names the crossing behavior consumes, and their units.
inline std::optional<Unit> canonical_param_unit(std::string_view name) {
  if (name == params::t_start || name == params::t_hesitate) return Unit::seconds;
  if (name == params::d_walk) return Unit::meters;
  return std::nullopt;
}

/// One axis of the sampling hyper-rectangle.
struct ParamAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const ParamAxis&, const ParamAxis&) = default;
};

using ParamSpace = std::vector<ParamAxis>;

/// Axes in declaration order.
inline ParamSpace sample_space(const ScenarioSpec& spec) {
  ParamSpace space;
  space.reserve(spec.params.size());
  for (const auto& p : spec.params) space.push_back({p.name, p.dist.lo, p.dist.hi});
  return space;
}

namespace detail {

enum class TokKind { ident, number, equals, lparen, rparen, comma, arrow };

struct Token {
  TokKind kind;
  std::string_view text;
  double number = 0.0;
  int column = 1;
};

inline std::vector<Token> tokenize_line(std::string_view line, int line_no) {
  std::vector<Token> toks;
  size_t i = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < line.size()) {
    char c = line[i];
    int col = static_cast<int>(i) + 1;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '#') {
      break;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      toks.push_back({TokKind::arrow, line.substr(i, 2), 0.0, col});
      i += 2;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i + 1;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      toks.push_back({TokKind::ident, line.substr(i, j - i), 0.0, col});
      i = j;
    } else if (is_digit(c) || c == '.' || c == '-' || c == '+') {
      size_t j = i;
      if (line[j] == '-' || line[j] == '+') ++j;
      size_t digits = 0;
      while (j < line.size() && is_digit(line[j])) ++j, ++digits;
      if (j < line.size() && line[j] == '.') {
        ++j;
        while (j < line.size() && is_digit(line[j])) ++j, ++digits;
      }
      if (digits > 0 && j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
        size_t k = j + 1;
        if (k < line.size() && (line[k] == '-' || line[k] == '+')) ++k;
        size_t exp_digits = 0;
        while (k < line.size() && is_digit(line[k])) ++k, ++exp_digits;
        if (exp_digits > 0) j = k;
      }
      auto text = line.substr(i, j - i);
      auto value = digits > 0 ? parse_double(text) : std::nullopt;
      if (!value) throw ParseError("malformed number '" + std::string(text) + "'", line_no, col);
      toks.push_back({TokKind::number, text, *value, col});
      i = j;
    } else if (c == '=') {
      toks.push_back({TokKind::equals, line.substr(i, 1), 0.0, col});
      ++i;
    } else if (c == '(') {
      toks.push_back({TokKind::lparen, line.substr(i, 1), 0.0, col});
      ++i;
    } else if (c == ')') {
      toks.push_back({TokKind::rparen, line.substr(i, 1), 0.0, col});
      ++i;
    } else if (c == ',') {
      toks.push_back({TokKind::comma, line.substr(i, 1), 0.0, col});
      ++i;
    } else {
      throw ParseError("unexpected character", line_no, col);
    }
  }
  return toks;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int line_no, int line_len)
      : toks_(std::move(toks)), line_(line_no), end_col_(line_len + 1) {}

  bool at_end() const { return pos_ >= toks_.size(); }
  int column() const { return at_end() ? end_col_ : toks_[pos_].column; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, column()); }

  const Token& expect(TokKind kind, const char* what) {
    if (at_end() || toks_[pos_].kind != kind) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }
  void keyword(std::string_view kw) {
    if (at_end() || toks_[pos_].kind != TokKind::ident || toks_[pos_].text != kw) {
      fail("expected '" + std::string(kw) + "'");
    }
    ++pos_;
  }
  double number() { return expect(TokKind::number, "number").number; }
  bool peek(TokKind kind) const { return !at_end() && toks_[pos_].kind == kind; }
  void finish() {
    if (!at_end()) fail("unexpected trailing input");
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int line_;
  int end_col_;
};

}  // namespace detail

/// Parses and validates a scenario file. Throws ParseError with line/column.
inline ScenarioSpec parse_scenario(std::string_view text) {
  ScenarioSpec spec;
  std::optional<int> ego_line, ped_line, route_line;
  int line_no = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++line_no;
    auto toks = detail::tokenize_line(raw, line_no);
    if (toks.empty()) continue;
    if (toks.front().kind != detail::TokKind::ident) {
      throw ParseError("expected a declaration keyword", line_no, toks.front().column);
    }
    auto head = toks.front().text;
    int head_col = toks.front().column;
    detail::LineParser p(std::move(toks), line_no, static_cast<int>(raw.size()));
    if (head == "param") {
      p.keyword("param");
      const auto& ident = p.expect(detail::TokKind::ident, "parameter name");
      std::string name(ident.text);
      auto unit = canonical_param_unit(name);
      if (!unit) throw ParseError("unknown identifier '" + name + "'", line_no, ident.column);
      if (spec.find_param(name)) throw ParseError("duplicate parameter '" + name + "'", line_no, ident.column);
      p.expect(detail::TokKind::equals, "'='");
      Distribution dist;
      if (p.peek(detail::TokKind::number)) {
        dist = Distribution::constant(p.number());
      } else {
        int dist_col = p.column();
        p.keyword("Uniform");
        p.expect(detail::TokKind::lparen, "'('");
        double lo = p.number();
        p.expect(detail::TokKind::comma, "','");
        double hi = p.number();
        p.expect(detail::TokKind::rparen, "')'");
        if (lo > hi) throw ParseError("lower bound exceeds upper bound", line_no, dist_col);
        dist = Distribution::uniform(lo, hi);
      }
      p.finish();
      spec.params.push_back({std::move(name), dist, *unit});
    } else if (head == "ego") {
      if (ego_line) throw ParseError("duplicate ego declaration", line_no, head_col);
      p.keyword("ego");
      p.keyword("at");
      spec.ego_pose.x = p.number();
      spec.ego_pose.y = p.number();
      p.keyword("heading");
      spec.ego_pose.heading = p.number();
      p.finish();
      ego_line = line_no;
    } else if (head == "pedestrian") {
      if (ped_line) throw ParseError("duplicate pedestrian declaration", line_no, head_col);
      p.keyword("pedestrian");
      p.keyword("at");
      spec.ped_pose.x = p.number();
      spec.ped_pose.y = p.number();
      p.keyword("heading");
      spec.ped_pose.heading = p.number();
      p.keyword("speed");
      int speed_col = p.column();
      spec.ped_speed = p.number();
      if (!(spec.ped_speed > 0.0)) throw ParseError("pedestrian speed must be positive", line_no, speed_col);
      p.finish();
      ped_line = line_no;
    } else if (head == "route") {
      if (route_line) throw ParseError("duplicate route declaration", line_no, head_col);
      p.keyword("route");
      double x = p.number();
      double y = p.number();
      spec.route.push_back({x, y});
      while (p.peek(detail::TokKind::arrow)) {
        p.expect(detail::TokKind::arrow, "'->'");
        x = p.number();
        y = p.number();
        spec.route.push_back({x, y});
      }
      p.finish();
      if (spec.route.size() < 2) throw ParseError("route needs at least two waypoints", line_no, head_col);
      for (size_t i = 1; i < spec.route.size(); ++i) {
        if (spec.route[i] == spec.route[i - 1]) {
          throw ParseError("route has repeated consecutive waypoints", line_no, head_col);
        }
      }
      route_line = line_no;
    } else {
      throw ParseError("unknown identifier '" + std::string(head) + "'", line_no, head_col);
    }
  }
  int eof_line = line_no + 1;
  if (!ego_line) throw ParseError("missing ego declaration", eof_line, 1);
  if (!ped_line) throw ParseError("missing pedestrian declaration", eof_line, 1);
  if (!route_line) throw ParseError("missing route declaration", eof_line, 1);
  return spec;
}

/// Canonical text form; parse_scenario(to_text(s)) == s.
inline std::string to_text(const ScenarioSpec& spec) {
  using detail::shortest;
  std::string out;
  out += "ego at " + shortest(spec.ego_pose.x) + " " + shortest(spec.ego_pose.y) + " heading " +
         shortest(spec.ego_pose.heading) + "\n";
  out += "pedestrian at " + shortest(spec.ped_pose.x) + " " + shortest(spec.ped_pose.y) + " heading " +
         shortest(spec.ped_pose.heading) + " speed " + shortest(spec.ped_speed) + "\n";
  out += "route";
  for (size_t i = 0; i < spec.route.size(); ++i) {
    if (i > 0) out += " ->";
    out += " " + shortest(spec.route[i].x) + " " + shortest(spec.route[i].y);
  }
  out += "\n";
  for (const auto& p : spec.params) {
    out += "param " + p.name + " = ";
    if (p.dist.kind == DistributionKind::uniform) {
      out += "Uniform(" + shortest(p.dist.lo) + ", " + shortest(p.dist.hi) + ")";
    } else {
      out += shortest(p.dist.lo);
    }
    out += "\n";
  }
  return out;
}

}  // namespace scenfalsify
