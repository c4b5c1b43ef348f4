#pragma once

// Trace, event, and reduced-path CSV formats.

#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "scenfalsify/conformance.hpp"
#include "scenfalsify/detail/text.hpp"
#include "scenfalsify/error.hpp"
#include "scenfalsify/sim_world.hpp"

namespace scenfalsify {

inline constexpr std::string_view kTraceHeader =
    "t,av_x,av_y,av_heading,av_speed,ped_x,ped_y,ped_speed,ped_phase,detected,dist";
inline constexpr std::string_view kEventsHeader = "t,subsystem,description";
inline constexpr std::string_view kPathHeader = "t,x,y";

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  using detail::fixed;
  os << kTraceHeader << '\n';
  for (const auto& s : trace.states) {
    os << fixed(s.t) << ',' << fixed(s.av.x) << ',' << fixed(s.av.y) << ',' << fixed(s.av.heading) << ','
       << fixed(s.av.speed) << ',' << fixed(s.ped.x) << ',' << fixed(s.ped.y) << ',' << fixed(s.ped.speed) << ','
       << to_string(s.ped_phase) << ',' << (s.detected ? 1 : 0) << ',' << fixed(s.dist) << '\n';
  }
}

inline void write_events_csv(std::ostream& os, const Trace& trace) {
  os << kEventsHeader << '\n';
  for (const auto& e : trace.events) os << detail::fixed(e.t) << ',' << e.subsystem << ',' << e.description << '\n';
}

namespace detail {

inline std::vector<std::vector<std::string>> read_rows(std::istream& is, std::string_view header,
                                                       const std::string& what) {
  std::string line;
  if (!std::getline(is, line)) throw Error(what + ": empty input");
  if (trim(line) != header) {
    throw Error(what + ": unexpected header '" + std::string(trim(line)) + "' (expected '" + std::string(header) +
                "')");
  }
  std::size_t ncol = split(header, ',').size();
  std::vector<std::vector<std::string>> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    auto body = trim(line);
    if (body.empty()) continue;
    auto fields = split(body, ',');
    if (fields.size() != ncol) {
      throw Error(what + ": line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                  " fields, expected " + std::to_string(ncol));
    }
    std::vector<std::string> row;
    for (auto f : fields) row.emplace_back(trim(f));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double field_number(const std::string& text, const std::string& what) {
  auto v = parse_double(text);
  if (!v) throw Error(what + ": malformed number '" + text + "'");
  return *v;
}

}  // namespace detail

/// Reads a trace written by write_trace_csv. dt is taken from the first two
/// timestamps (a one-row trace gets the default).
inline Trace read_trace_csv(std::istream& is) {
  const std::string what = "trace csv";
  Trace trace;
  for (const auto& r : detail::read_rows(is, kTraceHeader, what)) {
    WorldState s;
    s.t = detail::field_number(r[0], what);
    s.av = {detail::field_number(r[1], what), detail::field_number(r[2], what), detail::field_number(r[3], what),
            detail::field_number(r[4], what)};
    s.ped = {detail::field_number(r[5], what), detail::field_number(r[6], what), 0.0, detail::field_number(r[7], what)};
    s.ped_phase = parse_ped_phase(r[8]);
    if (r[9] != "0" && r[9] != "1") throw Error(what + ": detected must be 0 or 1");
    s.detected = r[9] == "1";
    s.dist = detail::field_number(r[10], what);
    trace.states.push_back(s);
  }
  if (trace.states.empty()) throw Error(what + ": no rows");
  if (trace.states.size() > 1) trace.dt = trace.states[1].t - trace.states[0].t;
  return trace;
}

inline std::vector<Event> read_events_csv(std::istream& is) {
  const std::string what = "events csv";
  std::vector<Event> out;
  for (const auto& r : detail::read_rows(is, kEventsHeader, what)) {
    out.push_back({detail::field_number(r[0], what), r[1], r[2]});
  }
  return out;
}

inline void write_path_csv(std::ostream& os, const TimedPath& path) {
  os << kPathHeader << '\n';
  for (const auto& s : path.samples()) {
    os << detail::fixed(s.t) << ',' << detail::fixed(s.pos.x) << ',' << detail::fixed(s.pos.y) << '\n';
  }
}

/// Ego path from either the full trace format or the reduced `t,x,y` format,
/// chosen by the header line.
inline TimedPath read_path_csv(std::istream& is) {
  std::string first;
  if (!std::getline(is, first)) throw Error("path csv: empty input");
  std::string body(std::istreambuf_iterator<char>(is), {});
  std::istringstream rest(first + '\n' + body);
  if (detail::trim(first) == kTraceHeader) return ego_path(read_trace_csv(rest));
  const std::string what = "path csv";
  std::vector<TimedPath::Sample> samples;
  for (const auto& r : detail::read_rows(rest, kPathHeader, what)) {
    samples.push_back({detail::field_number(r[0], what),
                       {detail::field_number(r[1], what), detail::field_number(r[2], what)}});
  }
  return TimedPath(std::move(samples));
}

}  // namespace scenfalsify
