// Calibration sweep for the surrogate stack defaults.
//
// For every combination of the swept StackConfig thresholds this runs the
// two reference failure points, a uniform campaign of --samples cases and,
// with --grid, the full parameter grid at --step spacing (cell centers).
// One CSV row per combination goes to stdout.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scenfalsify/sampling.hpp"
#include "scenfalsify/scenario.hpp"
#include "scenfalsify/sim_world.hpp"

namespace sf = scenfalsify;

namespace {

struct Tally {
  int cases = 0;
  int violations = 0;
  int collisions = 0;
  double fraction() const { return cases ? static_cast<double>(violations) / cases : 0.0; }
};

void count(Tally& t, const sf::Trace& tr) {
  ++t.cases;
  if (sf::min_distance(tr) <= 2.5) ++t.violations;
  if (tr.collision) ++t.collisions;
}

std::vector<double> axis_values(const std::vector<double>& given, double fallback) {
  return given.empty() ? std::vector<double>{fallback} : given;
}

// Parameter vector in scenario declaration order from named values.
sf::ParamVector named_point(const sf::ScenarioSpec& spec, double th, double dw, double ts) {
  sf::ParamVector pv;
  for (const auto& p : spec.params) {
    if (p.name == sf::params::t_hesitate) pv.values.push_back(th);
    else if (p.name == sf::params::d_walk) pv.values.push_back(dw);
    else if (p.name == sf::params::t_start) pv.values.push_back(ts);
    else pv.values.push_back(p.dist.lo);
  }
  pv.case_id = 1;
  return pv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sweep surrogate stack thresholds against the reference scenario"};
  std::string scenario_path = "scenarios/right_turn_hesitating_pedestrian.scn";
  std::uint64_t seed = 0;
  int samples = 1294;
  bool grid = false;
  double step = 0.25;
  std::vector<double> corridor, inch, resume, standoff, yield;
  app.add_option("--scenario", scenario_path);
  app.add_option("--seed", seed);
  app.add_option("--samples", samples);
  app.add_flag("--grid", grid);
  app.add_option("--step", step);
  app.add_option("--corridor", corridor)->delimiter(',');
  app.add_option("--inch", inch)->delimiter(',');
  app.add_option("--resume-gap", resume)->delimiter(',');
  app.add_option("--standoff", standoff)->delimiter(',');
  app.add_option("--yield-distance", yield)->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(scenario_path);
  if (!in) {
    std::cerr << "cannot open " << scenario_path << "\n";
    return 1;
  }
  std::stringstream text;
  text << in.rdbuf();
  const auto spec = sf::parse_scenario(text.str());
  const sf::Scene scene(spec, {});
  const auto space = sf::sample_space(spec);

  const sf::StackConfig base;
  std::printf("corridor,inch,resume_gap,standoff,yield_distance,f1_min,f2_min,uniform_frac,uniform_coll,grid_frac\n");
  for (double wc : axis_values(corridor, base.corridor_half_width))
    for (double vi : axis_values(inch, base.inch_speed))
      for (double rg : axis_values(resume, base.resume_gap))
        for (double so : axis_values(standoff, base.stop_standoff))
          for (double yd : axis_values(yield, base.yield_distance)) {
            sf::StackConfig cfg;
            cfg.corridor_half_width = wc;
            cfg.inch_speed = vi;
            cfg.resume_gap = rg;
            cfg.stop_standoff = so;
            cfg.yield_distance = yd;

            double f1 = sf::min_distance(sf::simulate(scene, named_point(spec, 2.67, 4.50, 10.54), cfg));
            double f2 = sf::min_distance(sf::simulate(scene, named_point(spec, 2.93, 4.24, 11.53), cfg));

            Tally uni;
            sf::SamplerConfig sc{sf::SamplerStrategy::uniform_random, seed, samples};
            for (const auto& pv : sf::sample(space, sc)) count(uni, sf::simulate(scene, pv, cfg));

            Tally g;
            if (grid) {
              std::vector<std::vector<double>> levels;
              for (const auto& a : space) {
                std::vector<double> vals;
                for (double v = a.lo + step / 2; v < a.hi; v += step) vals.push_back(v);
                if (vals.empty()) vals.push_back(a.lo);
                levels.push_back(vals);
              }
              std::vector<std::size_t> idx(levels.size(), 0);
              while (true) {
                sf::ParamVector pv;
                pv.case_id = 1;
                for (std::size_t d = 0; d < levels.size(); ++d) pv.values.push_back(levels[d][idx[d]]);
                count(g, sf::simulate(scene, pv, cfg));
                std::size_t d = 0;
                while (d < idx.size() && ++idx[d] == levels[d].size()) idx[d++] = 0;
                if (d == idx.size()) break;
              }
            }
            std::printf("%g,%g,%g,%g,%g,%.3f,%.3f,%.4f,%d,%s\n", wc, vi, rg, so, yd, f1, f2, uni.fraction(),
                        uni.collisions, grid ? std::to_string(g.fraction()).c_str() : "");
            std::fflush(stdout);
          }
  return 0;
}
