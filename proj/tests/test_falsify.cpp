#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "scenfalsify/falsify.hpp"

using namespace scenfalsify;

namespace {

std::string reference_text() {
  std::ifstream in(std::string(SCENFALSIFY_SCENARIO_DIR) + "/right_turn_hesitating_pedestrian.scn");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioSpec reference_spec() { return parse_scenario(reference_text()); }

CampaignConfig config(std::int64_t count, std::uint64_t seed = 0) {
  CampaignConfig cfg;
  cfg.sampler.count = count;
  cfg.sampler.seed = seed;
  return cfg;
}

const mtl::FormulaPtr& safety() {
  static const auto f = mtl::parse_formula("G (dist > 2.5)");
  return f;
}

std::string csv_of(const CampaignReport& rep) {
  std::stringstream ss;
  write_campaign_csv(ss, rep);
  return ss.str();
}

}  // namespace

TEST(Campaign, TablesPartitionTheCases) {
  auto rep = run_campaign(reference_spec(), safety(), config(300));
  EXPECT_EQ(rep.size(), 300u);
  for (const auto& c : rep.safe_table) EXPECT_GT(c.rho, 0.0);
  for (const auto& c : rep.error_table) EXPECT_LE(c.rho, 0.0);
  std::set<std::int64_t> ids;
  for (const auto& c : rep.cases()) ids.insert(c.case_id);
  EXPECT_EQ(ids.size(), 300u);
  EXPECT_EQ(*ids.begin(), 1);
  EXPECT_EQ(*ids.rbegin(), 300);
  EXPECT_EQ(rep.param_names, (std::vector<std::string>{"t_hesitate", "d_walk", "t_start"}));
}

TEST(Campaign, SafetyRobustnessIsMinDistanceMinusThreshold) {
  auto rep = run_campaign(reference_spec(), safety(), config(200, 5));
  for (const auto& c : rep.cases()) {
    ASSERT_EQ(c.status, CaseStatus::ok);
    EXPECT_EQ(c.rho, c.min_dist - 2.5);
  }
}

TEST(Campaign, ErrorCasesReplayWithTheSameRobustness) {
  auto cfg = config(1294);
  auto rep = run_campaign(reference_spec(), safety(), cfg);
  ASSERT_FALSE(rep.error_table.empty());
  Scene scene(reference_spec(), cfg.sim.world);
  for (const auto& c : rep.error_table) {
    ASSERT_TRUE(c.trace) << "error traces are retained by default";
    auto again = simulate(scene, c.params, cfg.stack, cfg.sim);
    EXPECT_EQ(mtl::robustness(*safety(), to_signal_table(again)), c.rho);
  }
  for (const auto& c : rep.safe_table) EXPECT_FALSE(c.trace);
}

TEST(Campaign, UnreachablePedestrianGivesEmptyErrorTable) {
  auto text = reference_text();
  auto pos = text.find("Uniform(7, 15)");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 14, "Uniform(30, 40)");
  auto rep = run_campaign(parse_scenario(text), safety(), config(200));
  EXPECT_TRUE(rep.error_table.empty());
  EXPECT_EQ(rep.safe_table.size(), 200u);
}

TEST(Campaign, ReportIndependentOfJobs) {
  auto one = config(250, 9);
  auto four = one;
  four.jobs = 4;
  EXPECT_EQ(csv_of(run_campaign(reference_spec(), safety(), one)),
            csv_of(run_campaign(reference_spec(), safety(), four)));
}

TEST(Campaign, MonitorFailuresBecomeErrors) {
  auto rep = run_campaign(reference_spec(), mtl::parse_formula("F[50,60] (dist > 0)"), config(5));
  ASSERT_EQ(rep.error_table.size(), 5u);
  for (const auto& c : rep.error_table) {
    EXPECT_EQ(c.status, CaseStatus::error);
    EXPECT_TRUE(std::isinf(c.rho) && c.rho < 0);
    EXPECT_NE(c.message.find("empty window"), std::string::npos) << c.message;
  }
  EXPECT_NE(csv_of(rep).find(",error\n"), std::string::npos);
}

TEST(Campaign, ShortHorizonIsFlagged) {
  auto cfg = config(10);
  cfg.sim.horizon = 5.0;
  auto rep = run_campaign(reference_spec(), safety(), cfg);
  for (const auto& c : rep.cases()) {
    EXPECT_EQ(c.status, CaseStatus::horizon_exhausted);
    EXPECT_FALSE(c.message.empty());
  }
}

TEST(Campaign, RetentionPolicies) {
  auto cfg = config(50);
  cfg.retention = TraceRetention::none;
  cfg.pinned_cases = {7};
  auto rep = run_campaign(reference_spec(), safety(), cfg);
  for (const auto& c : rep.cases()) EXPECT_EQ(c.trace.has_value(), c.case_id == 7);
  cfg.retention = TraceRetention::all;
  for (const auto& c : run_campaign(reference_spec(), safety(), cfg).cases()) EXPECT_TRUE(c.trace);
}

TEST(Scatter, ExportsRequestedAxes) {
  auto rep = run_campaign(reference_spec(), safety(), config(40));
  auto rows = scatter_export(rep, "t_start", "d_walk");
  ASSERT_EQ(rows.size(), 40u);
  auto cases = rep.cases();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].case_id, cases[i].case_id);
    EXPECT_EQ(rows[i].x, cases[i].params.values[2]);
    EXPECT_EQ(rows[i].y, cases[i].params.values[1]);
    EXPECT_EQ(rows[i].rho, cases[i].rho);
  }
  std::stringstream ss;
  write_scatter_csv(ss, "t_start", "d_walk", rows);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "t_start,d_walk,rho");
  try {
    scatter_export(rep, "t_start", "speed");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unknown parameter 'speed'"), std::string::npos) << e.what();
  }
}

TEST(CampaignCsv, HeaderFollowsDeclarationOrder) {
  EXPECT_EQ(campaign_header({"t_hesitate", "d_walk", "t_start"}),
            "case_id,t_hesitate,d_walk,t_start,rho,min_dist,min_ttc,collision,failure_tags,status");
}

TEST(CampaignCsv, RoundTripIsExact) {
  auto cfg = config(300);
  cfg.stack.dropout_prob = 0.3;
  auto rep = run_campaign(reference_spec(), safety(), cfg);
  auto text = csv_of(rep);
  std::istringstream in(text);
  auto back = read_campaign_csv(in);
  EXPECT_EQ(back.param_names, rep.param_names);
  EXPECT_EQ(back.error_table.size(), rep.error_table.size());
  EXPECT_EQ(csv_of(back), text);
  auto a = rep.cases(), b = back.cases();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].params.values, b[i].params.values);
    EXPECT_EQ(a[i].rho, b[i].rho);
    EXPECT_EQ(a[i].failure_tags, b[i].failure_tags);
  }
}

TEST(CampaignCsv, MalformedInputIsRejected) {
  const std::string header = "case_id,a,rho,min_dist,min_ttc,collision,failure_tags,status\n";
  for (const std::string body : {"1,0.5,1,3.5,,2,,ok\n", "0,0.5,1,3.5,,0,,ok\n", "1,0.5,1,3.5,,0,,ok\n1,0.5,1,3.5,,0,,ok\n",
                                 "1,0.5,1,3.5,,0,bogus,ok\n", "1,0.5,1,3.5,,0,,weird\n", "1,0.5,,3.5,,0,,ok\n",
                                 "1,0.5,1\n"}) {
    std::istringstream in(header + body);
    EXPECT_THROW(read_campaign_csv(in), Error) << body;
  }
  std::istringstream bad_header("id,a,rho\n");
  EXPECT_THROW(read_campaign_csv(bad_header), Error);
}

TEST(Tags, JoinAndParse) {
  std::set<FailureKind> tags{FailureKind::planning, FailureKind::perception};
  auto text = join_tags(tags);
  EXPECT_EQ(parse_tags(text), tags);
  EXPECT_TRUE(parse_tags("").empty());
}

TEST(Numbers, ShortestFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.27000000000000002), "-0.27");
  EXPECT_EQ(format_number(std::nan("")), "");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}
