#include "feedersim/bench.hpp"
#include "feedersim/errors.hpp"
#include "feedersim/run_config.hpp"

#include "support.hpp"

#include <sstream>
#include <thread>

using namespace feedersim;
using test::TempDir;

namespace {

ExperimentConfig small(ExperimentKind kind, std::vector<std::size_t> houses, std::vector<std::size_t> workers)
{
  ExperimentConfig c;
  c.kind = kind;
  c.mode = kind == ExperimentKind::linear_growth ? ExecMode::seq : ExecMode::mp;
  c.houses = std::move(houses);
  c.workers = std::move(workers);
  c.repetitions = 1;
  c.horizon_hours = 24;
  return c;
}

BenchRow row(std::string notes)
{
  BenchRow r;
  r.experiment = "granularity";
  r.notes = std::move(notes);
  return r;
}

} // namespace

TEST(LogLogSlope, ExactPowerLaw)
{
  std::vector<double> x = {1e3, 2e3, 4e3, 8e3}, y;
  for (double v : x)
    y.push_back(3e-6 * std::pow(v, 1.1));
  EXPECT_NEAR(log_log_slope(x, y), 1.1, 1e-12);
  EXPECT_THROW(log_log_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
}

TEST(FindKnee, FastestTaggedRow)
{
  std::vector<BenchRow> rows = {row("schedule=end"), row("schedule=end"), row("schedule=every_step")};
  rows[0].workers = 1;
  rows[0].wall_s = 2.0;
  rows[1].workers = 4;
  rows[1].wall_s = 1.0;
  rows[2].workers = 8;
  rows[2].wall_s = 0.5;
  EXPECT_EQ(find_knee(rows, "schedule=end"), 4u);
  EXPECT_FALSE(find_knee({}, "schedule=end").has_value());
}

TEST(LinearGrowth, SingleSizeOneRow)
{
  auto r = run_linear_growth(small(ExperimentKind::linear_growth, {1000}, {}));
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_FALSE(r.growth_exponent.has_value());
  const auto& row = r.rows[0];
  EXPECT_EQ(row.mode, ExecMode::seq);
  EXPECT_EQ(row.houses_total, 1000u);
  EXPECT_GT(row.wall_s, 0.0);
  EXPECT_GE(row.cpu_s, 0.0);
  EXPECT_NE(row.output_hash, 0u);
}

TEST(LinearGrowth, ExponentReported)
{
  auto r = run_linear_growth(small(ExperimentKind::linear_growth, {200, 400}, {}));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(r.growth_exponent.has_value());
  EXPECT_NE(r.rows[0].notes.find("growth_exponent="), std::string::npos);
}

TEST(LinearGrowth, ZeroHousesRejected)
{
  EXPECT_THROW(run_linear_growth(small(ExperimentKind::linear_growth, {0}, {})), ConfigError);
}

TEST(FeederScaling, BaselineRatioAndMessages)
{
  auto r = run_feeder_scaling(small(ExperimentKind::feeder_scaling, {200}, {1, 2}));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.wall_ratios[0], (std::pair<std::size_t, double>{1, 1.0}));
  EXPECT_NE(r.rows[0].notes.find("ratio=1.000"), std::string::npos);
  // 1 report + 1 completion + 3 price changes per feeder
  EXPECT_NE(r.rows[0].notes.find("messages=5/5"), std::string::npos) << r.rows[0].notes;
  EXPECT_NE(r.rows[1].notes.find("messages=10/10"), std::string::npos) << r.rows[1].notes;
  EXPECT_EQ(r.rows[1].feeders, 2u);
  EXPECT_EQ(r.rows[1].houses_total, 400u);
}

TEST(FeederScaling, WarnsBeyondCores)
{
  const std::size_t k = std::thread::hardware_concurrency() + 1;
  auto r = run_feeder_scaling(small(ExperimentKind::feeder_scaling, {20}, {k}));
  EXPECT_NE(r.rows.back().notes.find("warning: K="), std::string::npos) << r.rows.back().notes;
}

TEST(Granularity, BaselineOnly)
{
  auto r = run_granularity_sweep(small(ExperimentKind::granularity, {500}, {1}));
  ASSERT_EQ(r.rows.size(), 2u); // end-only and every-step schedules
  EXPECT_EQ(r.knee_workers, 1u);
  EXPECT_NE(r.rows[0].notes.find("schedule=end"), std::string::npos);
  EXPECT_NE(r.rows[0].notes.find("knee"), std::string::npos);
  EXPECT_NE(r.rows[1].notes.find("schedule=every_step"), std::string::npos);
}

TEST(Granularity, SharedModeSweep)
{
  auto c = small(ExperimentKind::granularity, {300}, {1, 3});
  c.mode = ExecMode::shared;
  auto r = run_granularity_sweep(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].output_hash, r.rows[1].output_hash); // same single feeder
  EXPECT_TRUE(r.knee_workers.has_value());
}

TEST(Oversubscription, BaselineAndAnnotation)
{
  auto r = run_oversubscription(small(ExperimentKind::oversubscription, {400}, {1, 4}));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NE(r.rows[0].notes.find("baseline"), std::string::npos);
  EXPECT_NE(r.rows[1].notes.find("ratio="), std::string::npos);
}

TEST(Bench, OutputHashesDeterministic)
{
  auto c = small(ExperimentKind::granularity, {300}, {1, 2});
  auto a = run_granularity_sweep(c);
  auto b = run_granularity_sweep(c);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    EXPECT_EQ(a.rows[i].output_hash, b.rows[i].output_hash);
}

TEST(BenchSuite, Parse)
{
  auto suite = parse_bench_suite(R"({"seed": 3, "repetitions": 2, "experiments": [
    {"type": "linear_growth", "houses": [100, 200]},
    {"type": "granularity", "houses": [1000], "workers": [1, 2], "transport": "process"}]})");
  ASSERT_EQ(suite.experiments.size(), 2u);
  EXPECT_EQ(suite.experiments[0].mode, ExecMode::seq);
  EXPECT_EQ(suite.experiments[0].repetitions, 2u);
  EXPECT_EQ(suite.experiments[1].seed, 3u);
  EXPECT_EQ(suite.experiments[1].transport, TransportKind::process);
  EXPECT_TRUE(parse_bench_suite(R"({"experiments": []})").experiments.empty());
}

TEST(BenchSuite, Rejections)
{
  EXPECT_THROW(parse_bench_suite(R"({"experiments": [{"type": "linear_growth", "repetitions": 0}]})"),
               ConfigError);
  EXPECT_THROW(parse_bench_suite(R"({"experiments": [{"type": "linear_growth", "houses": [0]}]})"),
               ConfigError);
  EXPECT_THROW(parse_bench_suite(R"({"experiments": [{"type": "warp"}]})"), ConfigError);
  EXPECT_THROW(parse_bench_suite(R"({"experiments": [], "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_bench_suite(R"({"experiments": [{"type": "feeder_scaling", "mode": "seq"}]})"),
               ConfigError);
}

TEST(EmitReport, EmptyGivesHeaderOnlyCsv)
{
  TempDir dir("report_empty");
  auto files = emit_report({}, dir.path(), false);
  EXPECT_EQ(test::read_file(dir / "bench.csv"), std::string(bench_csv_header) + "\n");
  EXPECT_EQ(files.size(), 2u);
}

TEST(EmitReport, StableColumnsAndPlots)
{
  TempDir dir("report_rows");
  ExperimentReport rep;
  rep.kind = ExperimentKind::oversubscription;
  for (int i = 0; i < 3; ++i) {
    BenchRow r;
    r.experiment = "oversubscription";
    r.mode = ExecMode::mp;
    r.workers = i + 1;
    r.wall_s = 1.0 + i;
    r.cpu_s = 0.5;
    r.utilization = 0.5 / r.wall_s;
    r.output_hash = 0xabc;
    r.notes = i == 1 ? "a, quoted \"note\"" : "plain";
    rep.rows.push_back(r);
  }
  ExperimentReport growth;
  growth.kind = ExperimentKind::linear_growth;
  growth.rows.push_back(rep.rows[0]);
  growth.rows.back().experiment = "linear_growth";
  std::vector<ExperimentReport> reports = {rep, growth};
  emit_report(reports, dir.path(), true);

  auto csv = test::read_file(dir / "bench.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, bench_csv_header);
  std::getline(lines, line);
  EXPECT_EQ(line, "oversubscription,mp,1,1,0,0,0.5,1,0.5,0,0000000000000abc,plain");
  std::getline(lines, line);
  EXPECT_NE(line.find("\"a, quoted \"\"note\"\"\""), std::string::npos) << line;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_TRUE(std::filesystem::exists(dir / "oversubscription.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir / "linear_growth.svg"));
  EXPECT_FALSE(std::filesystem::exists(dir / "granularity.svg"));
  auto md = test::read_file(dir / "report.md");
  EXPECT_NE(md.find("paper (2004 hardware)"), std::string::npos);
}

TEST(EmitReport, UnwritablePath)
{
  EXPECT_ANY_THROW(emit_report({}, "/proc/feedersim_forbidden", false));
}

TEST(ShippedConfigs, Load)
{
  const std::filesystem::path dir = FEEDERSIM_CONFIG_DIR;
  auto suite = load_bench_suite(dir / "bench_suite.json");
  EXPECT_EQ(suite.experiments.size(), 4u);
  auto run = load_run_config(dir / "example_run.json");
  EXPECT_EQ(run.feeder_count(), 4u);
  EXPECT_EQ(run.sim.steps(), 100u);
}
