#include "feedersim/errors.hpp"
#include "feedersim/run_config.hpp"

#include "support.hpp"

using namespace feedersim;

namespace {

const std::filesystem::path data_dir = FEEDERSIM_TEST_DATA;

} // namespace

TEST(RunConfig, MinimalFillsDefaults)
{
  auto cfg = load_run_config(data_dir / "minimal.json");
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.sim.horizon_hours, 100.0);
  EXPECT_EQ(cfg.sim.step_hours, 1.0);
  EXPECT_EQ(cfg.executor.mode, ExecMode::seq);
  EXPECT_EQ(cfg.executor.workers, 1u);
  EXPECT_EQ(cfg.feeder_count(), 1u);
  EXPECT_EQ(cfg.executor.report_timeout, std::chrono::milliseconds(60'000));
  EXPECT_EQ(cfg.houses_per_feeder, 10u);
  EXPECT_FALSE(cfg.sim.price_response.has_value());
  EXPECT_EQ(cfg.output_dir, data_dir / "results");
  EXPECT_EQ(cfg.sim.price_change_steps(default_input_id), (std::vector<std::size_t>{10, 20, 30}));
  EXPECT_EQ(cfg.population.tcas.size(), PopulationConfig::defaults(42).tcas.size());
}

TEST(RunConfig, UnknownKeyNamed)
{
  try {
    load_run_config(data_dir / "bad_configs" / "unknown_key.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("horzon"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, NestedKeyPath)
{
  try {
    load_run_config(data_dir / "bad_configs" / "unknown_appliance_key.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("population.tca.hvac.resistence"), std::string::npos) << e.what();
  }
}

TEST(RunConfig, MpNeedsFeederCount)
{
  EXPECT_THROW(load_run_config(data_dir / "bad_configs" / "mp_without_feeders.json"), ConfigError);
}

TEST(RunConfig, EveryMalformedFixtureRejected)
{
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir / "bad_configs")) {
    ++n;
    EXPECT_THROW(load_run_config(entry.path()), ConfigError) << entry.path();
  }
  EXPECT_GE(n, 25u);
}

TEST(RunConfig, FullConfig)
{
  const std::string text = R"({
    "seed": 7, "horizon_hours": 48, "step_hours": 0.5,
    "weather": {"hourly": [)" + [] {
    std::string s;
    for (int i = 0; i < 48; ++i)
      s += (i ? "," : "") + std::to_string(i % 10);
    return s;
  }() + R"(]},
    "prices": "prices_3changes.csv",
    "population": {"houses_per_feeder": 25,
                   "tca": {"hvac": {"rated_power": 11, "setback": [0, 0], "count": [1, 2]}},
                   "non_tca": {"lighting": {"count": 2, "profile": [0.5]}}},
    "executor": {"mode": "mp", "feeders": 3, "transport": "process", "schedule": {"every": 12},
                 "timeout_s": 2.5},
    "price_response": {"reference_price": 40, "slope": 1.5, "max_offset": 2},
    "feeder_inputs": [{"feeder_id": 2, "prices": {"hourly": [)" + [] {
    std::string s;
    for (int i = 0; i < 48; ++i)
      s += (i ? "," : "") + std::string(i < 24 ? "40" : "90");
    return s;
  }() + R"(]}}],
    "output": {"dir": "/tmp/feedersim_out", "per_house": false}
  })";
  auto cfg = parse_run_config(text, data_dir);
  EXPECT_EQ(cfg.sim.steps(), 96u);
  EXPECT_EQ(cfg.executor.transport, TransportKind::process);
  EXPECT_EQ(cfg.executor.report_timeout, std::chrono::milliseconds(2500));
  EXPECT_EQ(cfg.executor.schedule.resolve(96).collection_points.size(), 8u);
  EXPECT_EQ(cfg.population.tcas[0].rated_power.low, 11.0);
  EXPECT_EQ(cfg.population.tcas[0].count.max, 2u);
  EXPECT_EQ(cfg.population.non_tcas.back().count.min, 2u);
  ASSERT_TRUE(cfg.feeder_inputs.count(2));
  EXPECT_EQ(cfg.sim.price_change_steps(*cfg.feeder_inputs.at(2).price_id), (std::vector<std::size_t>{48}));
  EXPECT_EQ(cfg.output_dir, "/tmp/feedersim_out");
}

TEST(RunConfig, ScaffoldParses)
{
  auto cfg = parse_run_config(scaffold_config(100, 4, 9), ".");
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.feeder_count(), 4u);
  EXPECT_EQ(cfg.executor.mode, ExecMode::mp);
  EXPECT_EQ(cfg.houses_per_feeder, 100u);
  EXPECT_EQ(cfg.sim.price_change_steps(default_input_id).size(), 3u);
}

TEST(SyntheticInputs, PriceChangeCount)
{
  for (std::size_t n : {0u, 1u, 3u, 10u})
    EXPECT_EQ(test::hourly_sim(100, n).price_change_steps(default_input_id).size(), n);
}

TEST(ExecMode, Parse)
{
  EXPECT_EQ(parse_exec_mode("shared"), ExecMode::shared);
  EXPECT_THROW(parse_exec_mode("SEQ"), ConfigError);
}
