#include "feedersim/engine.hpp"
#include "feedersim/errors.hpp"

#include "support.hpp"

using namespace feedersim;
using test::bit_equal;
using test::hourly_sim;

namespace {

HouseSpec always_on_house(std::uint64_t id, double kw)
{
  HouseSpec h;
  h.house_id = id;
  auto sched = std::make_shared<const ProbabilitySchedule>(ProbabilitySchedule{{1.0}, true});
  h.non_tcas.push_back({kw, sched, 0});
  return h;
}

} // namespace

TEST(PriceOffset, Cases)
{
  PriceResponseConfig c{50.0, 2.0, 3.0};
  EXPECT_EQ(price_offset(c, 50.0), 0.0);
  EXPECT_EQ(price_offset(c, 100.0), 2.0);
  EXPECT_EQ(price_offset(c, 1000.0), 3.0);
  EXPECT_EQ(price_offset(c, 0.0), -2.0);
  EXPECT_EQ(price_offset({50.0, 0.0, 3.0}, 123.0), 0.0);
  EXPECT_THROW(price_offset({0.0, 1.0, 1.0}, 1.0), ConfigError);
  EXPECT_THROW(price_offset(c, -1.0), std::invalid_argument);
}

TEST(SimulationConfig, StepsMustDivideHorizon)
{
  auto sim = hourly_sim();
  EXPECT_EQ(sim.steps(), 100u);
  sim.step_hours = 0.5;
  EXPECT_EQ(sim.steps(), 200u);
  EXPECT_EQ(sim.input_hour(3), 1u);
  sim.step_hours = 0.3;
  EXPECT_THROW(sim.steps(), ConfigError);
}

TEST(SimulationConfig, ShortTapeRejected)
{
  auto sim = hourly_sim(50);
  sim.horizon_hours = 100;
  EXPECT_THROW(sim.validate(), ConfigError);
}

TEST(SimulateHouseStep, EmptyHouse)
{
  HouseSpec h;
  HouseState s = HouseState::initial(h);
  EXPECT_EQ(simulate_house_step(h, s, StepInputs{}), 0.0);
}

TEST(SimulateHouseStep, CertainNonTca)
{
  auto h = always_on_house(0, 2.0);
  HouseState s = HouseState::initial(h);
  for (std::size_t step = 0; step < 10; ++step)
    EXPECT_EQ(simulate_house_step(h, s, StepInputs{step, double(step), 1.0, 0.0, 0.0}), 2.0);
}

TEST(SimulateHouseStep, SingleTcaEqualsTcaStep)
{
  HouseSpec h;
  TcaSpec t;
  t.params = {4, 0.5, 5, 1, ThermalMode::heating};
  t.thermostat = {SetpointSchedule(20.0), 2.0};
  t.initial = {19.5, true};
  h.tcas.push_back(t);
  HouseState s = HouseState::initial(h);
  StepInputs in{0, 0.0, 1.0, 4.0, 0.0};
  auto expect = tca_step(t.initial, t.params, t.thermostat, 4.0, 0.0, 1.0);
  EXPECT_EQ(simulate_house_step(h, s, in), expect.mean_power);
  EXPECT_EQ(s.tcas[0].temperature, expect.state.temperature);
}

TEST(SimulateFeeder, NoHousesGivesZeros)
{
  FeederSpec f;
  auto r = simulate_feeder(f, hourly_sim());
  ASSERT_EQ(r.feeder.values.size(), 100u);
  for (double v : r.feeder.values)
    EXPECT_EQ(v, 0.0);
}

TEST(SimulateFeeder, TwoConstantHouses)
{
  FeederSpec f;
  f.houses = {always_on_house(0, 2.0), always_on_house(1, 2.0)};
  for (double v : simulate_feeder(f, hourly_sim()).feeder.values)
    EXPECT_EQ(v, 4.0);
}

TEST(SimulateFeeder, EqualsExternallySummedHouses)
{
  const auto sim = hourly_sim();
  auto feeder = generate_feeder(PopulationConfig::defaults(42), 0, 1000);
  auto result = simulate_feeder(feeder, sim, true);

  std::vector<HouseState> states;
  for (const auto& h : feeder.houses)
    states.push_back(HouseState::initial(h));
  std::vector<double> oracle(sim.steps());
  for (std::size_t s = 0; s < sim.steps(); ++s) {
    auto in = make_step_inputs(sim, feeder, s, sim.price_at(feeder.price_id, s));
    double total = 0.0;
    for (std::size_t i = 0; i < feeder.houses.size(); ++i)
      total += simulate_house_step(feeder.houses[i], states[i], in);
    oracle[s] = total;
  }
  EXPECT_TRUE(bit_equal(result.feeder.values, oracle));

  ASSERT_EQ(result.houses.size(), 1000u);
  for (std::size_t s = 0; s < sim.steps(); ++s) {
    double total = 0.0;
    for (const auto& h : result.houses)
      total += h.values[s];
    ASSERT_EQ(total, result.feeder.values[s]);
  }
}

TEST(SimulateFeeder, SumsInAscendingIdOrder)
{
  // houses stored out of id order: the reduction still follows ids
  auto feeder = generate_feeder(PopulationConfig::defaults(3), 0, 50);
  auto shuffled = feeder;
  std::reverse(shuffled.houses.begin(), shuffled.houses.end());
  const auto sim = hourly_sim();
  EXPECT_TRUE(bit_equal(simulate_feeder(feeder, sim).feeder.values,
                        simulate_feeder(shuffled, sim).feeder.values));
}

TEST(SimulateFeeder, DuplicateHouseIdsRejected)
{
  FeederSpec f;
  f.houses = {always_on_house(1, 1.0), always_on_house(1, 1.0)};
  EXPECT_ANY_THROW(simulate_feeder(f, hourly_sim()));
}

TEST(SimulateFeeder, NonNegativeAndDeterministic)
{
  auto feeder = generate_feeder(PopulationConfig::defaults(8), 0, 300);
  const auto sim = hourly_sim();
  auto a = simulate_feeder(feeder, sim).feeder.values;
  auto b = simulate_feeder(feeder, sim).feeder.values;
  EXPECT_TRUE(bit_equal(a, b));
  for (double v : a)
    EXPECT_GE(v, 0.0);
}

TEST(SimulateFeeder, PriceSpikeDoesNotRaiseLoad)
{
  auto sim = hourly_sim(100, 0);
  sim.price_response = PriceResponseConfig{40.0, 2.0, 3.0};
  auto feeder = generate_feeder(PopulationConfig::defaults(21), 0, 500);
  auto base = simulate_feeder(feeder, sim).feeder.values;
  for (std::size_t spike : {5u, 30u, 77u}) {
    auto spiked_sim = sim;
    spiked_sim.prices[default_input_id].price[spike] = 200.0;
    auto spiked = simulate_feeder(feeder, spiked_sim).feeder.values;
    EXPECT_LE(spiked[spike], base[spike]) << "spike at " << spike;
    for (std::size_t s = 0; s < spike; ++s)
      ASSERT_EQ(spiked[s], base[s]);
  }
}

TEST(SimulateFeeder, PerFeederWeather)
{
  auto sim = hourly_sim();
  sim.weather["cold"] = WeatherTape{std::vector<double>(100, -15.0)};
  auto feeder = generate_feeder(PopulationConfig::defaults(2), 0, 100);
  auto cold = feeder;
  cold.weather_id = "cold";
  auto warm_load = simulate_feeder(feeder, sim).feeder.values;
  auto cold_load = simulate_feeder(cold, sim).feeder.values;
  double warm_total = 0, cold_total = 0;
  for (std::size_t s = 0; s < 100; ++s) {
    warm_total += warm_load[s];
    cold_total += cold_load[s];
  }
  EXPECT_GT(cold_total, warm_total);
  cold.weather_id = "missing";
  EXPECT_ANY_THROW(simulate_feeder(cold, sim));
}

TEST(SumFeeders, AscendingFeederIdOrder)
{
  LoadSeries a{LoadRole::feeder_head, 2, {1e16, 1.0}};
  LoadSeries b{LoadRole::feeder_head, 0, {1.0, 1e16}};
  LoadSeries c{LoadRole::feeder_head, 1, {-1e16, -1e16}};
  auto sum = sum_feeders(std::vector<LoadSeries>{a, b, c});
  // ((b + c) + a) per step
  EXPECT_EQ(sum.values[0], (1.0 + -1e16) + 1e16);
  EXPECT_EQ(sum.values[1], (1e16 + -1e16) + 1.0);
}
