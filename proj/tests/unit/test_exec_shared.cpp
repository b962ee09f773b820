#include "feedersim/errors.hpp"
#include "feedersim/exec_shared.hpp"

#include "support.hpp"

using namespace feedersim;
using test::bit_equal;
using test::hourly_sim;

TEST(Partition, Balanced)
{
  EXPECT_EQ(partition_houses(10, 4).sizes(), (std::vector<std::size_t>{3, 3, 2, 2}));
  EXPECT_EQ(partition_houses(1000, 1).sizes(), (std::vector<std::size_t>{1000}));
  EXPECT_EQ(partition_houses(3, 5).sizes(), (std::vector<std::size_t>{1, 1, 1, 0, 0}));
  EXPECT_THROW(partition_houses(10, 0), std::invalid_argument);
}

TEST(Partition, DisjointCover)
{
  for (std::size_t n : {0u, 1u, 7u, 100u, 1001u})
    for (std::size_t w : {1u, 2u, 3u, 8u, 13u}) {
      auto p = partition_houses(n, w);
      ASSERT_EQ(p.ranges.size(), w);
      std::size_t next = 0, lo = n, hi = 0;
      for (const auto& r : p.ranges) {
        ASSERT_EQ(r.begin, next);
        next = r.end;
        lo = std::min(lo, r.size());
        hi = std::max(hi, r.size());
      }
      EXPECT_EQ(next, n);
      EXPECT_LE(hi - lo, 1u);
    }
}

TEST(RunShared, MatchesSequential)
{
  const auto sim = hourly_sim();
  auto feeder = generate_feeder(PopulationConfig::defaults(42), 0, 1000);
  auto oracle = simulate_feeder(feeder, sim).feeder.values;
  for (std::size_t w : {1u, 2u, 3u, 4u, 8u}) {
    auto r = run_shared(std::span(&feeder, 1), sim, w);
    ASSERT_EQ(r.feeders.size(), 1u);
    EXPECT_TRUE(bit_equal(r.feeders[0].feeder.values, oracle)) << "workers " << w;
    EXPECT_EQ(r.barrier_count, sim.steps());
  }
}

TEST(RunShared, SeveralFeedersAndPerHouse)
{
  const auto sim = hourly_sim();
  auto pop = PopulationConfig::defaults(4);
  std::vector<FeederSpec> feeders = {generate_feeder(pop, 2, 37), generate_feeder(pop, 0, 5),
                                     generate_feeder(pop, 1, 0)};
  auto r = run_shared(feeders, sim, 4, true);
  ASSERT_EQ(r.feeders.size(), 3u);
  for (std::size_t k = 0; k < feeders.size(); ++k) {
    auto oracle = simulate_feeder(feeders[k], sim, true);
    EXPECT_EQ(r.feeders[k].feeder.id, feeders[k].feeder_id);
    EXPECT_TRUE(bit_equal(r.feeders[k].feeder.values, oracle.feeder.values));
    ASSERT_EQ(r.feeders[k].houses.size(), oracle.houses.size());
    for (std::size_t h = 0; h < oracle.houses.size(); ++h)
      EXPECT_TRUE(bit_equal(r.feeders[k].houses[h].values, oracle.houses[h].values));
  }
}

TEST(RunShared, WorkerCountsAgree)
{
  const auto sim = hourly_sim();
  auto feeder = generate_feeder(PopulationConfig::defaults(7), 0, 400);
  auto a = run_shared(std::span(&feeder, 1), sim, 8);
  auto b = run_shared(std::span(&feeder, 1), sim, 3);
  EXPECT_TRUE(bit_equal(a.feeders[0].feeder.values, b.feeders[0].feeder.values));
}

TEST(RunShared, MoreWorkersThanHouses)
{
  const auto sim = hourly_sim(10);
  auto feeder = generate_feeder(PopulationConfig::defaults(7), 0, 3);
  auto r = run_shared(std::span(&feeder, 1), sim, 6);
  EXPECT_TRUE(bit_equal(r.feeders[0].feeder.values, simulate_feeder(feeder, sim).feeder.values));
}

TEST(RunShared, ZeroWorkersRejected)
{
  auto feeder = generate_feeder(PopulationConfig::defaults(7), 0, 3);
  EXPECT_ANY_THROW(run_shared(std::span(&feeder, 1), hourly_sim(10), 0));
}

TEST(RunShared, WorkerFailureAborts)
{
  auto sim = hourly_sim(10);
  auto feeder = generate_feeder(PopulationConfig::defaults(7), 0, 20);
  // a non-periodic probability schedule too short for the horizon fails mid-run
  auto shortened = std::make_shared<const ProbabilitySchedule>(ProbabilitySchedule{{0.5, 0.5, 0.5}, false});
  feeder.houses[15].non_tcas[0].schedule = shortened;
  try {
    run_shared(std::span(&feeder, 1), sim, 4);
    FAIL() << "expected an abort";
  } catch (const ExecutionError& e) {
    EXPECT_NE(std::string(e.what()).find("worker"), std::string::npos) << e.what();
  }
}
