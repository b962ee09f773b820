#pragma once

#include "feedersim/engine.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace feedersim {

struct HouseRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const HouseRange&, const HouseRange&) = default;
};

/// Contiguous blocks, one per worker; the first n % W blocks hold one extra house.
struct Partition {
  std::vector<HouseRange> ranges;

  std::vector<std::size_t> sizes() const;
};

Partition partition_houses(std::size_t n_houses, std::size_t n_workers);

struct SharedRunResult {
  std::vector<FeederResult> feeders; // same order as the input feeders
  std::size_t barrier_count = 0;
};

/// Houses of all `feeders` split evenly over `n_workers` long-lived threads.
/// Each step every worker advances its block, all meet at a barrier, and the
/// step's feeder totals are reduced on one thread in ascending house-id order.
/// Output is bit-identical to simulate_feeder for every worker count.
SharedRunResult run_shared(std::span<const FeederSpec> feeders, const SimulationConfig& sim,
                           std::size_t n_workers, bool per_house = false);

} // namespace feedersim
