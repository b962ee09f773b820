#include "feedersim/exec_shared.hpp"

#include "feedersim/errors.hpp"

#include <atomic>
#include <barrier>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace feedersim {

std::vector<std::size_t> Partition::sizes() const
{
  std::vector<std::size_t> out;
  out.reserve(ranges.size());
  for (const auto& r : ranges)
    out.push_back(r.size());
  return out;
}

Partition partition_houses(std::size_t n_houses, std::size_t n_workers)
{
  if (n_workers == 0)
    throw std::invalid_argument("partition_houses: need at least one worker");
  Partition p;
  p.ranges.reserve(n_workers);
  const std::size_t base = n_houses / n_workers;
  const std::size_t extra = n_houses % n_workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < n_workers; ++w) {
    std::size_t size = base + (w < extra ? 1 : 0);
    p.ranges.push_back({begin, begin + size});
    begin += size;
  }
  return p;
}

namespace {

struct Segment {
  std::size_t feeder;
  std::size_t begin;
  std::size_t end;
};

// Split a global house range at feeder boundaries.
std::vector<Segment> segments_for(HouseRange range, std::span<const std::size_t> feeder_offset)
{
  std::vector<Segment> out;
  for (std::size_t f = 0; f + 1 < feeder_offset.size(); ++f) {
    std::size_t lo = std::max(range.begin, feeder_offset[f]);
    std::size_t hi = std::min(range.end, feeder_offset[f + 1]);
    if (lo < hi)
      out.push_back({f, lo - feeder_offset[f], hi - feeder_offset[f]});
  }
  return out;
}

} // namespace

SharedRunResult run_shared(std::span<const FeederSpec> feeders, const SimulationConfig& sim,
                           std::size_t n_workers, bool per_house)
{
  if (n_workers == 0)
    throw ConfigError("shared mode needs at least one worker");
  for (const auto& f : feeders)
    sim.validate_for(f);
  const std::size_t n_steps = sim.steps();
  const std::size_t n_feeders = feeders.size();

  std::vector<std::unique_ptr<FeederEngine>> engines;
  std::vector<std::size_t> offset{0};
  for (const auto& f : feeders) {
    engines.push_back(std::make_unique<FeederEngine>(f));
    offset.push_back(offset.back() + f.houses.size());
  }

  std::vector<std::vector<double>> p_h(n_feeders);
  std::vector<StepInputs> inputs(n_feeders);
  SharedRunResult result;
  result.feeders.resize(n_feeders);
  std::vector<std::vector<std::vector<double>>> house_series(n_feeders);
  for (std::size_t f = 0; f < n_feeders; ++f) {
    p_h[f].assign(feeders[f].houses.size(), 0.0);
    result.feeders[f].feeder = {LoadRole::feeder_head, feeders[f].feeder_id,
                                std::vector<double>(n_steps, 0.0)};
    if (per_house)
      house_series[f].assign(feeders[f].houses.size(), std::vector<double>(n_steps, 0.0));
    inputs[f] = make_step_inputs(sim, feeders[f], 0, sim.price_at(feeders[f].price_id, 0));
  }

  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::string error;
  auto record_error = [&](const std::string& what) {
    std::lock_guard lock(error_mutex);
    if (error.empty())
      error = what;
    abort.store(true);
  };

  std::size_t step = 0;
  std::size_t barriers = 0;
  auto on_step_complete = [&]() noexcept {
    ++barriers;
    try {
      for (std::size_t f = 0; f < n_feeders; ++f) {
        result.feeders[f].feeder.values[step] = engines[f]->reduce(p_h[f]);
        if (per_house)
          for (std::size_t h = 0; h < p_h[f].size(); ++h)
            house_series[f][h][step] = p_h[f][h];
      }
      ++step;
      if (step < n_steps)
        for (std::size_t f = 0; f < n_feeders; ++f)
          inputs[f] = make_step_inputs(sim, feeders[f], step,
                                       sim.price_at(feeders[f].price_id, step));
    } catch (const std::exception& e) {
      record_error(std::string("reduction: ") + e.what());
    }
  };

  const Partition partition = partition_houses(offset.back(), n_workers);
  std::barrier sync(static_cast<std::ptrdiff_t>(n_workers), on_step_complete);
  {
    std::vector<std::jthread> workers;
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        const auto segments = segments_for(partition.ranges[w], offset);
        for (std::size_t s = 0; s < n_steps; ++s) {
          if (abort.load())
            return;
          try {
            for (const auto& seg : segments)
              engines[seg.feeder]->advance(seg.begin, seg.end, inputs[seg.feeder], p_h[seg.feeder]);
          } catch (const std::exception& e) {
            record_error("worker " + std::to_string(w) + ": " + e.what());
            sync.arrive_and_drop();
            return;
          }
          sync.arrive_and_wait();
        }
      });
    }
  }

  if (!error.empty())
    throw ExecutionError("shared run aborted: " + error);
  result.barrier_count = barriers;
  if (per_house)
    for (std::size_t f = 0; f < n_feeders; ++f)
      result.feeders[f].houses =
        house_load_series(feeders[f], engines[f]->id_order(), house_series[f]);
  return result;
}

} // namespace feedersim
