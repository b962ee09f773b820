#pragma once

#include "feedersim/engine.hpp"
#include "feedersim/message.hpp"
#include "feedersim/transport.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace feedersim {

/// Steps after which every worker reports and waits to be released.
struct ExchangeSchedule {
  std::vector<std::size_t> collection_points;

  /// One exchange at the final step.
  static ExchangeSchedule end_only(std::size_t n_steps);
  static ExchangeSchedule every_step(std::size_t n_steps);
  static ExchangeSchedule every(std::size_t interval, std::size_t n_steps);

  /// Throws ConfigError unless sorted, unique, in range and ending at the last step.
  void validate(std::size_t n_steps) const;

  /// First step of segment `i` (steps after collection point i-1).
  std::size_t segment_begin(std::size_t i) const { return i == 0 ? 0 : collection_points[i - 1] + 1; }
  std::size_t segment_end(std::size_t i) const { return collection_points[i] + 1; }
};

/// Ordered record of synchronization events, for checking that no worker
/// runs ahead of the coordinator. Thread transport only.
class SyncTrace {
public:
  enum class Kind { release_sent, report_received, step_computed };

  struct Event {
    std::uint64_t seq;
    Kind kind;
    std::uint32_t feeder_id; // unused for release_sent
    std::size_t index;       // segment for releases, step otherwise
  };

  void record(Kind kind, std::uint32_t feeder_id, std::size_t index);
  std::vector<Event> events() const;

private:
  mutable std::mutex mutex_;
  std::vector<Event> events_;
};

struct CoordinatorOptions {
  TransportKind transport = TransportKind::thread;
  std::chrono::milliseconds report_timeout{60'000};
  std::shared_ptr<SyncTrace> trace;
};

/// One feeder worker: simulates its feeder step by step, applying price
/// broadcasts from the step they name on, reporting its P_L at each
/// collection point and waiting there until the coordinator releases it.
void worker_run(const FeederSpec& feeder, const SimulationConfig& sim,
                const ExchangeSchedule& schedule, WorkerLink& link, SyncTrace* trace = nullptr);

struct CoordinatorResult {
  LoadSeries global;               // sum over feeders in ascending feeder-id order
  std::vector<LoadSeries> feeders; // same order as the input feeders
  MessageStats stats;
};

/// Coordinator plus one worker per feeder. The coordinator only coordinates:
/// it forwards price changes, gathers reports and sums them.
CoordinatorResult coordinator_run(std::span<const FeederSpec> feeders, const SimulationConfig& sim,
                                  const ExchangeSchedule& schedule,
                                  const CoordinatorOptions& options = {});

MessageStats count_messages(const CoordinatorResult& run);

/// Messages a run must exchange: K * (|collection points| + 1) + all price changes.
std::size_t expected_message_count(std::size_t n_feeders, std::size_t n_collection_points,
                                   std::size_t total_price_changes);

} // namespace feedersim
