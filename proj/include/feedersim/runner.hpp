#pragma once

#include "feedersim/engine.hpp"
#include "feedersim/message.hpp"
#include "feedersim/run_config.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace feedersim {

/// Process CPU time (self plus reaped children), wall time and peak RSS.
class UsageProbe {
public:
  UsageProbe();

  double cpu_seconds() const;
  double wall_seconds() const;

  /// Peak resident set of this process and its reaped children, bytes; 0 if unknown.
  static std::uint64_t max_rss_bytes();

private:
  std::chrono::steady_clock::time_point wall_start_;
  double cpu_start_;
};

struct RunOutcome {
  std::vector<LoadSeries> feeders;            // ascending feeder id
  LoadSeries global;                          // ordered sum of feeders
  std::vector<std::vector<LoadSeries>> houses; // per feeder, when per-house output is on
  std::optional<MessageStats> messages;       // mp mode only
  std::size_t barrier_count = 0;              // shared mode only
  double cpu_s = 0.0;
  double wall_s = 0.0;
};

/// Feeders 0..K-1 with `houses_per_feeder` houses each and per-feeder input ids.
std::vector<FeederSpec> build_feeders(const RunConfig& config);

/// Run the configured executor over prebuilt feeders. Timing covers the
/// executor only.
RunOutcome execute(const RunConfig& config, std::span<const FeederSpec> feeders);

/// results.csv, plus houses_<feeder_id>.csv per feeder when per-house output is on.
void write_outcome(const RunConfig& config, const RunOutcome& outcome);

/// Physical cores from /proc/cpuinfo, falling back to hardware_concurrency.
std::size_t physical_cores();

} // namespace feedersim
