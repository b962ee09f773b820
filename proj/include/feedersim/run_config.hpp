#pragma once

#include "feedersim/engine.hpp"
#include "feedersim/exec_coordinator.hpp"
#include "feedersim/population.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace feedersim {

enum class ExecMode { seq, shared, mp };

std::string_view to_string(ExecMode mode) noexcept;
ExecMode parse_exec_mode(std::string_view text);

struct ScheduleSpec {
  enum class Kind { end_only, every_step, interval, explicit_points };
  Kind kind = Kind::end_only;
  std::size_t interval = 1;
  std::vector<std::size_t> points;

  ExchangeSchedule resolve(std::size_t n_steps) const;
};

struct ExecutorConfig {
  ExecMode mode = ExecMode::seq;
  std::size_t workers = 1;
  std::optional<std::size_t> feeders; // required in mp mode; defaults to 1 otherwise
  TransportKind transport = TransportKind::thread;
  ScheduleSpec schedule;
  std::chrono::milliseconds report_timeout{60'000};
};

/// Per-feeder input override; the referenced tapes live in SimulationConfig
/// under the ids "feeder<id>".
struct FeederInputs {
  std::optional<std::string> weather_id;
  std::optional<std::string> price_id;
};

struct RunConfig {
  std::uint64_t seed = 0;
  SimulationConfig sim;
  PopulationConfig population;
  std::size_t houses_per_feeder = 0;
  ExecutorConfig executor;
  std::map<std::uint32_t, FeederInputs> feeder_inputs;
  std::filesystem::path output_dir = "results";
  bool per_house = false;

  std::size_t feeder_count() const { return executor.feeders.value_or(1); }

  /// Cross-field checks (executor parameters against mode, input coverage).
  void validate() const;
};

/// Parse JSON config text. Relative input paths resolve against `base_dir`.
/// Unknown keys and type mismatches throw ConfigError naming the key path.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);

RunConfig load_run_config(const std::filesystem::path& path);

/// JSON for a self-contained config with synthetic inline weather and prices.
std::string scaffold_config(std::size_t houses_per_feeder, std::size_t feeders, std::uint64_t seed,
                            double horizon_hours = 100.0);

/// Winter-like hourly temperatures (daily sinusoid around 2 degC).
WeatherTape synthetic_weather(std::size_t hours);

/// Flat price with `n_changes` step changes spread over the horizon.
PriceSeries synthetic_prices(std::size_t hours, std::size_t n_changes);

} // namespace feedersim
