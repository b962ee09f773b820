#pragma once

#include "feedersim/run_config.hpp"
#include "feedersim/transport.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace feedersim {

enum class ExperimentKind { linear_growth, feeder_scaling, granularity, oversubscription };

std::string_view to_string(ExperimentKind kind) noexcept;

struct BenchRow {
  std::string experiment;
  ExecMode mode = ExecMode::seq;
  std::size_t workers = 1;
  std::size_t feeders = 1;
  std::size_t houses_total = 0;
  std::size_t houses_per_worker = 0;
  double cpu_s = 0.0;
  double wall_s = 0.0;
  double utilization = 0.0; // cpu_s / wall_s; the `efficiency` CSV column
  std::uint64_t max_rss_bytes = 0;
  std::uint64_t output_hash = 0;
  std::string notes;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::linear_growth;
  ExecMode mode = ExecMode::seq;
  std::vector<std::size_t> houses;  // per feeder (scaling) or total (the rest)
  std::vector<std::size_t> workers; // empty: experiment default
  std::size_t repetitions = 3;
  std::uint64_t seed = 42;
  TransportKind transport = TransportKind::thread;
  double horizon_hours = 100.0;
  std::size_t price_changes = 3;

  void validate() const;
};

struct BenchSuiteConfig {
  std::vector<ExperimentConfig> experiments;
};

BenchSuiteConfig parse_bench_suite(const std::string& json_text);
BenchSuiteConfig load_bench_suite(const std::filesystem::path& path);

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::linear_growth;
  std::vector<BenchRow> rows;
  std::optional<double> growth_exponent;      // linear growth, two or more sizes
  std::optional<std::size_t> knee_workers;    // granularity
  std::vector<std::pair<std::size_t, double>> wall_ratios; // (workers, t_w / t_w baseline)
};

/// Sequential wall time against house count; fits the log-log slope.
ExperimentReport run_linear_growth(const ExperimentConfig& config);

/// K feeders of houses[0] houses on K workers; ratio against K = 1.
ExperimentReport run_feeder_scaling(const ExperimentConfig& config);

/// Fixed total houses split over each worker count, once with an end-only
/// exchange and once exchanging every step; marks the knee (fastest end-only
/// worker count).
ExperimentReport run_granularity_sweep(const ExperimentConfig& config);

/// Fixed total houses on W = cores and W = 4 x cores workers.
ExperimentReport run_oversubscription(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config);
std::vector<ExperimentReport> run_suite(const BenchSuiteConfig& suite);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

/// Worker count with the smallest wall time among rows whose notes contain `tag`.
std::optional<std::size_t> find_knee(std::span<const BenchRow> rows, std::string_view tag);

inline constexpr std::string_view bench_csv_header =
  "experiment,mode,workers,feeders,houses_total,houses_per_worker,cpu_s,wall_s,efficiency,"
  "max_rss_bytes,output_hash,notes";

void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows);

/// bench.csv and report.md in `out_dir`, plus one SVG per experiment kind when
/// `plots` is set. Returns the files written.
std::vector<std::filesystem::path> emit_report(std::span<const ExperimentReport> reports,
                                               const std::filesystem::path& out_dir, bool plots);

} // namespace feedersim
