#include "feedersim/bench.hpp"

#include "feedersim/errors.hpp"
#include "feedersim/hashing.hpp"
#include "feedersim/runner.hpp"

#include "json_reader.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace feedersim {

using detail::ObjectReader;
using nlohmann::json;

std::string_view to_string(ExperimentKind kind) noexcept
{
  switch (kind) {
  case ExperimentKind::linear_growth:
    return "linear_growth";
  case ExperimentKind::feeder_scaling:
    return "feeder_scaling";
  case ExperimentKind::granularity:
    return "granularity";
  case ExperimentKind::oversubscription:
    return "oversubscription";
  }
  return "unknown";
}

void ExperimentConfig::validate() const
{
  const std::string name(to_string(kind));
  if (repetitions < 1)
    throw ConfigError(name + ": repetitions must be >= 1");
  for (std::size_t h : houses)
    if (h == 0)
      throw ConfigError(name + ": degenerate workload (0 houses)");
  for (std::size_t w : workers)
    if (w == 0)
      throw ConfigError(name + ": worker count must be >= 1");
  if (!(horizon_hours > 0.0))
    throw ConfigError(name + ": horizon_hours must be > 0");
  switch (kind) {
  case ExperimentKind::linear_growth:
    if (mode != ExecMode::seq)
      throw ConfigError(name + ": runs in seq mode only");
    break;
  case ExperimentKind::feeder_scaling:
    if (mode != ExecMode::mp)
      throw ConfigError(name + ": runs in mp mode only");
    break;
  case ExperimentKind::granularity:
  case ExperimentKind::oversubscription:
    if (mode == ExecMode::seq)
      throw ConfigError(name + ": needs shared or mp mode");
    break;
  }
}

namespace {

ExperimentKind parse_kind(const std::string& text, const std::string& path)
{
  for (auto k : {ExperimentKind::linear_growth, ExperimentKind::feeder_scaling,
                 ExperimentKind::granularity, ExperimentKind::oversubscription})
    if (text == to_string(k))
      return k;
  throw ConfigError(path + ": unknown experiment type '" + text + "'");
}

std::vector<std::size_t> parse_sizes(const json& v, const std::string& path)
{
  if (!v.is_array())
    throw ConfigError(path + ": expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(ObjectReader::as_uint(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

SimulationConfig bench_simulation(const ExperimentConfig& config)
{
  SimulationConfig sim;
  sim.horizon_hours = config.horizon_hours;
  sim.step_hours = 1.0;
  auto hours = static_cast<std::size_t>(std::ceil(config.horizon_hours));
  sim.weather[default_input_id] = synthetic_weather(hours);
  sim.prices[default_input_id] = synthetic_prices(hours, config.price_changes);
  return sim;
}

struct Workload {
  RunConfig run;
  std::vector<FeederSpec> feeders;
  std::size_t houses_total = 0;
};

Workload make_workload(const ExperimentConfig& config, const std::vector<std::size_t>& feeder_sizes,
                       ExecMode mode, std::size_t workers, ScheduleSpec schedule = {})
{
  Workload w;
  w.run.seed = config.seed;
  w.run.sim = bench_simulation(config);
  w.run.population = PopulationConfig::defaults(config.seed);
  w.run.executor.mode = mode;
  w.run.executor.workers = workers;
  w.run.executor.feeders = feeder_sizes.size();
  w.run.executor.transport = config.transport;
  w.run.executor.schedule = schedule;
  for (std::size_t k = 0; k < feeder_sizes.size(); ++k) {
    w.feeders.push_back(generate_feeder(w.run.population, static_cast<std::uint32_t>(k), feeder_sizes[k]));
    w.houses_total += feeder_sizes[k];
  }
  return w;
}

std::vector<std::size_t> split_evenly(std::size_t total, std::size_t parts)
{
  std::vector<std::size_t> sizes(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i)
    ++sizes[i];
  return sizes;
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Measured {
  double cpu_s = 0.0;
  double wall_s = 0.0;
  std::uint64_t hash = 0;
  std::optional<MessageStats> messages;
};

std::uint64_t oracle_hash(const Workload& w)
{
  std::vector<LoadSeries> series;
  for (const auto& f : w.feeders)
    series.push_back(simulate_feeder(f, w.run.sim).feeder);
  return hash_doubles(sum_feeders(series).values);
}

// Repetitions run round-robin over the workloads, reversing direction each
// round, so slow drift and position in the round hit all alike.
// Every repetition's output must hash to the sequential oracle.
std::vector<Measured> measure(std::span<const Workload> workloads, std::size_t repetitions)
{
  std::vector<std::uint64_t> oracle(workloads.size());
  for (std::size_t i = 0; i < workloads.size(); ++i)
    oracle[i] = oracle_hash(workloads[i]);

  std::vector<std::vector<double>> cpu(workloads.size()), wall(workloads.size());
  std::vector<Measured> out(workloads.size());
  for (std::size_t rep = 0; rep < repetitions; ++rep)
    for (std::size_t j = 0; j < workloads.size(); ++j) {
      const std::size_t i = rep % 2 ? workloads.size() - 1 - j : j;
      auto r = execute(workloads[i].run, workloads[i].feeders);
      std::uint64_t h = hash_doubles(r.global.values);
      if (h != oracle[i])
        throw ExecutionError("output hash mismatch against the sequential oracle (mode " +
                             std::string(to_string(workloads[i].run.executor.mode)) + ", " +
                             std::to_string(workloads[i].feeders.size()) + " feeders)");
      cpu[i].push_back(r.cpu_s);
      wall[i].push_back(r.wall_s);
      out[i].hash = h;
      out[i].messages = r.messages;
    }
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    out[i].cpu_s = median(cpu[i]);
    out[i].wall_s = median(wall[i]);
  }
  return out;
}

BenchRow make_row(ExperimentKind kind, const Workload& w, const Measured& m, std::size_t workers)
{
  BenchRow row;
  row.experiment = std::string(to_string(kind));
  row.mode = w.run.executor.mode;
  row.workers = workers;
  row.feeders = w.feeders.size();
  row.houses_total = w.houses_total;
  row.houses_per_worker = (w.houses_total + workers - 1) / workers;
  row.cpu_s = m.cpu_s;
  row.wall_s = m.wall_s;
  row.utilization = m.wall_s > 0.0 ? m.cpu_s / m.wall_s : 0.0;
  row.max_rss_bytes = UsageProbe::max_rss_bytes();
  row.output_hash = m.hash;
  if (row.max_rss_bytes == 0)
    row.notes = "max_rss unavailable";
  return row;
}

void add_note(BenchRow& row, const std::string& note)
{
  if (!row.notes.empty())
    row.notes += "; ";
  row.notes += note;
}

std::string fixed(double v, int digits)
{
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

std::vector<std::size_t> or_default(const std::vector<std::size_t>& v, std::vector<std::size_t> fallback)
{
  return v.empty() ? fallback : v;
}

} // namespace

BenchSuiteConfig parse_bench_suite(const std::string& json_text)
{
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  ObjectReader top(root, "");
  top.expect_keys({"seed", "repetitions", "horizon_hours", "experiments"});
  ExperimentConfig defaults;
  defaults.seed = top.uint("seed", defaults.seed);
  defaults.repetitions = top.uint("repetitions", defaults.repetitions);
  defaults.horizon_hours = top.number("horizon_hours", defaults.horizon_hours);

  BenchSuiteConfig suite;
  const json& list = top.at("experiments");
  if (!list.is_array())
    throw ConfigError("experiments: expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "experiments[" + std::to_string(i) + "]";
    ObjectReader obj(list[i], path);
    obj.expect_keys({"type", "mode", "houses", "workers", "repetitions", "seed", "horizon_hours",
                     "price_changes", "transport"});
    ExperimentConfig e = defaults;
    e.kind = parse_kind(ObjectReader::as_string(obj.at("type"), obj.child("type")), path + ".type");
    const ExecMode fallback = e.kind == ExperimentKind::linear_growth ? ExecMode::seq : ExecMode::mp;
    try {
      e.mode = parse_exec_mode(obj.string("mode", std::string(to_string(fallback))));
    } catch (const ConfigError& err) {
      throw ConfigError(obj.child("mode") + ": " + err.what());
    }
    if (const json* v = obj.find("houses"))
      e.houses = parse_sizes(*v, obj.child("houses"));
    if (const json* v = obj.find("workers"))
      e.workers = parse_sizes(*v, obj.child("workers"));
    e.repetitions = obj.uint("repetitions", e.repetitions);
    e.seed = obj.uint("seed", e.seed);
    e.horizon_hours = obj.number("horizon_hours", e.horizon_hours);
    e.price_changes = obj.uint("price_changes", e.price_changes);
    std::string transport = obj.string("transport", "thread");
    if (transport == "process")
      e.transport = TransportKind::process;
    else if (transport != "thread")
      throw ConfigError(obj.child("transport") + ": expected \"thread\" or \"process\"");
    obj.finish();
    try {
      e.validate();
    } catch (const ConfigError& err) {
      throw ConfigError(path + ": " + err.what());
    }
    suite.experiments.push_back(std::move(e));
  }
  top.finish();
  return suite;
}

BenchSuiteConfig load_bench_suite(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open suite " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_bench_suite(text.str());
}

double log_log_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("log_log_slope needs two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0)
    throw std::invalid_argument("log_log_slope needs two distinct x values");
  return sxy / sxx;
}

std::optional<std::size_t> find_knee(std::span<const BenchRow> rows, std::string_view tag)
{
  const BenchRow* best = nullptr;
  for (const auto& r : rows)
    if (r.notes.find(tag) != std::string::npos && (!best || r.wall_s < best->wall_s))
      best = &r;
  if (!best)
    return std::nullopt;
  return best->workers;
}

ExperimentReport run_linear_growth(const ExperimentConfig& config)
{
  config.validate();
  ExperimentReport report{ExperimentKind::linear_growth, {}, {}, {}, {}};
  auto houses = or_default(config.houses, {1000, 2000, 4000, 8000});
  std::vector<Workload> workloads;
  for (std::size_t h : houses)
    workloads.push_back(make_workload(config, {h}, ExecMode::seq, 1));
  auto measured = measure(workloads, config.repetitions);

  std::vector<double> x, y;
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    report.rows.push_back(make_row(report.kind, workloads[i], measured[i], 1));
    x.push_back(static_cast<double>(houses[i]));
    y.push_back(measured[i].wall_s);
  }
  bool distinct = std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end();
  if (x.size() >= 2 && distinct) {
    report.growth_exponent = log_log_slope(x, y);
    for (auto& row : report.rows)
      add_note(row, "growth_exponent=" + fixed(*report.growth_exponent, 3));
  }
  return report;
}

ExperimentReport run_feeder_scaling(const ExperimentConfig& config)
{
  config.validate();
  ExperimentReport report{ExperimentKind::feeder_scaling, {}, {}, {}, {}};
  const std::size_t per_feeder = config.houses.empty() ? 10'000 : config.houses.front();
  auto ks = or_default(config.workers, {1, 2, 4});
  if (std::find(ks.begin(), ks.end(), 1u) == ks.end())
    ks.insert(ks.begin(), 1);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  ScheduleSpec end_only;
  std::vector<Workload> workloads;
  for (std::size_t k : ks)
    workloads.push_back(make_workload(config, std::vector<std::size_t>(k, per_feeder), ExecMode::mp, k, end_only));
  auto measured = measure(workloads, config.repetitions);

  const std::size_t cores = physical_cores();
  const double baseline = measured.front().wall_s;
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    auto row = make_row(report.kind, workloads[i], measured[i], ks[i]);
    double ratio = baseline > 0.0 ? measured[i].wall_s / baseline : 0.0;
    if (ks[i] == 1)
      ratio = 1.0;
    report.wall_ratios.emplace_back(ks[i], ratio);
    add_note(row, "ratio=" + fixed(ratio, 3));
    const auto& sim = workloads[i].run.sim;
    std::size_t expected = expected_message_count(
      ks[i], 1, ks[i] * sim.price_change_steps(default_input_id).size());
    std::size_t got = measured[i].messages ? measured[i].messages->total() : 0;
    add_note(row, "messages=" + std::to_string(got) + "/" + std::to_string(expected));
    if (got != expected)
      add_note(row, "warning: message count differs from the bound");
    if (ks[i] > cores)
      add_note(row, "warning: K=" + std::to_string(ks[i]) + " exceeds " + std::to_string(cores) +
                      " physical cores");
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_granularity_sweep(const ExperimentConfig& config)
{
  config.validate();
  ExperimentReport report{ExperimentKind::granularity, {}, {}, {}, {}};
  const std::size_t total = config.houses.empty() ? 10'000 : config.houses.front();
  const auto ws = or_default(config.workers, {1, 4, 8, 16});

  std::vector<Workload> workloads;
  std::vector<std::size_t> row_workers;
  std::vector<std::string> tags;
  for (std::size_t w : ws) {
    if (config.mode == ExecMode::shared) {
      workloads.push_back(make_workload(config, {total}, ExecMode::shared, w));
      tags.push_back("schedule=barrier_every_step");
    } else {
      ScheduleSpec end_only;
      ScheduleSpec every;
      every.kind = ScheduleSpec::Kind::every_step;
      workloads.push_back(make_workload(config, split_evenly(total, w), ExecMode::mp, w, end_only));
      tags.push_back("schedule=end");
      row_workers.push_back(w);
      workloads.push_back(make_workload(config, split_evenly(total, w), ExecMode::mp, w, every));
      tags.push_back("schedule=every_step");
    }
    row_workers.push_back(w);
  }
  auto measured = measure(workloads, config.repetitions);
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    auto row = make_row(report.kind, workloads[i], measured[i], row_workers[i]);
    add_note(row, tags[i]);
    report.rows.push_back(std::move(row));
  }

  const std::string knee_tag = config.mode == ExecMode::shared ? "schedule=barrier_every_step" : "schedule=end";
  report.knee_workers = find_knee(report.rows, knee_tag);
  for (auto& row : report.rows)
    if (report.knee_workers && row.workers == *report.knee_workers && row.notes.find(knee_tag) != std::string::npos)
      add_note(row, "knee");
  const double baseline = report.rows.front().wall_s;
  for (const auto& row : report.rows)
    if (row.notes.find(knee_tag) != std::string::npos)
      report.wall_ratios.emplace_back(row.workers, baseline > 0.0 ? row.wall_s / baseline : 0.0);
  return report;
}

ExperimentReport run_oversubscription(const ExperimentConfig& config)
{
  config.validate();
  ExperimentReport report{ExperimentKind::oversubscription, {}, {}, {}, {}};
  const std::size_t total = config.houses.empty() ? 10'000 : config.houses.front();
  const std::size_t cores = physical_cores();
  const auto ws = or_default(config.workers, {cores, 4 * cores});

  std::vector<Workload> workloads;
  for (std::size_t w : ws) {
    if (config.mode == ExecMode::shared)
      workloads.push_back(make_workload(config, {total}, ExecMode::shared, w));
    else
      workloads.push_back(make_workload(config, split_evenly(total, w), ExecMode::mp, w));
  }
  auto measured = measure(workloads, config.repetitions);
  const double baseline = measured.front().wall_s;
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    auto row = make_row(report.kind, workloads[i], measured[i], ws[i]);
    double ratio = baseline > 0.0 ? measured[i].wall_s / baseline : 0.0;
    report.wall_ratios.emplace_back(ws[i], ratio);
    if (i == 0) {
      add_note(row, "baseline");
    } else {
      add_note(row, "ratio=" + fixed(ratio, 3));
      add_note(row, ratio >= 0.8 && ratio <= 3.0 ? "within 0.8x-3x of baseline"
                                                 : "outside 0.8x-3x of baseline");
    }
    if (ws[i] > cores)
      add_note(row, "oversubscribed " + fixed(static_cast<double>(ws[i]) / static_cast<double>(cores), 1) +
                      "x on " + std::to_string(cores) + " cores");
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config)
{
  switch (config.kind) {
  case ExperimentKind::linear_growth:
    return run_linear_growth(config);
  case ExperimentKind::feeder_scaling:
    return run_feeder_scaling(config);
  case ExperimentKind::granularity:
    return run_granularity_sweep(config);
  case ExperimentKind::oversubscription:
    return run_oversubscription(config);
  }
  throw ConfigError("unknown experiment");
}

std::vector<ExperimentReport> run_suite(const BenchSuiteConfig& suite)
{
  std::vector<ExperimentReport> out;
  for (const auto& e : suite.experiments)
    out.push_back(run_experiment(e));
  return out;
}

} // namespace feedersim
