#include "feedersim/runner.hpp"

#include "feedersim/errors.hpp"
#include "feedersim/exec_coordinator.hpp"
#include "feedersim/exec_shared.hpp"
#include "feedersim/io.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>

namespace feedersim {

namespace {

double seconds(const timeval& tv) { return static_cast<double>(tv.tv_sec) + tv.tv_usec * 1e-6; }

double process_cpu_seconds()
{
  rusage self{};
  rusage children{};
  getrusage(RUSAGE_SELF, &self);
  getrusage(RUSAGE_CHILDREN, &children);
  return seconds(self.ru_utime) + seconds(self.ru_stime) + seconds(children.ru_utime) +
         seconds(children.ru_stime);
}

} // namespace

UsageProbe::UsageProbe()
  : wall_start_(std::chrono::steady_clock::now()), cpu_start_(process_cpu_seconds())
{
}

double UsageProbe::cpu_seconds() const { return process_cpu_seconds() - cpu_start_; }

double UsageProbe::wall_seconds() const
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start_).count();
}

std::uint64_t UsageProbe::max_rss_bytes()
{
  rusage self{};
  rusage children{};
  if (getrusage(RUSAGE_SELF, &self) != 0)
    return 0;
  getrusage(RUSAGE_CHILDREN, &children);
  // ru_maxrss is in kilobytes on Linux
  return static_cast<std::uint64_t>(std::max(self.ru_maxrss, children.ru_maxrss)) * 1024u;
}

std::size_t physical_cores()
{
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<std::string, std::string>> cores;
  std::string line;
  std::string physical_id = "0";
  while (std::getline(in, line)) {
    auto colon = line.find(':');
    if (colon == std::string::npos)
      continue;
    std::string key = line.substr(0, line.find_last_not_of(" \t", colon - 1) + 1);
    std::string value = colon + 2 <= line.size() ? line.substr(colon + 2) : std::string();
    if (key == "physical id")
      physical_id = value;
    else if (key == "core id")
      cores.emplace(physical_id, value);
  }
  std::size_t logical = std::max(1u, std::thread::hardware_concurrency());
  if (cores.empty())
    return logical;
  return std::min(cores.size(), logical);
}

std::vector<FeederSpec> build_feeders(const RunConfig& config)
{
  std::vector<FeederSpec> feeders;
  const std::size_t k = config.feeder_count();
  feeders.reserve(k);
  for (std::size_t id = 0; id < k; ++id) {
    auto f = generate_feeder(config.population, static_cast<std::uint32_t>(id), config.houses_per_feeder);
    if (auto it = config.feeder_inputs.find(static_cast<std::uint32_t>(id)); it != config.feeder_inputs.end()) {
      if (it->second.weather_id)
        f.weather_id = *it->second.weather_id;
      if (it->second.price_id)
        f.price_id = *it->second.price_id;
    }
    feeders.push_back(std::move(f));
  }
  return feeders;
}

RunOutcome execute(const RunConfig& config, std::span<const FeederSpec> feeders)
{
  RunOutcome out;
  const auto& ex = config.executor;
  UsageProbe probe;
  switch (ex.mode) {
  case ExecMode::seq:
    for (const auto& f : feeders) {
      auto r = simulate_feeder(f, config.sim, config.per_house);
      out.feeders.push_back(std::move(r.feeder));
      out.houses.push_back(std::move(r.houses));
    }
    break;
  case ExecMode::shared: {
    auto r = run_shared(feeders, config.sim, ex.workers, config.per_house);
    for (auto& f : r.feeders) {
      out.feeders.push_back(std::move(f.feeder));
      out.houses.push_back(std::move(f.houses));
    }
    out.barrier_count = r.barrier_count;
    break;
  }
  case ExecMode::mp: {
    CoordinatorOptions options;
    options.transport = ex.transport;
    options.report_timeout = ex.report_timeout;
    auto r = coordinator_run(feeders, config.sim, ex.schedule.resolve(config.sim.steps()), options);
    out.feeders = std::move(r.feeders);
    out.houses.resize(out.feeders.size());
    out.messages = r.stats;
    break;
  }
  }
  out.cpu_s = probe.cpu_seconds();
  out.wall_s = probe.wall_seconds();

  // ascending feeder id for output
  std::vector<std::size_t> order(out.feeders.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out.feeders[a].id < out.feeders[b].id; });
  std::vector<LoadSeries> feeders_sorted;
  std::vector<std::vector<LoadSeries>> houses_sorted;
  for (std::size_t i : order) {
    feeders_sorted.push_back(std::move(out.feeders[i]));
    houses_sorted.push_back(std::move(out.houses[i]));
  }
  out.feeders = std::move(feeders_sorted);
  out.houses = std::move(houses_sorted);
  out.global = sum_feeders(out.feeders);
  return out;
}

void write_outcome(const RunConfig& config, const RunOutcome& outcome)
{
  write_results(config.output_dir / "results.csv", outcome.feeders, config.sim);
  if (!config.per_house)
    return;
  for (std::size_t k = 0; k < outcome.feeders.size(); ++k)
    write_house_results(config.output_dir / ("houses_" + std::to_string(outcome.feeders[k].id) + ".csv"),
                        outcome.houses[k], config.sim);
}

} // namespace feedersim
