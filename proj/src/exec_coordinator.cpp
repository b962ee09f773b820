#include "feedersim/exec_coordinator.hpp"

#include "feedersim/errors.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <set>
#include <sstream>
#include <string>

namespace feedersim {

ExchangeSchedule ExchangeSchedule::end_only(std::size_t n_steps)
{
  return every(n_steps == 0 ? 1 : n_steps, n_steps);
}

ExchangeSchedule ExchangeSchedule::every_step(std::size_t n_steps) { return every(1, n_steps); }

ExchangeSchedule ExchangeSchedule::every(std::size_t interval, std::size_t n_steps)
{
  if (interval == 0)
    throw ConfigError("exchange interval must be >= 1");
  ExchangeSchedule s;
  for (std::size_t p = interval; p < n_steps; p += interval)
    s.collection_points.push_back(p - 1);
  if (n_steps > 0)
    s.collection_points.push_back(n_steps - 1);
  return s;
}

void ExchangeSchedule::validate(std::size_t n_steps) const
{
  if (collection_points.empty())
    throw ConfigError("exchange schedule has no collection points");
  for (std::size_t i = 0; i < collection_points.size(); ++i) {
    if (collection_points[i] >= n_steps)
      throw ConfigError("collection point " + std::to_string(collection_points[i]) +
                        " beyond the last step");
    if (i > 0 && collection_points[i] <= collection_points[i - 1])
      throw ConfigError("collection points must be strictly increasing");
  }
  if (collection_points.back() != n_steps - 1)
    throw ConfigError("last collection point must be the final step");
}

void SyncTrace::record(Kind kind, std::uint32_t feeder_id, std::size_t index)
{
  static std::atomic<std::uint64_t> counter{0};
  std::lock_guard lock(mutex_);
  events_.push_back({counter.fetch_add(1), kind, feeder_id, index});
}

std::vector<SyncTrace::Event> SyncTrace::events() const
{
  std::lock_guard lock(mutex_);
  return events_;
}

void worker_run(const FeederSpec& feeder, const SimulationConfig& sim,
                const ExchangeSchedule& schedule, WorkerLink& link, SyncTrace* trace)
{
  const std::size_t n_steps = sim.steps();
  schedule.validate(n_steps);
  FeederSimulation run(feeder, sim);

  double price = sim.price_at(feeder.price_id, 0);
  std::deque<PriceBroadcast> pending;

  auto wait_release = [&](std::size_t segment) {
    for (;;) {
      Frame frame = link.receive();
      if (auto* b = std::get_if<PriceBroadcast>(&frame)) {
        pending.push_back(*b);
      } else if (auto* r = std::get_if<Release>(&frame)) {
        if (r->segment != segment)
          throw ExecutionError("feeder " + std::to_string(feeder.feeder_id) +
                               ": release for segment " + std::to_string(r->segment) +
                               " while waiting for " + std::to_string(segment));
        return;
      } else if (std::holds_alternative<Shutdown>(frame)) {
        throw ExecutionError("feeder " + std::to_string(feeder.feeder_id) +
                             ": shutdown requested by coordinator");
      } else {
        throw ExecutionError("feeder " + std::to_string(feeder.feeder_id) + ": unexpected " +
                             std::string(frame_name(frame)) + " from coordinator");
      }
    }
  };

  const auto& points = schedule.collection_points;
  for (std::size_t seg = 0; seg < points.size(); ++seg) {
    wait_release(seg);
    AggregateReport report{feeder.feeder_id, schedule.segment_begin(seg),
                           schedule.segment_end(seg), {}};
    report.values.reserve(report.step_end - report.step_begin);
    for (std::size_t s = report.step_begin; s < report.step_end; ++s) {
      while (!pending.empty() && pending.front().step_index <= s) {
        price = pending.front().price;
        pending.pop_front();
      }
      report.values.push_back(run.step(s, price));
      if (trace)
        trace->record(SyncTrace::Kind::step_computed, feeder.feeder_id, s);
    }
    link.send(report);
  }
  wait_release(points.size());
  link.send(RunComplete{feeder.feeder_id});
}

namespace {

std::string feeder_list(std::span<const FeederSpec> feeders, const std::vector<bool>& done)
{
  std::vector<std::uint32_t> missing;
  for (std::size_t k = 0; k < feeders.size(); ++k)
    if (!done[k])
      missing.push_back(feeders[k].feeder_id);
  std::sort(missing.begin(), missing.end());
  std::ostringstream out;
  for (std::size_t i = 0; i < missing.size(); ++i)
    out << (i ? ", " : "") << missing[i];
  return out.str();
}

} // namespace

CoordinatorResult coordinator_run(std::span<const FeederSpec> feeders, const SimulationConfig& sim,
                                  const ExchangeSchedule& schedule,
                                  const CoordinatorOptions& options)
{
  if (feeders.empty())
    throw ConfigError("mp mode needs at least one feeder");
  const std::size_t n_steps = sim.steps();
  schedule.validate(n_steps);
  std::set<std::uint32_t> ids;
  for (const auto& f : feeders) {
    sim.validate_for(f);
    if (!ids.insert(f.feeder_id).second)
      throw ConfigError("duplicate feeder_id " + std::to_string(f.feeder_id));
  }

  const std::size_t n = feeders.size();
  std::vector<std::vector<std::size_t>> changes(n);
  for (std::size_t k = 0; k < n; ++k)
    changes[k] = sim.price_change_steps(feeders[k].price_id);

  CoordinatorResult result;
  result.feeders.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    result.feeders[k] = {LoadRole::feeder_head, feeders[k].feeder_id,
                         std::vector<double>(n_steps, 0.0)};

  SyncTrace* trace = options.trace.get();
  auto link = launch_workers(options.transport, n, [&](std::size_t k, WorkerLink& l) {
    worker_run(feeders[k], sim, schedule, l, trace);
  });

  auto send = [&](std::size_t k, const Frame& frame) {
    if (!link->send(k, frame))
      throw ExecutionError("feeder " + std::to_string(feeders[k].feeder_id) +
                           ": connection closed");
    result.stats.count(frame);
  };

  // Wait for one frame of type T from every worker; `accept` checks and stores it.
  auto gather = [&]<class T>(std::string_view what, auto&& accept) {
    std::vector<bool> done(n, false);
    std::size_t remaining = n;
    auto deadline = std::chrono::steady_clock::now() + options.report_timeout;
    while (remaining > 0) {
      Incoming in;
      if (!link->receive_until(deadline, in))
        throw ExecutionError("timed out after " + std::to_string(options.report_timeout.count()) +
                             " ms waiting for " + std::string(what) + " from feeder " +
                             feeder_list(feeders, done));
      const auto feeder_id = feeders[in.worker].feeder_id;
      if (!in.frame) {
        if (done[in.worker])
          continue;
        throw ExecutionError("feeder " + std::to_string(feeder_id) + ": worker exited before " +
                             std::string(what) +
                             (in.error.empty() ? std::string() : ": " + in.error));
      }
      const T* msg = std::get_if<T>(&*in.frame);
      if (!msg || done[in.worker])
        throw ExecutionError("feeder " + std::to_string(feeder_id) + ": unexpected " +
                             std::string(frame_name(*in.frame)) + " while waiting for " +
                             std::string(what));
      result.stats.count(*in.frame);
      accept(in.worker, *msg);
      done[in.worker] = true;
      --remaining;
    }
  };

  try {
    const auto& points = schedule.collection_points;
    for (std::size_t seg = 0; seg < points.size(); ++seg) {
      const std::size_t begin = schedule.segment_begin(seg);
      const std::size_t end = schedule.segment_end(seg);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t s : changes[k])
          if (s >= begin && s < end)
            send(k, PriceBroadcast{s, sim.price_at(feeders[k].price_id, s)});
      for (std::size_t k = 0; k < n; ++k)
        send(k, Release{seg});
      if (trace)
        trace->record(SyncTrace::Kind::release_sent, 0, seg);

      gather.template operator()<AggregateReport>(
        "AggregateReport at step " + std::to_string(points[seg]),
        [&](std::size_t k, const AggregateReport& r) {
          if (r.feeder_id != feeders[k].feeder_id || r.step_begin != begin || r.step_end != end ||
              r.values.size() != end - begin)
            throw ExecutionError("feeder " + std::to_string(feeders[k].feeder_id) +
                                 ": malformed AggregateReport");
          std::copy(r.values.begin(), r.values.end(),
                    result.feeders[k].values.begin() + static_cast<std::ptrdiff_t>(begin));
          if (trace)
            trace->record(SyncTrace::Kind::report_received, r.feeder_id, points[seg]);
        });
    }

    for (std::size_t k = 0; k < n; ++k)
      send(k, Release{points.size()});
    gather.template operator()<RunComplete>("RunComplete", [&](std::size_t k, const RunComplete& r) {
      if (r.feeder_id != feeders[k].feeder_id)
        throw ExecutionError("feeder " + std::to_string(feeders[k].feeder_id) +
                             ": RunComplete names feeder " + std::to_string(r.feeder_id));
    });
    link->join();
  } catch (...) {
    for (std::size_t k = 0; k < n; ++k)
      if (link->send(k, Shutdown{}))
        result.stats.count(Shutdown{});
    link->abort();
    link->join();
    throw;
  }

  result.global = sum_feeders(result.feeders);
  return result;
}

MessageStats count_messages(const CoordinatorResult& run) { return run.stats; }

std::size_t expected_message_count(std::size_t n_feeders, std::size_t n_collection_points,
                                   std::size_t total_price_changes)
{
  return n_feeders * (n_collection_points + 1) + total_price_changes;
}

} // namespace feedersim
