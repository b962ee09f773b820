// feedersim command line: simulate, bench, gen-config.

#include "feedersim/bench.hpp"
#include "feedersim/errors.hpp"
#include "feedersim/run_config.hpp"
#include "feedersim/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace feedersim;

namespace {

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

struct SimulateArgs {
  std::string config;
  std::string mode;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> feeders;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool per_house = false;
  std::string transport;
};

RunConfig apply_overrides(RunConfig cfg, const SimulateArgs& a)
{
  if (!a.mode.empty())
    cfg.executor.mode = parse_exec_mode(a.mode);
  if (a.workers)
    cfg.executor.workers = *a.workers;
  if (a.feeders)
    cfg.executor.feeders = *a.feeders;
  if (a.seed) {
    cfg.seed = *a.seed;
    cfg.population.seed = *a.seed;
  }
  if (!a.out.empty())
    cfg.output_dir = a.out;
  if (a.per_house)
    cfg.per_house = true;
  if (a.transport == "process")
    cfg.executor.transport = TransportKind::process;
  else if (a.transport == "thread")
    cfg.executor.transport = TransportKind::thread;
  cfg.validate();
  return cfg;
}

int simulate(const SimulateArgs& args)
{
  RunConfig cfg = apply_overrides(load_run_config(args.config), args);
  auto feeders = build_feeders(cfg);
  auto outcome = execute(cfg, feeders);
  write_outcome(cfg, outcome);
  std::cout << "mode " << to_string(cfg.executor.mode) << ", " << feeders.size() << " feeder(s) x "
            << cfg.houses_per_feeder << " houses, " << cfg.sim.steps() << " steps\n"
            << "wall " << outcome.wall_s << " s, cpu " << outcome.cpu_s << " s\n";
  if (outcome.messages)
    std::cout << "messages " << outcome.messages->total() << " (price " << outcome.messages->price_broadcasts
              << ", reports " << outcome.messages->aggregate_reports << ", complete "
              << outcome.messages->run_completes << ")\n";
  std::cout << "wrote " << (cfg.output_dir / "results.csv").string() << '\n';
  return 0;
}

int bench(const std::string& suite_path, const std::string& out, bool plots)
{
  auto suite = load_bench_suite(suite_path);
  auto reports = run_suite(suite);
  for (const auto& path : emit_report(reports, out, plots))
    std::cout << "wrote " << path.string() << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Bottom-up residential feeder load simulator"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Run a simulation from a JSON config");
  sim->add_option("--config", sim_args.config, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--mode", sim_args.mode, "Executor")->check(CLI::IsMember({"seq", "shared", "mp"}));
  sim->add_option("--workers", sim_args.workers, "Worker threads (shared mode)");
  sim->add_option("--feeders", sim_args.feeders, "Feeder count");
  sim->add_option("--seed", sim_args.seed, "Master seed");
  sim->add_option("--out", sim_args.out, "Output directory");
  sim->add_flag("--per-house", sim_args.per_house, "Also write per-house series");
  sim->add_option("--transport", sim_args.transport, "mp transport")
    ->check(CLI::IsMember({"thread", "process"}));

  std::string suite, bench_out;
  bool plots = false;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->add_option("--suite", suite, "Suite config (JSON)")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench_out, "Report directory")->required();
  bench_cmd->add_flag("--plots", plots, "Write SVG plots");

  std::size_t houses = 0, feeders = 1;
  std::uint64_t seed = 42;
  auto* gen = app.add_subcommand("gen-config", "Print a config with synthetic inputs");
  gen->add_option("--houses", houses, "Houses per feeder")->required()->check(CLI::PositiveNumber);
  gen->add_option("--feeders", feeders, "Feeder count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*sim)
      return simulate(sim_args);
    if (*bench_cmd)
      return bench(suite, bench_out, plots);
    std::cout << scaffold_config(houses, feeders, seed);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime;
  }
}
