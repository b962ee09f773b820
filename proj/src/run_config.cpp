#include "feedersim/run_config.hpp"

#include "feedersim/errors.hpp"
#include "feedersim/io.hpp"

#include "json_reader.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace feedersim {

using nlohmann::json;
using detail::ObjectReader;

namespace {

Range parse_range(const json& v, const std::string& path)
{
  if (v.is_number()) {
    double d = ObjectReader::as_number(v, path);
    return Range::point(d);
  }
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(path + ": expected a number or [low, high]");
  Range r{ObjectReader::as_number(v[0], path + "[0]"), ObjectReader::as_number(v[1], path + "[1]")};
  if (r.low > r.high)
    throw ConfigError(path + ": low > high");
  return r;
}

CountRange parse_count(const json& v, const std::string& path)
{
  if (v.is_number())
    return {static_cast<unsigned>(ObjectReader::as_uint(v, path)),
            static_cast<unsigned>(ObjectReader::as_uint(v, path))};
  if (!v.is_array() || v.size() != 2)
    throw ConfigError(path + ": expected a count or [min, max]");
  CountRange c{static_cast<unsigned>(ObjectReader::as_uint(v[0], path + "[0]")),
               static_cast<unsigned>(ObjectReader::as_uint(v[1], path + "[1]"))};
  if (c.min > c.max)
    throw ConfigError(path + ": min > max");
  return c;
}

std::vector<double> parse_number_array(const json& v, const std::string& path)
{
  if (!v.is_array())
    throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(ObjectReader::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// "path.csv" or {"hourly": [...]}
std::vector<double> parse_series_source(const json& v, const std::string& path,
                                        const std::filesystem::path& base_dir, bool is_weather)
{
  if (v.is_string()) {
    std::filesystem::path file = v.get<std::string>();
    if (file.is_relative())
      file = base_dir / file;
    try {
      return is_weather ? load_weather(file).temperature_c : load_prices(file).price;
    } catch (const ParseError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  ObjectReader obj(v, path);
  auto values = parse_number_array(obj.at("hourly"), obj.child("hourly"));
  obj.finish();
  if (values.empty())
    throw ConfigError(path + ".hourly: no records");
  if (!is_weather)
    for (double p : values)
      if (p < 0.0)
        throw ConfigError(path + ".hourly: negative price");
  return values;
}

void parse_tca_override(ObjectReader& obj, TcaArchetype& a)
{
  if (auto* v = obj.find("count"))
    a.count = parse_count(*v, obj.child("count"));
  if (auto* v = obj.find("resistance"))
    a.resistance = parse_range(*v, obj.child("resistance"));
  if (auto* v = obj.find("capacitance"))
    a.capacitance = parse_range(*v, obj.child("capacitance"));
  if (auto* v = obj.find("rated_power"))
    a.rated_power = parse_range(*v, obj.child("rated_power"));
  if (auto* v = obj.find("efficiency"))
    a.efficiency = parse_range(*v, obj.child("efficiency"));
  if (auto* v = obj.find("setpoint"))
    a.setpoint = parse_range(*v, obj.child("setpoint"));
  if (auto* v = obj.find("deadband"))
    a.deadband = parse_range(*v, obj.child("deadband"));
  if (auto* v = obj.find("setback"))
    a.setback = parse_range(*v, obj.child("setback"));
  if (auto* v = obj.find("mode")) {
    if (*v == "heating")
      a.mode = ThermalMode::heating;
    else if (*v == "cooling")
      a.mode = ThermalMode::cooling;
    else
      throw ConfigError(obj.child("mode") + ": expected \"heating\" or \"cooling\"");
  }
  if (auto* v = obj.find("indoor_ambient_c")) {
    if (v->is_null())
      a.fixed_ambient.reset();
    else
      a.fixed_ambient = ObjectReader::as_number(*v, obj.child("indoor_ambient_c"));
  }
  obj.finish();
}

void parse_population(const json& v, const std::string& path, RunConfig& cfg)
{
  ObjectReader obj(v, path);
  cfg.houses_per_feeder = obj.uint("houses_per_feeder", 0);
  if (const json* tcas = obj.find("tca")) {
    ObjectReader group(*tcas, obj.child("tca"));
    for (auto& a : cfg.population.tcas)
      if (const json* o = group.find(a.name)) {
        ObjectReader entry(*o, group.child(a.name));
        parse_tca_override(entry, a);
      }
    group.finish();
  }
  if (const json* non_tcas = obj.find("non_tca")) {
    ObjectReader group(*non_tcas, obj.child("non_tca"));
    for (auto& a : cfg.population.non_tcas)
      if (const json* o = group.find(a.name)) {
        ObjectReader entry(*o, group.child(a.name));
        if (auto* c = entry.find("count"))
          a.count = parse_count(*c, entry.child("count"));
        if (auto* r = entry.find("rated_power"))
          a.rated_power = parse_range(*r, entry.child("rated_power"));
        if (auto* p = entry.find("profile"))
          a.profile = std::make_shared<const ProbabilitySchedule>(
            ProbabilitySchedule{parse_number_array(*p, entry.child("profile")), true});
        entry.finish();
      }
    group.finish();
  }
  obj.finish();
}

ScheduleSpec parse_schedule(const json& v, const std::string& path)
{
  ScheduleSpec s;
  if (v.is_string()) {
    if (v == "end")
      s.kind = ScheduleSpec::Kind::end_only;
    else if (v == "every_step")
      s.kind = ScheduleSpec::Kind::every_step;
    else
      throw ConfigError(path + ": expected \"end\", \"every_step\", {\"every\": N} or a list");
    return s;
  }
  if (v.is_array()) {
    s.kind = ScheduleSpec::Kind::explicit_points;
    for (std::size_t i = 0; i < v.size(); ++i)
      s.points.push_back(ObjectReader::as_uint(v[i], path + "[" + std::to_string(i) + "]"));
    return s;
  }
  ObjectReader obj(v, path);
  s.kind = ScheduleSpec::Kind::interval;
  s.interval = obj.uint("every", 0);
  if (!obj.has("every") || s.interval == 0)
    throw ConfigError(obj.child("every") + ": must be >= 1");
  obj.finish();
  return s;
}

void parse_executor(const json& v, const std::string& path, ExecutorConfig& ex)
{
  ObjectReader obj(v, path);
  try {
    ex.mode = parse_exec_mode(obj.string("mode", "seq"));
  } catch (const ConfigError& e) {
    throw ConfigError(obj.child("mode") + ": " + e.what());
  }
  ex.workers = obj.uint("workers", 1);
  if (const json* f = obj.find("feeders"))
    ex.feeders = ObjectReader::as_uint(*f, obj.child("feeders"));
  std::string transport = obj.string("transport", "thread");
  if (transport == "thread")
    ex.transport = TransportKind::thread;
  else if (transport == "process")
    ex.transport = TransportKind::process;
  else
    throw ConfigError(obj.child("transport") + ": expected \"thread\" or \"process\"");
  if (const json* s = obj.find("schedule"))
    ex.schedule = parse_schedule(*s, obj.child("schedule"));
  double timeout = obj.number("timeout_s", 60.0);
  if (!(timeout > 0.0))
    throw ConfigError(obj.child("timeout_s") + ": must be > 0");
  ex.report_timeout = std::chrono::milliseconds(static_cast<long long>(std::llround(timeout * 1000.0)));
  obj.finish();
}

} // namespace

std::string_view to_string(ExecMode mode) noexcept
{
  switch (mode) {
  case ExecMode::seq:
    return "seq";
  case ExecMode::shared:
    return "shared";
  case ExecMode::mp:
    return "mp";
  }
  return "unknown";
}

ExecMode parse_exec_mode(std::string_view text)
{
  if (text == "seq")
    return ExecMode::seq;
  if (text == "shared")
    return ExecMode::shared;
  if (text == "mp")
    return ExecMode::mp;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected seq, shared or mp)");
}

ExchangeSchedule ScheduleSpec::resolve(std::size_t n_steps) const
{
  switch (kind) {
  case Kind::end_only:
    return ExchangeSchedule::end_only(n_steps);
  case Kind::every_step:
    return ExchangeSchedule::every_step(n_steps);
  case Kind::interval:
    return ExchangeSchedule::every(interval, n_steps);
  case Kind::explicit_points:
    break;
  }
  ExchangeSchedule s{points};
  s.validate(n_steps);
  return s;
}

void RunConfig::validate() const
{
  sim.validate();
  population.validate();
  if (executor.mode == ExecMode::mp && !executor.feeders)
    throw ConfigError("executor.feeders: required in mp mode");
  if (feeder_count() == 0)
    throw ConfigError("executor.feeders: must be >= 1");
  if (executor.mode == ExecMode::shared && executor.workers == 0)
    throw ConfigError("executor.workers: must be >= 1 in shared mode");
  if (executor.mode == ExecMode::mp) {
    try {
      executor.schedule.resolve(sim.steps()).validate(sim.steps());
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("executor.schedule: ") + e.what());
    }
    if (per_house)
      throw ConfigError("output.per_house: not available in mp mode (workers report feeder totals only)");
  }
  for (const auto& [id, inputs] : feeder_inputs) {
    if (id >= feeder_count())
      throw ConfigError("feeder_inputs: feeder " + std::to_string(id) + " does not exist");
    if (inputs.weather_id)
      sim.weather_for(*inputs.weather_id);
    if (inputs.price_id)
      sim.prices_for(*inputs.price_id);
  }
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir)
{
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  ObjectReader obj(root, "");
  obj.expect_keys({"seed", "horizon_hours", "step_hours", "weather", "prices", "population", "executor",
                   "price_response", "feeder_inputs", "output"});
  cfg.seed = ObjectReader::as_uint(obj.at("seed"), "seed");
  cfg.population = PopulationConfig::defaults(cfg.seed);
  cfg.sim.horizon_hours = obj.number("horizon_hours", 100.0);
  cfg.sim.step_hours = obj.number("step_hours", 1.0);
  cfg.sim.weather[default_input_id] = {parse_series_source(obj.at("weather"), "weather", base_dir, true)};
  cfg.sim.prices[default_input_id] = {parse_series_source(obj.at("prices"), "prices", base_dir, false)};
  parse_population(obj.at("population"), "population", cfg);

  if (const json* v = obj.find("executor"))
    parse_executor(*v, "executor", cfg.executor);

  if (const json* v = obj.find("price_response")) {
    ObjectReader pr(*v, "price_response");
    PriceResponseConfig p;
    p.reference_price = pr.number("reference_price", p.reference_price);
    p.slope = pr.number("slope", p.slope);
    p.max_offset = pr.number("max_offset", p.max_offset);
    pr.finish();
    cfg.sim.price_response = p;
  }

  if (const json* v = obj.find("feeder_inputs")) {
    if (!v->is_array())
      throw ConfigError("feeder_inputs: expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "feeder_inputs[" + std::to_string(i) + "]";
      ObjectReader fi((*v)[i], path);
      fi.expect_keys({"feeder_id", "weather", "prices"});
      auto id = static_cast<std::uint32_t>(ObjectReader::as_uint(fi.at("feeder_id"), fi.child("feeder_id")));
      FeederInputs inputs;
      const std::string key = "feeder" + std::to_string(id);
      if (const json* w = fi.find("weather")) {
        cfg.sim.weather[key] = {parse_series_source(*w, fi.child("weather"), base_dir, true)};
        inputs.weather_id = key;
      }
      if (const json* p = fi.find("prices")) {
        cfg.sim.prices[key] = {parse_series_source(*p, fi.child("prices"), base_dir, false)};
        inputs.price_id = key;
      }
      fi.finish();
      cfg.feeder_inputs[id] = inputs;
    }
  }

  if (const json* v = obj.find("output")) {
    ObjectReader out(*v, "output");
    std::filesystem::path dir = out.string("dir", "results");
    cfg.output_dir = dir.is_relative() ? base_dir / dir : dir;
    cfg.per_house = out.boolean("per_house", false);
    out.finish();
  } else {
    cfg.output_dir = base_dir / "results";
  }
  obj.finish();

  try {
    cfg.validate();
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_run_config(text.str(), base);
}

WeatherTape synthetic_weather(std::size_t hours)
{
  WeatherTape tape;
  tape.temperature_c.reserve(hours);
  for (std::size_t h = 0; h < hours; ++h) {
    double phase = 2.0 * std::numbers::pi * (static_cast<double>(h % 24) - 9.0) / 24.0;
    tape.temperature_c.push_back(std::round((2.0 + 5.0 * std::sin(phase)) * 100.0) / 100.0);
  }
  return tape;
}

PriceSeries synthetic_prices(std::size_t hours, std::size_t n_changes)
{
  PriceSeries series;
  series.price.assign(hours, 40.0);
  double level = 40.0;
  std::size_t last = 0;
  for (std::size_t i = 1; i <= n_changes; ++i) {
    std::size_t at = i * hours / (n_changes + 1);
    if (at <= last || at >= hours)
      continue;
    level = level == 40.0 ? 80.0 : 40.0;
    for (std::size_t h = at; h < hours; ++h)
      series.price[h] = level;
    last = at;
  }
  return series;
}

std::string scaffold_config(std::size_t houses_per_feeder, std::size_t feeders, std::uint64_t seed,
                            double horizon_hours)
{
  auto hours = static_cast<std::size_t>(std::ceil(horizon_hours));
  json j;
  j["seed"] = seed;
  j["horizon_hours"] = horizon_hours;
  j["step_hours"] = 1.0;
  j["weather"] = {{"hourly", synthetic_weather(hours).temperature_c}};
  j["prices"] = {{"hourly", synthetic_prices(hours, 3).price}};
  j["population"] = {{"houses_per_feeder", houses_per_feeder}};
  j["executor"] = {{"mode", feeders > 1 ? "mp" : "seq"},
                   {"feeders", feeders},
                   {"workers", 1},
                   {"transport", "thread"},
                   {"schedule", "end"},
                   {"timeout_s", 60}};
  j["output"] = {{"dir", "results"}, {"per_house", false}};
  return j.dump(2) + "\n";
}

} // namespace feedersim
