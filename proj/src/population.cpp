#include "feedersim/population.hpp"

#include "feedersim/errors.hpp"
#include "feedersim/hashing.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace feedersim {

namespace {

std::shared_ptr<const ProbabilitySchedule> daily_profile(std::vector<double> hourly)
{
  return std::make_shared<const ProbabilitySchedule>(ProbabilitySchedule{std::move(hourly), true});
}

// Key for one sampled quantity of one house.
class Sampler {
public:
  Sampler(std::uint64_t seed, std::uint32_t feeder_id, std::uint64_t house_index)
    : base_(combine(combine(seed, feeder_id), house_index))
  {}

  std::uint64_t bits(const std::string& name) const { return combine(base_, fnv1a(name)); }
  double unit(const std::string& name) const { return to_unit(bits(name)); }
  double sample(const std::string& name, const Range& r) const { return r.sample(unit(name)); }

  unsigned count(const std::string& name, CountRange r) const
  {
    if (r.min == r.max)
      return r.min;
    auto span = static_cast<std::uint64_t>(r.max - r.min) + 1;
    return r.min + static_cast<unsigned>(bits(name) % span);
  }

private:
  std::uint64_t base_;
};

void check_range(const std::string& where, const Range& r, bool strictly_positive)
{
  if (!std::isfinite(r.low) || !std::isfinite(r.high))
    throw ConfigError(where + ": range bounds must be finite");
  if (r.low > r.high)
    throw ConfigError(where + ": low > high");
  if (strictly_positive && !(r.low > 0.0))
    throw ConfigError(where + ": must be > 0");
}

class ByteWriter {
public:
  void u8(std::uint8_t v) { out_.push_back(v); }

  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void u64(std::uint64_t v)
  {
    for (int i = 0; i < 8; ++i)
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void str(const std::string& s)
  {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  std::vector<std::uint8_t> take() { return std::move(out_); }

private:
  std::vector<std::uint8_t> out_;
};

} // namespace

std::string_view to_string(TcaKind kind) noexcept
{
  switch (kind) {
  case TcaKind::hvac:
    return "hvac";
  case TcaKind::water_heater:
    return "water_heater";
  case TcaKind::refrigerator:
    return "refrigerator";
  }
  return "unknown";
}

PopulationConfig PopulationConfig::defaults(std::uint64_t seed)
{
  PopulationConfig c;
  c.seed = seed;

  TcaArchetype hvac;
  hvac.name = "hvac";
  hvac.kind = TcaKind::hvac;
  hvac.mode = ThermalMode::heating;
  hvac.count = {1, 1};
  hvac.resistance = {2.0, 3.0};
  hvac.capacitance = {1.0, 2.0};
  hvac.rated_power = {10.0, 15.0};
  hvac.efficiency = {1.0, 1.0};
  hvac.setpoint = {19.0, 22.0};
  hvac.deadband = {1.0, 2.0};
  hvac.setback = {0.0, 3.0};
  c.tcas.push_back(hvac);

  TcaArchetype water;
  water.name = "water_heater";
  water.kind = TcaKind::water_heater;
  water.mode = ThermalMode::heating;
  water.fixed_ambient = 20.0;
  water.count = {0, 1};
  water.resistance = {400.0, 600.0};
  water.capacitance = {0.18, 0.25};
  water.rated_power = {4.0, 4.5};
  water.setpoint = {48.0, 55.0};
  water.deadband = {4.0, 6.0};
  c.tcas.push_back(water);

  TcaArchetype fridge;
  fridge.name = "refrigerator";
  fridge.kind = TcaKind::refrigerator;
  fridge.mode = ThermalMode::cooling;
  fridge.fixed_ambient = 20.0;
  fridge.count = {1, 1};
  fridge.resistance = {80.0, 120.0};
  fridge.capacitance = {0.03, 0.06};
  fridge.rated_power = {0.12, 0.18};
  fridge.efficiency = {1.5, 2.5};
  fridge.setpoint = {3.0, 5.0};
  fridge.deadband = {1.5, 2.5};
  c.tcas.push_back(fridge);

  // Hourly on-probabilities, midnight first.
  c.non_tcas.push_back({"dishwasher", {0, 1}, {1.0, 1.5},
                        daily_profile({.01, .01, .01, .01, .01, .02, .04, .08, .06, .04, .03, .03,
                                       .04, .04, .03, .03, .04, .06, .10, .18, .22, .16, .08, .03})});
  c.non_tcas.push_back({"clothes_washer", {0, 1}, {0.4, 0.6},
                        daily_profile({.01, .01, .01, .01, .01, .02, .05, .08, .10, .12, .12, .10,
                                       .09, .08, .08, .08, .09, .10, .10, .09, .07, .05, .03, .02})});
  c.non_tcas.push_back({"clothes_dryer", {0, 1}, {2.5, 3.5},
                        daily_profile({.01, .01, .01, .01, .01, .01, .03, .05, .08, .10, .12, .12,
                                       .11, .10, .10, .10, .10, .11, .11, .10, .08, .06, .04, .02})});
  c.non_tcas.push_back({"range", {1, 1}, {1.5, 2.5},
                        daily_profile({.01, .01, .01, .01, .01, .03, .10, .20, .15, .06, .05, .10,
                                       .18, .10, .05, .05, .10, .30, .40, .25, .08, .03, .02, .01})});
  c.non_tcas.push_back({"lighting", {1, 1}, {0.2, 0.5},
                        daily_profile({.10, .05, .05, .05, .05, .15, .45, .55, .35, .20, .15, .15,
                                       .15, .15, .15, .20, .35, .60, .80, .85, .80, .70, .45, .20})});
  return c;
}

void PopulationConfig::validate() const
{
  for (const auto& a : tcas) {
    const std::string where = "population.tca." + a.name;
    if (a.count.min > a.count.max)
      throw ConfigError(where + ".count: min > max");
    check_range(where + ".resistance", a.resistance, true);
    check_range(where + ".capacitance", a.capacitance, true);
    check_range(where + ".rated_power", a.rated_power, true);
    check_range(where + ".efficiency", a.efficiency, true);
    check_range(where + ".setpoint", a.setpoint, false);
    check_range(where + ".deadband", a.deadband, true);
    check_range(where + ".setback", a.setback, false);
    if (a.setback.low < 0.0)
      throw ConfigError(where + ".setback: must be >= 0");
  }
  for (const auto& a : non_tcas) {
    const std::string where = "population.non_tca." + a.name;
    if (a.count.min > a.count.max)
      throw ConfigError(where + ".count: min > max");
    check_range(where + ".rated_power", a.rated_power, true);
    if (!a.profile)
      throw ConfigError(where + ".profile: missing");
    try {
      a.profile->validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ".profile: " + e.what());
    }
  }
}

namespace {

HouseSpec build_house(const PopulationConfig& config, std::uint64_t house_index,
                      std::uint32_t feeder_id)
{
  Sampler s(config.seed, feeder_id, house_index);

  HouseSpec house;
  house.house_id = house_index;

  for (std::size_t a = 0; a < config.tcas.size(); ++a) {
    const auto& arch = config.tcas[a];
    const std::string prefix = "tca/" + arch.name + "/";
    unsigned n = s.count(prefix + "count", arch.count);
    for (unsigned k = 0; k < n; ++k) {
      const std::string key = prefix + std::to_string(k) + "/";
      TcaSpec tca;
      tca.kind = arch.kind;
      tca.fixed_ambient = arch.fixed_ambient;
      tca.params.resistance = s.sample(key + "resistance", arch.resistance);
      tca.params.capacitance = s.sample(key + "capacitance", arch.capacitance);
      tca.params.rated_power = s.sample(key + "rated_power", arch.rated_power);
      tca.params.efficiency = s.sample(key + "efficiency", arch.efficiency);
      tca.params.mode = arch.mode;

      double setpoint = s.sample(key + "setpoint", arch.setpoint);
      double setback = s.sample(key + "setback", arch.setback);
      if (setback > 0.0) {
        // Night program 22:00-06:00, relaxed in the energy-saving direction.
        double night = arch.mode == ThermalMode::heating ? setpoint - setback : setpoint + setback;
        tca.thermostat.setpoints =
          SetpointSchedule({{0.0, night}, {6.0, setpoint}, {22.0, night}}, 24.0);
      } else {
        tca.thermostat.setpoints = SetpointSchedule(setpoint);
      }
      tca.thermostat.deadband = s.sample(key + "deadband", arch.deadband);

      Deadband band = tca.thermostat.band_at(0.0, arch.mode);
      tca.initial.temperature = band.lower + s.unit(key + "initial_temperature") * (band.upper - band.lower);
      tca.initial.is_on = s.unit(key + "initial_on") < 0.5;
      house.tcas.push_back(std::move(tca));
    }
  }

  for (const auto& arch : config.non_tcas) {
    const std::string prefix = "non_tca/" + arch.name + "/";
    unsigned n = s.count(prefix + "count", arch.count);
    for (unsigned k = 0; k < n; ++k) {
      const std::string key = prefix + std::to_string(k) + "/";
      NonTcaSpec spec;
      spec.rated_power = s.sample(key + "rated_power", arch.rated_power);
      spec.schedule = arch.profile;
      spec.stream_seed = s.bits(key + "stream");
      house.non_tcas.push_back(std::move(spec));
    }
  }
  return house;
}

} // namespace

HouseSpec generate_house(const PopulationConfig& config, std::uint64_t house_index,
                         std::uint32_t feeder_id)
{
  config.validate();
  return build_house(config, house_index, feeder_id);
}

FeederSpec generate_feeder(const PopulationConfig& config, std::uint32_t feeder_id,
                           std::size_t n_houses)
{
  config.validate();
  FeederSpec feeder;
  feeder.feeder_id = feeder_id;
  feeder.houses.reserve(n_houses);
  for (std::size_t i = 0; i < n_houses; ++i)
    feeder.houses.push_back(build_house(config, i, feeder_id));
  return feeder;
}

std::vector<std::uint8_t> encode_feeder(const FeederSpec& feeder)
{
  ByteWriter w;
  w.u32(feeder.feeder_id);
  w.str(feeder.weather_id);
  w.str(feeder.price_id);
  w.u64(feeder.houses.size());
  for (const auto& house : feeder.houses) {
    w.u64(house.house_id);
    w.u32(static_cast<std::uint32_t>(house.tcas.size()));
    for (const auto& t : house.tcas) {
      w.u8(static_cast<std::uint8_t>(t.kind));
      w.u8(static_cast<std::uint8_t>(t.params.mode));
      w.f64(t.params.resistance);
      w.f64(t.params.capacitance);
      w.f64(t.params.rated_power);
      w.f64(t.params.efficiency);
      w.f64(t.thermostat.deadband);
      w.f64(t.thermostat.setpoints.period());
      w.u32(static_cast<std::uint32_t>(t.thermostat.setpoints.changes().size()));
      for (const auto& c : t.thermostat.setpoints.changes()) {
        w.f64(c.hour);
        w.f64(c.setpoint);
      }
      w.f64(t.initial.temperature);
      w.u8(t.initial.is_on ? 1 : 0);
      w.u8(t.fixed_ambient ? 1 : 0);
      w.f64(t.fixed_ambient.value_or(0.0));
    }
    w.u32(static_cast<std::uint32_t>(house.non_tcas.size()));
    for (const auto& n : house.non_tcas) {
      w.f64(n.rated_power);
      w.u64(n.stream_seed);
      const auto& values = n.schedule ? n.schedule->values : std::vector<double>{};
      w.u8(n.schedule && n.schedule->periodic ? 1 : 0);
      w.u32(static_cast<std::uint32_t>(values.size()));
      for (double p : values)
        w.f64(p);
    }
  }
  return w.take();
}

} // namespace feedersim
