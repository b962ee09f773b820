#pragma once

#include "feedersim/appliance.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace feedersim {

enum class TcaKind : std::uint8_t { hvac, water_heater, refrigerator };

std::string_view to_string(TcaKind kind) noexcept;

struct TcaSpec {
  TcaKind kind = TcaKind::hvac;
  ThermalParams params;
  ThermostatConfig thermostat;
  TcaState initial;
  std::optional<double> fixed_ambient; // indoor appliances; nullopt follows the weather tape
};

struct HouseSpec {
  std::uint64_t house_id = 0;
  std::vector<TcaSpec> tcas;
  std::vector<NonTcaSpec> non_tcas;
};

inline const std::string default_input_id = "default";

struct FeederSpec {
  std::uint32_t feeder_id = 0;
  std::vector<HouseSpec> houses;
  std::string weather_id = default_input_id;
  std::string price_id = default_input_id;
};

struct Range {
  double low = 0.0;
  double high = 0.0;

  static Range point(double v) { return {v, v}; }
  double sample(double unit) const { return low + unit * (high - low); }
  double midpoint() const { return low + 0.5 * (high - low); }
};

struct CountRange {
  unsigned min = 0;
  unsigned max = 0;
};

struct TcaArchetype {
  std::string name;
  TcaKind kind = TcaKind::hvac;
  ThermalMode mode = ThermalMode::heating;
  std::optional<double> fixed_ambient;
  CountRange count{1, 1};
  Range resistance;
  Range capacitance;
  Range rated_power;
  Range efficiency{1.0, 1.0};
  Range setpoint;
  Range deadband;
  Range setback{0.0, 0.0}; // night setback depth, degC; 0 gives a constant setpoint
};

struct NonTcaArchetype {
  std::string name;
  CountRange count{1, 1};
  Range rated_power;
  std::shared_ptr<const ProbabilitySchedule> profile;
};

/// Sampling ranges for synthetic houses. Every sample is a pure function of
/// (seed, feeder id, house index, parameter name).
struct PopulationConfig {
  std::uint64_t seed = 0;
  std::vector<TcaArchetype> tcas;
  std::vector<NonTcaArchetype> non_tcas;

  /// HVAC, water heater and refrigerator plus five stochastic appliances.
  static PopulationConfig defaults(std::uint64_t seed);

  /// Throws ConfigError on an inverted range or a non-physical bound.
  void validate() const;
};

HouseSpec generate_house(const PopulationConfig& config, std::uint64_t house_index,
                         std::uint32_t feeder_id = 0);

FeederSpec generate_feeder(const PopulationConfig& config, std::uint32_t feeder_id,
                           std::size_t n_houses);

/// Little-endian byte serialization of a feeder; equal bytes iff equal specs.
std::vector<std::uint8_t> encode_feeder(const FeederSpec& feeder);

} // namespace feedersim
