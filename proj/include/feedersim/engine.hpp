#pragma once

#include "feedersim/appliance.hpp"
#include "feedersim/population.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace feedersim {

/// Hourly outdoor temperature, degC. Entry h covers [h, h+1).
struct WeatherTape {
  std::vector<double> temperature_c;
};

/// Hourly market price, currency/MWh.
struct PriceSeries {
  std::vector<double> price;
};

/// Clamped linear setpoint relaxation in response to price.
struct PriceResponseConfig {
  double reference_price = 50.0;
  double slope = 0.0;      // degC per unit relative price deviation
  double max_offset = 0.0; // degC

  void validate() const;
};

/// Setpoint offset for price `price`; positive offsets save energy.
double price_offset(const PriceResponseConfig& config, double price);

struct SimulationConfig {
  double horizon_hours = 100.0;
  double step_hours = 1.0;
  std::map<std::string, WeatherTape> weather;
  std::map<std::string, PriceSeries> prices;
  std::optional<PriceResponseConfig> price_response;

  std::size_t steps() const;
  double start_hour(std::size_t step) const { return static_cast<double>(step) * step_hours; }

  /// Index into the hourly input tapes for `step`.
  std::size_t input_hour(std::size_t step) const;

  const WeatherTape& weather_for(const std::string& id) const;
  const PriceSeries& prices_for(const std::string& id) const;

  double price_at(const std::string& price_id, std::size_t step) const;

  /// Steps s > 0 whose price differs from step s - 1.
  std::vector<std::size_t> price_change_steps(const std::string& price_id) const;

  /// Throws ConfigError when the horizon is not a whole number of steps or
  /// any tape is too short or a price is negative.
  void validate() const;

  /// validate() plus: every input id a feeder references exists.
  void validate_for(const FeederSpec& feeder) const;
};

enum class LoadRole : std::uint8_t { household, feeder_head };

struct LoadSeries {
  LoadRole role = LoadRole::feeder_head;
  std::uint64_t id = 0;
  std::vector<double> values; // kW, mean over each step
};

/// Everything one step of one feeder needs besides the appliance state.
struct StepInputs {
  std::size_t step = 0;
  double start_hour = 0.0;
  double dt = 1.0;
  double outdoor_temperature = 0.0;
  double price_offset = 0.0;
};

StepInputs make_step_inputs(const SimulationConfig& sim, const FeederSpec& feeder,
                            std::size_t step, double price);

struct HouseState {
  std::vector<TcaState> tcas;

  static HouseState initial(const HouseSpec& house);
};

/// Advance one house across one step; returns P_H, the house's mean power.
double simulate_house_step(const HouseSpec& house, HouseState& state, const StepInputs& in);

/// Flattened, mutable state of every house of one feeder. `advance` may be
/// called concurrently for disjoint house ranges.
class FeederEngine {
public:
  explicit FeederEngine(const FeederSpec& feeder);

  std::size_t house_count() const noexcept { return feeder_->houses.size(); }
  const FeederSpec& spec() const noexcept { return *feeder_; }

  /// P_H for houses [begin, end) into `p_h[begin..end)` (house position, not id).
  void advance(std::size_t begin, std::size_t end, const StepInputs& in, std::span<double> p_h);

  /// P_L: houses summed in ascending house_id order.
  double reduce(std::span<const double> p_h) const;

  /// House positions in ascending id order.
  std::span<const std::size_t> id_order() const noexcept { return order_; }

private:
  const FeederSpec* feeder_;
  std::vector<std::size_t> tca_begin_;
  std::vector<TcaState> tca_state_;
  std::vector<std::size_t> non_tca_begin_;
  std::vector<std::uint64_t> seeds_;
  std::vector<std::uint32_t> slot_;
  std::vector<double> rated_;
  std::vector<double> non_tca_power_;
  std::vector<const ProbabilitySchedule*> slot_schedule_;
  std::vector<std::size_t> order_;
};

/// Step-at-a-time driver of one feeder, with the price supplied per step.
class FeederSimulation {
public:
  FeederSimulation(const FeederSpec& feeder, const SimulationConfig& sim,
                   bool record_houses = false);

  /// Simulate `step` under `price`; returns P_L.
  double step(std::size_t step, double price);

  const std::vector<std::vector<double>>& house_series() const noexcept { return house_series_; }
  std::span<const std::size_t> id_order() const noexcept { return engine_.id_order(); }

private:
  const FeederSpec* feeder_;
  const SimulationConfig* sim_;
  FeederEngine engine_;
  std::vector<double> p_h_;
  bool record_houses_;
  std::vector<std::vector<double>> house_series_; // [house position][step]
};

struct FeederResult {
  LoadSeries feeder;
  std::vector<LoadSeries> houses; // empty unless requested, ascending id
};

/// Sequential reference run of one feeder.
FeederResult simulate_feeder(const FeederSpec& feeder, const SimulationConfig& sim,
                             bool per_house = false);

/// Per-house series in ascending id order from a recorded simulation.
std::vector<LoadSeries> house_load_series(const FeederSpec& feeder,
                                          std::span<const std::size_t> id_order,
                                          const std::vector<std::vector<double>>& by_position);

/// Step-wise sum of feeder series in ascending feeder-id order.
LoadSeries sum_feeders(std::span<const LoadSeries> feeders);

} // namespace feedersim
