#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace feedersim {

enum class ThermalMode : std::uint8_t { heating, cooling };

/// First-order equivalent-thermal-parameter model of one thermostatically
/// controlled appliance. Units: R in degC/kW, C in kWh/degC, power in kW.
struct ThermalParams {
  double resistance = 1.0;
  double capacitance = 1.0;
  double rated_power = 1.0;
  double efficiency = 1.0; // COP: heat moved per kW of electricity
  ThermalMode mode = ThermalMode::heating;

  double time_constant() const noexcept { return resistance * capacitance; }

  /// Throws std::invalid_argument unless every field is strictly positive and finite.
  void validate() const;
};

struct SetpointChange {
  double hour;
  double setpoint;
};

/// Piecewise-constant setpoint sequence. With a non-zero period the sequence
/// repeats (a daily thermostat program); otherwise the last value holds.
class SetpointSchedule {
public:
  SetpointSchedule() = default;
  explicit SetpointSchedule(double constant);
  SetpointSchedule(std::vector<SetpointChange> changes, double period_hours);

  double at(double hour) const;

  const std::vector<SetpointChange>& changes() const noexcept { return changes_; }
  double period() const noexcept { return period_; }

private:
  std::vector<SetpointChange> changes_{{0.0, 20.0}};
  double period_ = 0.0;
};

struct Deadband {
  double lower;
  double upper;
};

struct ThermostatConfig {
  SetpointSchedule setpoints;
  double deadband = 1.0; // full width, degC

  /// Band around the setpoint active at `hour`. A positive `price_offset`
  /// relaxes the setpoint in the direction that saves energy.
  Deadband band_at(double hour, ThermalMode mode, double price_offset = 0.0) const;
};

struct TcaState {
  double temperature = 20.0;
  bool is_on = false;
};

struct TcaStepResult {
  TcaState state;
  double energy = 0.0;     // kWh
  double mean_power = 0.0; // kW
};

double steady_state_temperature(const ThermalParams& params, double ambient, bool is_on);

/// Exact solution of dT/dt = (T_ss - T) / (R C) after `dt` hours.
double evolve_temperature(double t0, const ThermalParams& params, double ambient, bool is_on,
                          double dt);

/// Time until the trajectory from `t0` reaches `target`, or nullopt when it never does.
std::optional<double> next_inflection_time(double t0, double target, const ThermalParams& params,
                                           double ambient, bool is_on);

/// Advance one appliance across a step of `dt` hours under constant ambient,
/// toggling at every band-edge crossing inside the step.
TcaStepResult tca_step(TcaState state, const ThermalParams& params, Deadband band, double ambient,
                       double dt);

TcaStepResult tca_step(TcaState state, const ThermalParams& params, const ThermostatConfig& config,
                       double ambient, double start_hour, double dt, double price_offset = 0.0);

/// Per-step on-probabilities. A periodic schedule wraps around (daily profiles).
struct ProbabilitySchedule {
  std::vector<double> values;
  bool periodic = false;

  double at(std::size_t step_index) const;
  void validate() const;
};

struct NonTcaSpec {
  double rated_power = 1.0; // kW
  std::shared_ptr<const ProbabilitySchedule> schedule;
  std::uint64_t stream_seed = 0;
};

struct NonTcaStepResult {
  bool is_on = false;
  double energy = 0.0;
  double mean_power = 0.0;
};

NonTcaStepResult non_tca_step(const NonTcaSpec& spec, std::size_t step_index, double random_draw,
                              double dt);

/// The appliance's own draw for `step_index`; independent of every other appliance.
double non_tca_draw(const NonTcaSpec& spec, std::size_t step_index) noexcept;

} // namespace feedersim
