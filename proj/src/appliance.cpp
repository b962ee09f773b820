#include "feedersim/appliance.hpp"

#include "feedersim/hashing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace feedersim {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Edge at which the current phase ends: heating runs up to the upper edge,
// cooling down to the lower edge, and the idle phase drifts the other way.
double phase_target(const Deadband& band, ThermalMode mode, bool is_on)
{
  bool toward_upper = (mode == ThermalMode::heating) == is_on;
  return toward_upper ? band.upper : band.lower;
}

bool at_or_past(double temperature, const Deadband& band, ThermalMode mode, bool is_on)
{
  bool toward_upper = (mode == ThermalMode::heating) == is_on;
  return toward_upper ? temperature >= band.upper : temperature <= band.lower;
}

} // namespace

void ThermalParams::validate() const
{
  if (!positive_finite(resistance))
    throw std::invalid_argument("thermal resistance must be > 0");
  if (!positive_finite(capacitance))
    throw std::invalid_argument("thermal capacitance must be > 0");
  if (!positive_finite(rated_power))
    throw std::invalid_argument("rated power must be > 0");
  if (!positive_finite(efficiency))
    throw std::invalid_argument("conversion efficiency must be > 0");
}

SetpointSchedule::SetpointSchedule(double constant) : changes_{{0.0, constant}} {}

SetpointSchedule::SetpointSchedule(std::vector<SetpointChange> changes, double period_hours)
  : changes_(std::move(changes)), period_(period_hours)
{
  if (changes_.empty())
    throw std::invalid_argument("setpoint schedule needs at least one entry");
  if (!(period_ >= 0.0) || !std::isfinite(period_))
    throw std::invalid_argument("setpoint period must be >= 0");
  for (std::size_t i = 0; i < changes_.size(); ++i) {
    const auto& c = changes_[i];
    if (!std::isfinite(c.hour) || !std::isfinite(c.setpoint) || c.hour < 0.0)
      throw std::invalid_argument("setpoint entries must be finite with hour >= 0");
    if (i > 0 && !(c.hour > changes_[i - 1].hour))
      throw std::invalid_argument("setpoint hours must be strictly increasing");
    if (period_ > 0.0 && c.hour >= period_)
      throw std::invalid_argument("setpoint hour outside the schedule period");
  }
}

double SetpointSchedule::at(double hour) const
{
  double h = period_ > 0.0 ? std::fmod(hour, period_) : hour;
  auto it = std::upper_bound(changes_.begin(), changes_.end(), h,
                             [](double x, const SetpointChange& c) { return x < c.hour; });
  if (it == changes_.begin())
    return period_ > 0.0 ? changes_.back().setpoint : changes_.front().setpoint;
  return std::prev(it)->setpoint;
}

Deadband ThermostatConfig::band_at(double hour, ThermalMode mode, double price_offset) const
{
  double setpoint = setpoints.at(hour);
  setpoint += mode == ThermalMode::heating ? -price_offset : price_offset;
  return {setpoint - deadband / 2.0, setpoint + deadband / 2.0};
}

double steady_state_temperature(const ThermalParams& params, double ambient, bool is_on)
{
  if (!is_on)
    return ambient;
  double sign = params.mode == ThermalMode::heating ? 1.0 : -1.0;
  return ambient + sign * params.efficiency * params.rated_power * params.resistance;
}

double evolve_temperature(double t0, const ThermalParams& params, double ambient, bool is_on,
                          double dt)
{
  if (!(dt >= 0.0))
    throw std::invalid_argument("evolve_temperature: dt must be >= 0");
  double t_ss = steady_state_temperature(params, ambient, is_on);
  return t_ss + (t0 - t_ss) * std::exp(-dt / params.time_constant());
}

std::optional<double> next_inflection_time(double t0, double target, const ThermalParams& params,
                                           double ambient, bool is_on)
{
  if (t0 == target)
    return 0.0;
  double t_ss = steady_state_temperature(params, ambient, is_on);
  // Reachable only when target lies strictly between the start and the asymptote.
  bool between = (t0 < target && target < t_ss) || (t_ss < target && target < t0);
  if (!between)
    return std::nullopt;
  return params.time_constant() * std::log((t0 - t_ss) / (target - t_ss));
}

TcaStepResult tca_step(TcaState state, const ThermalParams& params, Deadband band, double ambient,
                       double dt)
{
  if (!(dt > 0.0))
    throw std::invalid_argument("tca_step: dt must be > 0");

  double remaining = dt;
  double on_time = 0.0;
  while (remaining > 0.0) {
    if (at_or_past(state.temperature, band, params.mode, state.is_on)) {
      state.is_on = !state.is_on;
      if (at_or_past(state.temperature, band, params.mode, state.is_on))
        break; // inverted band; cannot happen for deadband > 0
    }
    double target = phase_target(band, params.mode, state.is_on);
    auto crossing = next_inflection_time(state.temperature, target, params, ambient, state.is_on);
    if (!crossing || *crossing >= remaining) {
      state.temperature =
        evolve_temperature(state.temperature, params, ambient, state.is_on, remaining);
      if (state.is_on)
        on_time += remaining;
      remaining = 0.0;
      break;
    }
    if (state.is_on)
      on_time += *crossing;
    remaining -= *crossing;
    state.temperature = target;
    state.is_on = !state.is_on;
  }

  TcaStepResult out;
  out.state = state;
  out.energy = params.rated_power * on_time;
  out.mean_power = out.energy / dt;
  return out;
}

TcaStepResult tca_step(TcaState state, const ThermalParams& params, const ThermostatConfig& config,
                       double ambient, double start_hour, double dt, double price_offset)
{
  return tca_step(state, params, config.band_at(start_hour, params.mode, price_offset), ambient,
                  dt);
}

double ProbabilitySchedule::at(std::size_t step_index) const
{
  if (values.empty())
    throw std::out_of_range("probability schedule is empty");
  if (periodic)
    return values[step_index % values.size()];
  if (step_index >= values.size())
    throw std::out_of_range("step " + std::to_string(step_index) +
                            " outside probability schedule of length " +
                            std::to_string(values.size()));
  return values[step_index];
}

void ProbabilitySchedule::validate() const
{
  if (values.empty())
    throw std::invalid_argument("probability schedule is empty");
  for (double p : values)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("on-probability outside [0, 1]");
}

NonTcaStepResult non_tca_step(const NonTcaSpec& spec, std::size_t step_index, double random_draw,
                              double dt)
{
  if (!spec.schedule)
    throw std::invalid_argument("non-TCA without a probability schedule");
  double p = spec.schedule->at(step_index);
  NonTcaStepResult out;
  out.is_on = random_draw < p;
  out.mean_power = out.is_on ? spec.rated_power : 0.0;
  out.energy = out.mean_power * dt;
  return out;
}

double non_tca_draw(const NonTcaSpec& spec, std::size_t step_index) noexcept
{
  return stream_uniform(spec.stream_seed, step_index);
}

} // namespace feedersim
