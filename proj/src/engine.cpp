#include "feedersim/engine.hpp"

#include "feedersim/errors.hpp"
#include "feedersim/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace feedersim {

void PriceResponseConfig::validate() const
{
  if (reference_price == 0.0 || !std::isfinite(reference_price))
    throw ConfigError("price_response.reference_price must be non-zero");
  if (!std::isfinite(slope))
    throw ConfigError("price_response.slope must be finite");
  if (!(max_offset >= 0.0) || !std::isfinite(max_offset))
    throw ConfigError("price_response.max_offset must be >= 0");
}

double price_offset(const PriceResponseConfig& config, double price)
{
  config.validate();
  if (!(price >= 0.0))
    throw std::invalid_argument("price_offset: price must be >= 0");
  double raw = config.slope * (price - config.reference_price) / config.reference_price;
  return std::clamp(raw, -config.max_offset, config.max_offset);
}

std::size_t SimulationConfig::steps() const
{
  if (!(horizon_hours > 0.0) || !(step_hours > 0.0))
    throw ConfigError("horizon and step must be > 0");
  double n = horizon_hours / step_hours;
  double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n) || rounded < 1.0)
    throw ConfigError("horizon must be a whole number of steps");
  return static_cast<std::size_t>(rounded);
}

std::size_t SimulationConfig::input_hour(std::size_t step) const
{
  // Tolerate representation error in step * step_hours landing just below an integer.
  return static_cast<std::size_t>(std::floor(start_hour(step) + 1e-9));
}

const WeatherTape& SimulationConfig::weather_for(const std::string& id) const
{
  auto it = weather.find(id);
  if (it == weather.end())
    throw ConfigError("no weather tape with id '" + id + "'");
  return it->second;
}

const PriceSeries& SimulationConfig::prices_for(const std::string& id) const
{
  auto it = prices.find(id);
  if (it == prices.end())
    throw ConfigError("no price series with id '" + id + "'");
  return it->second;
}

double SimulationConfig::price_at(const std::string& price_id, std::size_t step) const
{
  return prices_for(price_id).price.at(input_hour(step));
}

std::vector<std::size_t> SimulationConfig::price_change_steps(const std::string& price_id) const
{
  std::vector<std::size_t> changes;
  const std::size_t n = steps();
  for (std::size_t s = 1; s < n; ++s)
    if (price_at(price_id, s) != price_at(price_id, s - 1))
      changes.push_back(s);
  return changes;
}

void SimulationConfig::validate() const
{
  const std::size_t n = steps();
  const std::size_t needed = input_hour(n - 1) + 1;
  for (const auto& [id, tape] : weather) {
    if (tape.temperature_c.size() < needed)
      throw ConfigError("weather '" + id + "' covers " + std::to_string(tape.temperature_c.size()) +
                        " h, horizon needs " + std::to_string(needed));
    for (double t : tape.temperature_c)
      if (!std::isfinite(t))
        throw ConfigError("weather '" + id + "' has a non-finite temperature");
  }
  for (const auto& [id, series] : prices) {
    if (series.price.size() < needed)
      throw ConfigError("prices '" + id + "' covers " + std::to_string(series.price.size()) +
                        " h, horizon needs " + std::to_string(needed));
    for (double p : series.price)
      if (!(p >= 0.0) || !std::isfinite(p))
        throw ConfigError("prices '" + id + "' has a negative or non-finite price");
  }
  if (price_response)
    price_response->validate();
}

void SimulationConfig::validate_for(const FeederSpec& feeder) const
{
  validate();
  weather_for(feeder.weather_id);
  prices_for(feeder.price_id);
}

StepInputs make_step_inputs(const SimulationConfig& sim, const FeederSpec& feeder,
                            std::size_t step, double price)
{
  StepInputs in;
  in.step = step;
  in.start_hour = sim.start_hour(step);
  in.dt = sim.step_hours;
  in.outdoor_temperature = sim.weather_for(feeder.weather_id).temperature_c.at(sim.input_hour(step));
  in.price_offset = sim.price_response ? price_offset(*sim.price_response, price) : 0.0;
  return in;
}

HouseState HouseState::initial(const HouseSpec& house)
{
  HouseState state;
  state.tcas.reserve(house.tcas.size());
  for (const auto& t : house.tcas)
    state.tcas.push_back(t.initial);
  return state;
}

namespace {

double tca_power(const TcaSpec& tca, TcaState& state, const StepInputs& in)
{
  double ambient = tca.fixed_ambient.value_or(in.outdoor_temperature);
  auto r = tca_step(state, tca.params, tca.thermostat, ambient, in.start_hour, in.dt,
                    in.price_offset);
  state = r.state;
  return r.mean_power;
}

} // namespace

double simulate_house_step(const HouseSpec& house, HouseState& state, const StepInputs& in)
{
  if (state.tcas.size() != house.tcas.size())
    throw std::invalid_argument("house state does not match house spec");
  double p_h = 0.0;
  for (std::size_t i = 0; i < house.tcas.size(); ++i)
    p_h += tca_power(house.tcas[i], state.tcas[i], in);
  for (const auto& appliance : house.non_tcas) {
    auto r = non_tca_step(appliance, in.step, non_tca_draw(appliance, in.step), in.dt);
    p_h += r.mean_power;
  }
  return p_h;
}

FeederEngine::FeederEngine(const FeederSpec& feeder) : feeder_(&feeder)
{
  const auto& houses = feeder.houses;
  tca_begin_.reserve(houses.size() + 1);
  non_tca_begin_.reserve(houses.size() + 1);
  std::unordered_map<const ProbabilitySchedule*, std::uint32_t> slots;
  std::unordered_set<std::uint64_t> ids;

  for (const auto& house : houses) {
    if (!ids.insert(house.house_id).second)
      throw ConfigError("duplicate house_id " + std::to_string(house.house_id) + " in feeder " +
                        std::to_string(feeder.feeder_id));
    tca_begin_.push_back(tca_state_.size());
    for (const auto& t : house.tcas) {
      t.params.validate();
      if (!(t.thermostat.deadband > 0.0))
        throw ConfigError("thermostat deadband must be > 0");
      tca_state_.push_back(t.initial);
    }
    non_tca_begin_.push_back(seeds_.size());
    for (const auto& n : house.non_tcas) {
      if (!n.schedule)
        throw ConfigError("non-TCA without a probability schedule");
      auto [it, inserted] = slots.try_emplace(n.schedule.get(),
                                              static_cast<std::uint32_t>(slot_schedule_.size()));
      if (inserted) {
        n.schedule->validate();
        slot_schedule_.push_back(n.schedule.get());
      }
      seeds_.push_back(n.stream_seed);
      slot_.push_back(it->second);
      rated_.push_back(n.rated_power);
    }
  }
  tca_begin_.push_back(tca_state_.size());
  non_tca_begin_.push_back(seeds_.size());
  non_tca_power_.assign(seeds_.size(), 0.0);

  order_.resize(houses.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!std::is_sorted(houses.begin(), houses.end(),
                      [](const auto& a, const auto& b) { return a.house_id < b.house_id; }))
    std::sort(order_.begin(), order_.end(),
              [&](std::size_t a, std::size_t b) { return houses[a].house_id < houses[b].house_id; });
}

void FeederEngine::advance(std::size_t begin, std::size_t end, const StepInputs& in,
                           std::span<double> p_h)
{
  if (begin > end || end > house_count() || p_h.size() < house_count())
    throw std::out_of_range("FeederEngine::advance: bad house range");
  if (begin == end)
    return;

  std::vector<double> slot_probability(slot_schedule_.size());
  for (std::size_t s = 0; s < slot_schedule_.size(); ++s)
    slot_probability[s] = slot_schedule_[s]->at(in.step);

  const std::size_t first = non_tca_begin_[begin];
  const std::size_t last = non_tca_begin_[end];
  kernels::NonTcaBatch batch{std::span(seeds_).subspan(first, last - first),
                             std::span(slot_).subspan(first, last - first),
                             std::span(rated_).subspan(first, last - first)};
  kernels::non_tca_power(batch, slot_probability, in.step,
                         std::span(non_tca_power_).subspan(first, last - first));

  const auto& houses = feeder_->houses;
  for (std::size_t h = begin; h < end; ++h) {
    const auto& tcas = houses[h].tcas;
    TcaState* state = tca_state_.data() + tca_begin_[h];
    double sum = 0.0;
    for (std::size_t i = 0; i < tcas.size(); ++i)
      sum += tca_power(tcas[i], state[i], in);
    for (std::size_t k = non_tca_begin_[h]; k < non_tca_begin_[h + 1]; ++k)
      sum += non_tca_power_[k];
    p_h[h] = sum;
  }
}

double FeederEngine::reduce(std::span<const double> p_h) const
{
  double total = 0.0;
  for (std::size_t pos : order_)
    total += p_h[pos];
  return total;
}

FeederSimulation::FeederSimulation(const FeederSpec& feeder, const SimulationConfig& sim,
                                   bool record_houses)
  : feeder_(&feeder), sim_(&sim), engine_(feeder), p_h_(feeder.houses.size(), 0.0),
    record_houses_(record_houses)
{
  sim.validate_for(feeder);
  if (record_houses_)
    house_series_.assign(feeder.houses.size(), std::vector<double>(sim.steps(), 0.0));
}

double FeederSimulation::step(std::size_t step, double price)
{
  StepInputs in = make_step_inputs(*sim_, *feeder_, step, price);
  engine_.advance(0, engine_.house_count(), in, p_h_);
  if (record_houses_)
    for (std::size_t h = 0; h < p_h_.size(); ++h)
      house_series_[h][step] = p_h_[h];
  return engine_.reduce(p_h_);
}

std::vector<LoadSeries> house_load_series(const FeederSpec& feeder,
                                          std::span<const std::size_t> id_order,
                                          const std::vector<std::vector<double>>& by_position)
{
  std::vector<LoadSeries> out;
  out.reserve(id_order.size());
  for (std::size_t pos : id_order)
    out.push_back({LoadRole::household, feeder.houses[pos].house_id, by_position[pos]});
  return out;
}

FeederResult simulate_feeder(const FeederSpec& feeder, const SimulationConfig& sim, bool per_house)
{
  FeederSimulation run(feeder, sim, per_house);
  const std::size_t n = sim.steps();
  FeederResult result;
  result.feeder.role = LoadRole::feeder_head;
  result.feeder.id = feeder.feeder_id;
  result.feeder.values.resize(n);
  for (std::size_t s = 0; s < n; ++s)
    result.feeder.values[s] = run.step(s, sim.price_at(feeder.price_id, s));
  if (per_house) {
    result.houses = house_load_series(feeder, run.id_order(), run.house_series());
  }
  return result;
}

LoadSeries sum_feeders(std::span<const LoadSeries> feeders)
{
  LoadSeries total;
  total.role = LoadRole::feeder_head;
  if (feeders.empty())
    return total;
  std::vector<const LoadSeries*> sorted;
  for (const auto& f : feeders)
    sorted.push_back(&f);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const LoadSeries* a, const LoadSeries* b) { return a->id < b->id; });
  const std::size_t n = sorted.front()->values.size();
  total.values.assign(n, 0.0);
  for (const LoadSeries* f : sorted) {
    if (f->values.size() != n)
      throw std::invalid_argument("sum_feeders: series lengths differ");
    for (std::size_t t = 0; t < n; ++t)
      total.values[t] += f->values[t];
  }
  return total;
}

} // namespace feedersim
