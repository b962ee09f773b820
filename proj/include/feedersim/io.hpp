#pragma once

#include "feedersim/engine.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace feedersim {

/// CSV with header `hour,temperature_c`; hours 0, 1, 2, ... consecutive.
WeatherTape load_weather(const std::filesystem::path& path);

/// CSV with header `hour,price`; prices must be >= 0.
PriceSeries load_prices(const std::filesystem::path& path);

/// Hours h > 0 whose price differs from hour h - 1.
std::vector<std::size_t> price_change_points(const PriceSeries& prices);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// `hour,feeder_id,p_l_kw`, hour-major, feeders in ascending id.
void write_results(const std::filesystem::path& path, std::span<const LoadSeries> feeders,
                   const SimulationConfig& sim);

/// `hour,house_id,p_h_kw` for the houses of one feeder.
void write_house_results(const std::filesystem::path& path, std::span<const LoadSeries> houses,
                         const SimulationConfig& sim);

struct ResultsTable {
  std::vector<double> hours;      // distinct hours in file order
  std::vector<LoadSeries> series; // one per id, ascending id
};

/// Parse a file written by write_results / write_house_results.
ResultsTable read_results(const std::filesystem::path& path);

} // namespace feedersim
