#pragma once

#include "feedersim/engine.hpp"
#include "feedersim/run_config.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

namespace feedersim::test {

inline SimulationConfig hourly_sim(std::size_t hours = 100, std::size_t price_changes = 3)
{
  SimulationConfig sim;
  sim.horizon_hours = static_cast<double>(hours);
  sim.weather[default_input_id] = synthetic_weather(hours);
  sim.prices[default_input_id] = synthetic_prices(hours, price_changes);
  return sim;
}

/// Forward Euler on dT/dt = (T_ss - T) / RC with a fixed step.
inline double euler_temperature(double t0, double t_ss, double rc, double dt, double h)
{
  double t = t0;
  const auto n = static_cast<long long>(std::llround(dt / h));
  for (long long i = 0; i < n; ++i)
    t += h * (t_ss - t) / rc;
  return t;
}

/// Fresh directory under the build tree's temp area, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& name)
    : path_(std::filesystem::temp_directory_path() / ("feedersim_" + name + "_" + std::to_string(::getpid())))
  {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i]))
      return false;
  return true;
}

} // namespace feedersim::test
