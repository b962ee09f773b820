#include "feedersim/io.hpp"

#include "feedersim/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace feedersim {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view text, T& out)
{
  if (text.empty())
    return false;
  if (text.front() == '+')
    text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::ifstream open_input(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

// Reads an hourly two-column series; `check` validates a value and returns an
// error message or empty.
template <class Check>
std::vector<double> load_hourly(const std::filesystem::path& path, std::string_view value_column,
                                Check check)
{
  auto in = open_input(path);
  const std::string file = path.string();
  const std::string expected_header = "hour," + std::string(value_column);

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cols = split(line);
    if (cols.size() != 2 || cols[0] != "hour" || cols[1] != value_column)
      throw ParseError(file, line_no, "missing header '" + expected_header + "'");
    have_header = true;
    break;
  }
  if (!have_header)
    throw ParseError(file, line_no, "missing header '" + expected_header + "'");

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cols = split(line);
    if (cols.size() != 2)
      throw ParseError(file, line_no, "expected 2 columns, found " + std::to_string(cols.size()));
    long long hour = 0;
    if (!parse_number(cols[0], hour))
      throw ParseError(file, line_no, "non-integer hour '" + std::string(cols[0]) + "'");
    if (hour != static_cast<long long>(values.size()))
      throw ParseError(file, line_no,
                       "non-consecutive hour: expected " + std::to_string(values.size()) +
                         ", found " + std::to_string(hour));
    double v = 0.0;
    if (!parse_number(cols[1], v) || !std::isfinite(v))
      throw ParseError(file, line_no,
                       "non-numeric " + std::string(value_column) + " '" + std::string(cols[1]) + "'");
    if (std::string err = check(v); !err.empty())
      throw ParseError(file, line_no, err);
    values.push_back(v);
  }
  if (values.empty())
    throw ParseError(file, line_no, "no records");
  return values;
}

std::ofstream open_output(const std::filesystem::path& path)
{
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_series(const std::filesystem::path& path, std::string_view header,
                  std::span<const LoadSeries> series, const SimulationConfig& sim)
{
  std::vector<const LoadSeries*> sorted;
  for (const auto& s : series)
    sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const LoadSeries* a, const LoadSeries* b) { return a->id < b->id; });

  auto out = open_output(path);
  std::string buffer;
  buffer.append(header).push_back('\n');
  const std::size_t n = sim.steps();
  for (std::size_t t = 0; t < n; ++t) {
    const std::string hour = format_double(sim.start_hour(t));
    for (const LoadSeries* s : sorted) {
      buffer.append(hour).push_back(',');
      buffer.append(std::to_string(s->id)).push_back(',');
      buffer.append(format_double(s->values.at(t))).push_back('\n');
    }
    if (buffer.size() > (1u << 20)) {
      out << buffer;
      buffer.clear();
    }
  }
  out << buffer;
  if (!out.flush())
    throw std::runtime_error("write failed: " + path.string());
}

} // namespace

WeatherTape load_weather(const std::filesystem::path& path)
{
  return {load_hourly(path, "temperature_c", [](double) { return std::string(); })};
}

PriceSeries load_prices(const std::filesystem::path& path)
{
  return {load_hourly(path, "price", [](double p) {
    return p < 0.0 ? std::string("negative price") : std::string();
  })};
}

std::vector<std::size_t> price_change_points(const PriceSeries& prices)
{
  std::vector<std::size_t> out;
  for (std::size_t h = 1; h < prices.price.size(); ++h)
    if (prices.price[h] != prices.price[h - 1])
      out.push_back(h);
  return out;
}

std::string format_double(double value)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{})
    throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_results(const std::filesystem::path& path, std::span<const LoadSeries> feeders,
                   const SimulationConfig& sim)
{
  write_series(path, "hour,feeder_id,p_l_kw", feeders, sim);
}

void write_house_results(const std::filesystem::path& path, std::span<const LoadSeries> houses,
                         const SimulationConfig& sim)
{
  write_series(path, "hour,house_id,p_h_kw", houses, sim);
}

ResultsTable read_results(const std::filesystem::path& path)
{
  auto in = open_input(path);
  const std::string file = path.string();
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line))
    throw ParseError(file, 1, "missing header");
  ++line_no;
  auto header = split(line);
  if (header.size() != 3 || header[0] != "hour")
    throw ParseError(file, line_no, "unexpected header");
  LoadRole role = header[1] == "house_id" ? LoadRole::household : LoadRole::feeder_head;

  ResultsTable table;
  std::map<std::uint64_t, std::vector<double>> by_id;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto cols = split(line);
    double hour = 0.0;
    std::uint64_t id = 0;
    double value = 0.0;
    if (cols.size() != 3 || !parse_number(cols[0], hour) || !parse_number(cols[1], id) ||
        !parse_number(cols[2], value))
      throw ParseError(file, line_no, "malformed row");
    if (table.hours.empty() || table.hours.back() != hour)
      table.hours.push_back(hour);
    by_id[id].push_back(value);
  }
  for (auto& [id, values] : by_id)
    table.series.push_back({role, id, std::move(values)});
  return table;
}

} // namespace feedersim
