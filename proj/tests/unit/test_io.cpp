#include "feedersim/errors.hpp"
#include "feedersim/io.hpp"

#include "support.hpp"

using namespace feedersim;
using test::TempDir;

namespace {

const std::filesystem::path data_dir = FEEDERSIM_TEST_DATA;

void expect_parse_error(const std::filesystem::path& path, std::size_t line, const std::string& fragment)
{
  try {
    load_weather(path);
    FAIL() << "expected a parse error for " << path;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

} // namespace

TEST(LoadWeather, HundredHours)
{
  auto tape = load_weather(data_dir / "weather_100h.csv");
  EXPECT_EQ(tape.temperature_c.size(), 100u);
}

TEST(LoadWeather, DistinctErrors)
{
  expect_parse_error(data_dir / "weather_empty.csv", 1, "no records");
  expect_parse_error(data_dir / "weather_gap.csv", 4, "non-consecutive hour");
  expect_parse_error(data_dir / "weather_no_header.csv", 1, "missing header");
  expect_parse_error(data_dir / "weather_text.csv", 3, "non-numeric");
  EXPECT_THROW(load_weather(data_dir / "absent.csv"), ParseError);
}

TEST(LoadPrices, ChangePoints)
{
  EXPECT_TRUE(price_change_points(load_prices(data_dir / "prices_constant.csv")).empty());
  EXPECT_EQ(price_change_points(load_prices(data_dir / "prices_3changes.csv")),
            (std::vector<std::size_t>{10, 20, 30}));
}

TEST(LoadPrices, NegativePriceNamesLine)
{
  try {
    load_prices(data_dir / "prices_negative.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("negative price"), std::string::npos);
  }
}

TEST(WriteResults, RowsAndRoundTrip)
{
  TempDir dir("io_roundtrip");
  const auto sim = test::hourly_sim();
  auto feeder = generate_feeder(PopulationConfig::defaults(42), 0, 10);
  auto r = simulate_feeder(feeder, sim, true);
  write_results(dir / "results.csv", std::span(&r.feeder, 1), sim);
  write_house_results(dir / "houses.csv", r.houses, sim);

  auto table = read_results(dir / "results.csv");
  ASSERT_EQ(table.hours.size(), 100u);
  ASSERT_EQ(table.series.size(), 1u);
  EXPECT_TRUE(test::bit_equal(table.series[0].values, r.feeder.values));

  auto houses = read_results(dir / "houses.csv");
  ASSERT_EQ(houses.series.size(), 10u);
  std::size_t rows = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_TRUE(test::bit_equal(houses.series[i].values, r.houses[i].values));
    rows += houses.series[i].values.size();
  }
  EXPECT_EQ(rows, 1000u);

  auto text = test::read_file(dir / "results.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "hour,feeder_id,p_l_kw");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 101);
}

TEST(WriteResults, FeedersInAscendingIdOrder)
{
  TempDir dir("io_order");
  auto sim = test::hourly_sim(2);
  std::vector<LoadSeries> s = {{LoadRole::feeder_head, 5, {1.0, 2.0}}, {LoadRole::feeder_head, 1, {3.0, 4.0}}};
  write_results(dir / "r.csv", s, sim);
  EXPECT_EQ(test::read_file(dir / "r.csv"), "hour,feeder_id,p_l_kw\n0,1,3\n0,5,1\n1,1,4\n1,5,2\n");
}

TEST(WriteResults, UnwritablePath)
{
  auto sim = test::hourly_sim(2);
  std::vector<LoadSeries> s = {{LoadRole::feeder_head, 0, {1.0, 2.0}}};
  EXPECT_ANY_THROW(write_results("/proc/feedersim/forbidden.csv", s, sim));
}

TEST(FormatDouble, ShortestRoundTrip)
{
  for (double v : {0.1, 1.0 / 3.0, 8737.23650298993, 1e-300, 123456789.125}) {
    auto text = format_double(v);
    EXPECT_EQ(std::stod(text), v) << text;
  }
}
