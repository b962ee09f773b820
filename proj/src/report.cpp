#include "feedersim/bench.hpp"

#include "feedersim/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace feedersim {

namespace {

std::ofstream open_report_file(const std::filesystem::path& path)
{
  std::error_code ec;
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string csv_field(const std::string& text)
{
  if (text.find_first_of(",\"\n") == std::string::npos)
    return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"')
      quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string hex(std::uint64_t v)
{
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

std::string fixed(double v, int digits)
{
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << v;
  return out.str();
}

struct ReferenceRow {
  const char* workers;
  const char* houses;
  const char* cpu_s;
  const char* wall_s;
};

// Published timings, reference only.
std::vector<ReferenceRow> reference_rows(ExperimentKind kind)
{
  switch (kind) {
  case ExperimentKind::linear_growth:
    return {{"1", "10000", "0.42", "5.28"},
            {"1", "100000", "33.64", "42.98"},
            {"1", "200000", "79.17", "83.03"},
            {"1", "500000", "198", "208.60"}};
  case ExperimentKind::feeder_scaling:
    return {{"1", "10000", "0.42", "5.28"},
            {"10", "100000", "0.42", "5.38"},
            {"20", "200000", "0.44", "5.41"},
            {"50", "500000", "0.44", "5.54"}};
  case ExperimentKind::granularity:
    return {{"1", "10000", "0.42", "5.28"},
            {"10", "10000", "0.54", "0.7"},
            {"20", "10000", "0.47", "1.39"},
            {"50", "10000", "0.42", "1.38"}};
  case ExperimentKind::oversubscription:
    return {{"1 (4 cpus)", "10000", "4.159", "5.210"},
            {"10 (4 cpus)", "100000", "42.462", "43.550"},
            {"20 (4 cpus)", "200000", "88.352", "89.340"},
            {"50 (4 cpus)", "500000", "221.022", "222.100"}};
  }
  return {};
}

const char* experiment_title(ExperimentKind kind)
{
  switch (kind) {
  case ExperimentKind::linear_growth:
    return "Runtime against house count (sequential)";
  case ExperimentKind::feeder_scaling:
    return "One feeder per worker";
  case ExperimentKind::granularity:
    return "Fixed total houses split over workers";
  case ExperimentKind::oversubscription:
    return "More workers than cores";
  }
  return "";
}

void write_markdown(const std::filesystem::path& path, std::span<const ExperimentReport> reports)
{
  auto out = open_report_file(path);
  out << "# Benchmark report\n";
  if (reports.empty())
    out << "\nNo experiments.\n";
  for (const auto& r : reports) {
    out << "\n## " << experiment_title(r.kind) << " (`" << to_string(r.kind) << "`)\n\n";
    out << "| mode | workers | feeders | houses | houses/worker | cpu s | wall s | efficiency | max rss MB | "
           "output hash | notes |\n";
    out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& row : r.rows)
      out << "| " << to_string(row.mode) << " | " << row.workers << " | " << row.feeders << " | "
          << row.houses_total << " | " << row.houses_per_worker << " | " << fixed(row.cpu_s, 4) << " | "
          << fixed(row.wall_s, 4) << " | " << fixed(row.utilization, 3) << " | "
          << fixed(static_cast<double>(row.max_rss_bytes) / (1024.0 * 1024.0), 1) << " | `"
          << hex(row.output_hash) << "` | " << row.notes << " |\n";
    out << '\n';
    if (r.growth_exponent)
      out << "Fitted growth exponent (log-log slope of wall time): " << fixed(*r.growth_exponent, 3) << "\n\n";
    if (r.knee_workers)
      out << "Knee: fastest end-of-run wall time at " << *r.knee_workers << " workers.\n\n";
    if (!r.wall_ratios.empty()) {
      out << "Wall time ratios against the first row:";
      for (auto [w, ratio] : r.wall_ratios)
        out << " W=" << w << ": " << fixed(ratio, 3) << ';';
      out << "\n\n";
    }
    out << "| paper (2004 hardware) processors | paper (2004 hardware) houses | "
           "paper (2004 hardware) cpu s | paper (2004 hardware) wall s |\n";
    out << "|---|---|---|---|\n";
    for (const auto& ref : reference_rows(r.kind))
      out << "| " << ref.workers << " | " << ref.houses << " | " << ref.cpu_s << " | " << ref.wall_s << " |\n";
  }
  if (!out.flush())
    throw std::runtime_error("write failed: " + path.string());
}

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

void write_svg(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
               const std::string& y_label, const std::vector<PlotSeries>& series, bool log_x)
{
  constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 60;
  double x_min = INFINITY, x_max = -INFINITY, y_max = 0.0;
  auto tx = [&](double x) { return log_x ? std::log10(x) : x; };
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x_min = std::min(x_min, tx(x));
      x_max = std::max(x_max, tx(x));
      y_max = std::max(y_max, y);
    }
  if (!(x_min <= x_max)) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max == x_min)
    x_max = x_min + 1;
  if (y_max <= 0.0)
    y_max = 1.0;
  y_max *= 1.1;
  auto px = [&](double x) { return left + (tx(x) - x_min) / (x_max - x_min) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - y / y_max * (height - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  auto out = open_report_file(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << height / 2 << ")\">" << y_label << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    double y = y_max * i / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << fixed(y, 3)
        << "</text>\n";
  }
  std::map<double, bool> ticks;
  for (const auto& s : series)
    for (auto [x, y] : s.points)
      ticks[x] = true;
  for (auto [x, unused] : ticks)
    out << "<text x=\"" << px(x) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
        << format_double(x) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % 4];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (auto [x, y] : series[i].points)
      out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (auto [x, y] : series[i].points)
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << width - right - 150 << "\" y=\"" << top + 16 * (i + 1) << "\" fill=\"" << color
        << "\">" << series[i].label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out.flush())
    throw std::runtime_error("write failed: " + path.string());
}

std::vector<PlotSeries> series_by_note(const std::vector<const BenchRow*>& rows, bool x_is_houses,
                                       bool speedup)
{
  std::map<std::string, PlotSeries> by_tag;
  for (const BenchRow* row : rows) {
    std::string tag = to_string(row->mode).data();
    if (auto at = row->notes.find("schedule="); at != std::string::npos)
      tag += " " + row->notes.substr(at + 9, row->notes.find(';', at) - at - 9);
    auto& s = by_tag[tag];
    s.label = tag;
    double x = static_cast<double>(x_is_houses ? row->houses_total : row->workers);
    s.points.emplace_back(x, row->wall_s);
  }
  std::vector<PlotSeries> out;
  for (auto& [tag, s] : by_tag) {
    std::sort(s.points.begin(), s.points.end());
    if (speedup && !s.points.empty()) {
      double base = s.points.front().second;
      for (auto& p : s.points)
        p.second = p.second > 0.0 ? base / p.second : 0.0;
    }
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace

void write_bench_csv(const std::filesystem::path& path, std::span<const BenchRow> rows)
{
  auto out = open_report_file(path);
  out << bench_csv_header << '\n';
  for (const auto& r : rows)
    out << csv_field(r.experiment) << ',' << to_string(r.mode) << ',' << r.workers << ',' << r.feeders << ','
        << r.houses_total << ',' << r.houses_per_worker << ',' << format_double(r.cpu_s) << ','
        << format_double(r.wall_s) << ',' << format_double(r.utilization) << ',' << r.max_rss_bytes << ','
        << hex(r.output_hash) << ',' << csv_field(r.notes) << '\n';
  if (!out.flush())
    throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::filesystem::path> emit_report(std::span<const ExperimentReport> reports,
                                               const std::filesystem::path& out_dir, bool plots)
{
  std::vector<std::filesystem::path> written;
  std::vector<BenchRow> rows;
  for (const auto& r : reports)
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
  write_bench_csv(out_dir / "bench.csv", rows);
  written.push_back(out_dir / "bench.csv");
  write_markdown(out_dir / "report.md", reports);
  written.push_back(out_dir / "report.md");
  if (!plots)
    return written;

  std::map<ExperimentKind, std::vector<const BenchRow*>> by_kind;
  for (const auto& r : reports)
    for (const auto& row : r.rows)
      by_kind[r.kind].push_back(&row);
  for (const auto& [kind, kind_rows] : by_kind) {
    auto path = out_dir / (std::string(to_string(kind)) + ".svg");
    switch (kind) {
    case ExperimentKind::linear_growth:
      write_svg(path, "Wall time against houses", "houses (log scale)", "wall time (s)",
                series_by_note(kind_rows, true, false), true);
      break;
    case ExperimentKind::feeder_scaling:
      write_svg(path, "One feeder per worker", "workers = feeders", "wall time (s)",
                series_by_note(kind_rows, false, false), false);
      break;
    case ExperimentKind::granularity:
      write_svg(path, "Speedup against workers (fixed total houses)", "workers", "speedup",
                series_by_note(kind_rows, false, true), false);
      break;
    case ExperimentKind::oversubscription:
      write_svg(path, "Oversubscription", "workers", "wall time (s)", series_by_note(kind_rows, false, false),
                false);
      break;
    }
    written.push_back(path);
  }
  return written;
}

} // namespace feedersim
