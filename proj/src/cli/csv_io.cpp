#include "pompif/cli/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "pompif/errors.hpp"

namespace pompif::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_time(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
    throw DataError("bad time '" + std::string(field) + "'", line);
  return v;
}

Observation parse_cases(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty() || field == "NA" || field == "NaN" || field == "nan") return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v))
    throw DataError("bad count '" + std::string(field) + "'", line);
  if (v < 0.0) throw DataError("negative count " + std::string(field), line);
  if (v != std::floor(v)) throw DataError("non-integer count " + std::string(field), line);
  return static_cast<Count>(v);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

TimeSeries read_data_csv(const std::filesystem::path& path, double t0) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  TimeSeries ts;
  ts.t0 = t0;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 2 || fields[0] != "time" || fields[1] != "cases")
        throw DataError("expected header 'time,cases'", lineno);
      continue;
    }
    if (fields.size() != 2) throw DataError("expected 2 fields, got " + std::to_string(fields.size()), lineno);
    const double t = parse_time(fields[0], lineno);
    if (t <= (ts.times.empty() ? t0 : ts.times.back()))
      throw DataError("times must be strictly increasing and after t0", lineno);
    ts.times.push_back(t);
    ts.values.push_back(parse_cases(fields[1], lineno));
  }
  if (!header_seen) throw DataError("data file '" + path.string() + "' is empty");
  ts.validate();
  return ts;
}

void write_data_csv(const std::filesystem::path& path, const TimeSeries& data) {
  std::ostringstream out;
  out << "time,cases\n";
  for (std::size_t n = 0; n < data.size(); ++n) {
    out << format_double(data.times[n]) << ',';
    if (data.values[n]) out << *data.values[n];
    out << '\n';
  }
  write_file(path, out.str());
}

void write_states_csv(const std::filesystem::path& path, const sim::SimulatedPath& path_data,
                      std::span<const std::string> compartments) {
  std::ostringstream out;
  out << "time";
  for (const auto& c : compartments) out << ',' << c;
  out << ",H\n";
  for (const auto& x : path_data.states) {
    out << format_double(x.t);
    for (double v : x.compartments()) out << ',' << format_double(v);
    out << ',' << format_double(x.H) << '\n';
  }
  write_file(path, out.str());
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pompif::cli
