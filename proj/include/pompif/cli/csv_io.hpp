#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pompif/simulators.hpp"
#include "pompif/state.hpp"

namespace pompif::cli {

/// %.17g, or an empty string for NaN.
std::string format_double(double v);

std::vector<std::string> split_csv_line(std::string_view line);

/// Reads `time,cases`; an empty (or NA) cases field is missing. Errors carry the line number.
TimeSeries read_data_csv(const std::filesystem::path& path, double t0 = 0.0);
void write_data_csv(const std::filesystem::path& path, const TimeSeries& data);

/// `time,<compartments...>,H` at each observation time.
void write_states_csv(const std::filesystem::path& path, const sim::SimulatedPath& path_data,
                      std::span<const std::string> compartments);

/// Writes `content` to `path` via a temporary file and rename.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace pompif::cli
