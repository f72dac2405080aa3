#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pompif {

using Count = std::int64_t;

/// Latent process state: compartment sizes, the incidence accumulator H and the current time.
///
/// Stochastic steppers keep integral values in `counts`; deterministic skeleton
/// steppers use the same storage for real-valued compartments.
struct StateVector {
  static constexpr std::size_t kMaxCompartments = 6;

  std::array<double, kMaxCompartments> counts{};
  std::size_t size = 0;
  double H = 0.0;  // infections since the last observation time
  double t = 0.0;  // weeks

  [[nodiscard]] std::span<double> compartments() noexcept { return {counts.data(), size}; }
  [[nodiscard]] std::span<const double> compartments() const noexcept {
    return {counts.data(), size};
  }
  [[nodiscard]] double total() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) s += counts[i];
    return s;
  }
};

/// One reported count, absent when missing.
using Observation = std::optional<Count>;

/// Observation times t_1 < ... < t_N (weeks) with their possibly missing counts.
struct TimeSeries {
  double t0 = 0.0;
  std::vector<double> times;
  std::vector<Observation> values;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }

  /// Throws DataError if times are not strictly increasing, start before t0,
  /// or a value is negative.
  void validate() const;

  /// t_n = n for n = 1..n_obs, all values missing.
  static TimeSeries weekly(std::size_t n_obs, double t0 = 0.0);

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

}  // namespace pompif
