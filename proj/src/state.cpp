#include "pompif/state.hpp"

#include <cmath>

#include "pompif/errors.hpp"

namespace pompif {

void TimeSeries::validate() const {
  if (values.size() != times.size())
    throw DataError("time series has " + std::to_string(times.size()) + " times but " +
                    std::to_string(values.size()) + " values");
  double prev = t0;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (!std::isfinite(times[n]) || !(times[n] > prev))
      throw DataError("observation " + std::to_string(n + 1) +
                      ": times must be strictly increasing and after t0");
    prev = times[n];
    if (values[n] && *values[n] < 0)
      throw DataError("observation " + std::to_string(n + 1) + ": negative case count");
  }
}

TimeSeries TimeSeries::weekly(std::size_t n_obs, double t0) {
  TimeSeries ts;
  ts.t0 = t0;
  ts.times.reserve(n_obs);
  for (std::size_t n = 1; n <= n_obs; ++n) ts.times.push_back(t0 + static_cast<double>(n));
  ts.values.assign(n_obs, std::nullopt);
  return ts;
}

}  // namespace pompif
