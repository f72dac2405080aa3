#include "pompif/models/observation.hpp"

#include <cmath>
#include <limits>

namespace pompif::models {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double degenerate_at_zero(Count y) { return y == 0 ? 0.0 : kNegInf; }

// log Gamma(y + r) - log Gamma(r), exact summation for small y so that huge
// sizes (psi -> 0) keep full precision.
double log_rising_factorial(double r, Count y) {
  if (y < 64) {
    double s = 0.0;
    for (Count i = 0; i < y; ++i) s += std::log(r + static_cast<double>(i));
    return s;
  }
  return std::lgamma(r + static_cast<double>(y)) - std::lgamma(r);
}

}  // namespace

double poisson_obs_logdensity(Observation y, double H, double kappa) {
  if (!y) return 0.0;
  const double mean = kappa * H;
  if (!(mean > 0.0)) return degenerate_at_zero(*y);
  const auto k = static_cast<double>(*y);
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double negbin_obs_logdensity(Observation y, double H, double psi, double kappa) {
  if (!y) return 0.0;
  const double mean = kappa * H;
  if (!(mean > 0.0)) return degenerate_at_zero(*y);
  const auto k = static_cast<double>(*y);
  const double size = 1.0 / psi;
  // size * log(size / (size + mean)) = -size * log1p(mean / size)
  return log_rising_factorial(size, *y) - std::lgamma(k + 1.0) - size * std::log1p(mean / size) +
         k * (std::log(mean) - std::log(size + mean));
}

Count sample_poisson_obs(double H, double kappa, Rng& rng) { return rng.poisson(kappa * H); }

Count sample_negbin_obs(double H, double psi, double kappa, Rng& rng) {
  return rng.negative_binomial(kappa * H, psi);
}

}  // namespace pompif::models
