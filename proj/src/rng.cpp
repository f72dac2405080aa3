#include "pompif/rng.hpp"

#include <cmath>
#include <vector>

namespace pompif {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng Rng::stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1) + 1);
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  // path length is mixed in so {a} and {a, 0} differ
  words.push_back(static_cast<std::uint32_t>(path.size()));
  for (auto key : path) push(key);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(engine_type(seq));
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal(double mean, double sd) {
  if (sd == 0.0) return mean;
  return std::normal_distribution<double>(mean, sd)(engine_);
}

double Rng::exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }

std::int64_t Rng::binomial(std::int64_t n, double p) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  if (static_cast<double>(n) * pp >= 20.0)
    return std::binomial_distribution<std::int64_t>(n, p)(engine_);
  // Inversion by sequential search; std::binomial_distribution's per-call setup
  // dominates tau-leaping cost when the mean is small.
  const double q = 1.0 - pp;
  const double s = pp / q;
  const double a = static_cast<double>(n + 1) * s;
  const double r0 = std::exp(static_cast<double>(n) * std::log1p(-pp));
  for (;;) {
    double u = uniform();
    double r = r0;
    std::int64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - s;
    }
    if (x <= n) return flip ? n - x : x;
  }
}

std::int64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(engine_);
}

double Rng::gamma(double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(engine_);
}

std::int64_t Rng::negative_binomial(double mean, double psi) {
  if (!(mean > 0.0)) return 0;
  // gamma-Poisson mixture: rate ~ Gamma(1/psi, psi*mean)
  const double rate = gamma(1.0 / psi, psi * mean);
  return poisson(rate);
}

}  // namespace pompif
