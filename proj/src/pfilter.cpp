#include "pompif/pfilter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "pompif/detail/filter_core.hpp"
#include "pompif/errors.hpp"
#include "pompif/parallel.hpp"

namespace pompif::pf {

namespace {

// Every particle shares one parameter vector.
class SharedParams {
 public:
  explicit SharedParams(const ParamVector& p) : p_(p) {}
  void start(std::size_t, Rng&) {}
  [[nodiscard]] const ParamVector& at(std::size_t) const { return p_; }
  void perturb(std::size_t, Rng&) {}
  void select(std::span<const std::size_t>) {}

 private:
  const ParamVector& p_;
};

}  // namespace

Resampling resampling_from_string(std::string_view name) {
  if (name == "multinomial") return Resampling::multinomial;
  if (name == "systematic") return Resampling::systematic;
  throw ConfigError("unknown resampling scheme '" + std::string(name) + "'");
}

FilterResult particle_filter(const PompModel& model, const TimeSeries& data, const ParamVector& p,
                             const FilterOptions& options, std::uint64_t seed) {
  SharedParams params(p);
  return detail::run_filter(model, data, params, options, seed);
}

std::vector<std::size_t> resample(std::span<const double> weights, std::size_t count,
                                  Resampling scheme, Rng& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("resampling weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::invalid_argument("resampling weights must have a positive sum");

  std::vector<std::size_t> out(count);
  if (scheme == Resampling::multinomial) {
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    for (auto& k : out) k = pick(rng.engine());
    return out;
  }

  // systematic: one uniform offset, evenly spaced positions
  const double spacing = total / static_cast<double>(count);
  double position = rng.uniform() * spacing;
  double cumulative = weights[0];
  std::size_t i = 0;
  const std::size_t last = weights.size() - 1;
  for (std::size_t j = 0; j < count; ++j) {
    while (position >= cumulative && i < last) cumulative += weights[++i];
    out[j] = i;
    position += spacing;
  }
  return out;
}

double effective_sample_size(std::span<const double> weights) {
  double s = 0.0;
  double s2 = 0.0;
  for (double w : weights) {
    s += w;
    s2 += w * w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double log_mean_exp(std::span<const double> values) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : values) mx = std::max(mx, v);
  if (mx == -std::numeric_limits<double>::infinity()) return mx;
  double s = 0.0;
  for (double v : values) s += std::exp(v - mx);
  return mx + std::log(s / static_cast<double>(values.size()));
}

NaiveEstimate naive_mc_loglik(const PompModel& model, const TimeSeries& data, const ParamVector& p,
                              std::size_t particles, std::uint64_t seed, std::size_t workers) {
  if (particles < 2) throw ConfigError("naive Monte Carlo needs at least 2 simulations");
  if (data.size() == 0) throw DataError("cannot evaluate an empty time series");

  std::vector<double> loglik(particles);
  parallel_for(particles, workers, [&](std::size_t j) {
    Rng rng = Rng::stream(seed, {j});
    StateVector x = model.initialize(p, data.t0, rng);
    double ll = 0.0;
    for (std::size_t n = 0; n < data.size(); ++n) {
      advance(model, x, p, data.times[n], rng);
      ll += model.obs_log_density(data.values[n], x, p);
      x.H = 0.0;
    }
    if (std::isnan(ll)) throw ModelError("non-finite trajectory likelihood");
    loglik[j] = ll;
  });

  NaiveEstimate est;
  est.log_likelihood = log_mean_exp(loglik);
  if (est.log_likelihood == -std::numeric_limits<double>::infinity()) {
    est.all_zero = true;
    est.se = std::numeric_limits<double>::infinity();
    return est;
  }
  // delta method: se(log mean L) = sd(L) / (sqrt(J) mean(L)), on a rescaled L
  const double mx = *std::max_element(loglik.begin(), loglik.end());
  double sum = 0.0;
  double sum2 = 0.0;
  for (double ll : loglik) {
    const double l = std::exp(ll - mx);
    sum += l;
    sum2 += l * l;
  }
  const auto J = static_cast<double>(particles);
  const double mean = sum / J;
  const double var = std::max(0.0, (sum2 - J * mean * mean) / (J - 1.0));
  est.se = std::sqrt(var / J) / mean;
  return est;
}

}  // namespace pompif::pf
