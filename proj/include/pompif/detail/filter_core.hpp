#pragma once

// Shared sequential importance resampling loop used by the plain particle
// filter and by iterated filtering. The Params policy supplies each particle's
// parameter vector and may perturb it; it is resampled together with the states.
//
//   void start(std::size_t j, Rng& rng);                  before X_0 is drawn
//   const ParamVector& at(std::size_t j) const;
//   void perturb(std::size_t j, Rng& rng);                before each propagation
//   void select(std::span<const std::size_t> ancestors);  after resampling

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pompif/errors.hpp"
#include "pompif/parallel.hpp"
#include "pompif/pfilter.hpp"

namespace pompif::pf::detail {

inline constexpr std::uint64_t kResampleStream = 0xffffffffffffULL;

template <class Params>
FilterResult run_filter(const PompModel& model, const TimeSeries& data, Params& params,
                        const FilterOptions& options, std::uint64_t seed) {
  const std::size_t J = options.particles;
  const std::size_t N = data.size();
  if (J == 0) throw ConfigError("particle count must be at least 1");
  if (N == 0) throw DataError("cannot filter an empty time series");
  if (!(options.tolerance > 0.0)) throw ConfigError("filter tolerance must be positive");

  FilterResult result;
  result.conditional_loglik.resize(N);
  result.ess.resize(N);
  if (options.filter_means) result.filter_means.resize(N);

  std::vector<Rng> rngs;
  rngs.reserve(J);
  for (std::size_t j = 0; j < J; ++j) rngs.push_back(Rng::stream(seed, {j}));
  Rng resample_rng = Rng::stream(seed, {kResampleStream});

  std::vector<StateVector> particles(J);
  std::vector<StateVector> scratch(J);
  std::vector<double> logw(J);
  std::vector<double> w(J);

  parallel_for(J, options.workers, [&](std::size_t j) {
    params.start(j, rngs[j]);
    particles[j] = model.initialize(params.at(j), data.t0, rngs[j]);
  });

  const double log_tol = std::log(options.tolerance);
  for (std::size_t n = 0; n < N; ++n) {
    const double t_n = data.times[n];
    const Observation y = data.values[n];
    parallel_for(J, options.workers, [&](std::size_t j) {
      params.perturb(j, rngs[j]);
      advance(model, particles[j], params.at(j), t_n, rngs[j]);
      logw[j] = model.obs_log_density(y, particles[j], params.at(j));
    });

    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < J; ++j) {
      if (std::isnan(logw[j]) || logw[j] == std::numeric_limits<double>::infinity())
        throw ModelError("non-finite observation weight at observation " + std::to_string(n + 1) +
                         " (t = " + std::to_string(t_n) + ")");
      max_logw = std::max(max_logw, logw[j]);
    }

    const bool failed = !(max_logw >= log_tol);
    double sum_w = 0.0;
    if (max_logw > -std::numeric_limits<double>::infinity()) {
      for (std::size_t j = 0; j < J; ++j) {
        w[j] = std::exp(logw[j] - max_logw);
        sum_w += w[j];
      }
    }

    if (options.filter_means) {
      auto& means = result.filter_means[n];
      const std::size_t dim = particles[0].size + 1;
      means.assign(dim, 0.0);
      const bool weighted = sum_w > 0.0;
      const double denom = weighted ? sum_w : static_cast<double>(J);
      for (std::size_t j = 0; j < J; ++j) {
        const double wj = weighted ? w[j] : 1.0;
        for (std::size_t c = 0; c < particles[j].size; ++c) means[c] += wj * particles[j].counts[c];
        means[dim - 1] += wj * particles[j].H;
      }
      for (double& m : means) m /= denom;
    }

    if (failed) {
      result.conditional_loglik[n] = log_tol;
      result.failures.push_back(n);
      result.ess[n] = sum_w > 0.0 ? effective_sample_size(w) : 0.0;
    } else {
      result.conditional_loglik[n] = std::log(sum_w / static_cast<double>(J)) + max_logw;
      result.ess[n] = effective_sample_size(w);
      const auto ancestors = resample(w, J, options.resampling, resample_rng);
      for (std::size_t j = 0; j < J; ++j) scratch[j] = particles[ancestors[j]];
      particles.swap(scratch);
      params.select(ancestors);
    }
    for (auto& x : particles) x.H = 0.0;
  }

  double total = 0.0;
  for (double c : result.conditional_loglik) total += c;
  result.log_likelihood = total;
  return result;
}

}  // namespace pompif::pf::detail
