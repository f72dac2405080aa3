#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pompif/model.hpp"
#include "pompif/params.hpp"
#include "pompif/rng.hpp"
#include "pompif/state.hpp"

namespace pompif::pf {

enum class Resampling { multinomial, systematic };

Resampling resampling_from_string(std::string_view name);

struct FilterOptions {
  std::size_t particles = 1000;
  /// Conditional likelihood below which a particle is uninformative; if every
  /// particle is below it the step is a filtering failure.
  double tolerance = 1e-17;
  Resampling resampling = Resampling::multinomial;
  bool filter_means = false;
  /// Threads used to propagate particles within one filter.
  std::size_t workers = 1;
};

struct FilterResult {
  double log_likelihood = 0.0;
  std::vector<double> conditional_loglik;  // log L_{n|n-1}, one per observation
  std::vector<double> ess;                 // effective sample size before resampling
  std::vector<std::size_t> failures;       // 0-based observation indices
  /// Weighted prediction means of (compartments..., H) per observation, if requested.
  std::vector<std::vector<double>> filter_means;

  [[nodiscard]] std::size_t nfail() const noexcept { return failures.size(); }
};

/// Bootstrap particle filter. Particle j draws from its own stream derived
/// from (seed, j), so results do not depend on `workers`.
///
/// Throws ModelError (naming the observation) if a weight is NaN or +inf.
FilterResult particle_filter(const PompModel& model, const TimeSeries& data, const ParamVector& p,
                             const FilterOptions& options, std::uint64_t seed);

/// Ancestor indices drawn with probability proportional to `weights`.
/// Throws std::invalid_argument if the weights do not have a positive finite sum.
std::vector<std::size_t> resample(std::span<const double> weights, std::size_t count,
                                  Resampling scheme, Rng& rng);

/// (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> weights);

/// log(mean(exp(values))) without overflow; -inf if every value is -inf.
double log_mean_exp(std::span<const double> values);

struct NaiveEstimate {
  double log_likelihood = 0.0;
  double se = 0.0;  // delta-method standard error on the log scale
  bool all_zero = false;
};

/// Averages the likelihood of J unconditional simulations. Returns -inf with
/// `all_zero` set when no simulation is compatible with the data.
NaiveEstimate naive_mc_loglik(const PompModel& model, const TimeSeries& data, const ParamVector& p,
                              std::size_t particles, std::uint64_t seed, std::size_t workers = 1);

}  // namespace pompif::pf
