#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pompif/model.hpp"
#include "pompif/params.hpp"
#include "pompif/pfilter.hpp"
#include "pompif/rng.hpp"

namespace pompif::mif {

/// J parameter vectors. Estimated coordinates live on the estimation scale in
/// `transformed` (row-major, J rows x estimated-count columns); fixed coordinates
/// are never transformed and are taken verbatim from `base`.
struct ParamSwarm {
  ParamVector base;
  std::size_t members = 0;
  std::vector<double> transformed;
  std::size_t iteration = 0;

  /// J copies of `start`.
  static ParamSwarm replicate(const ParamVector& start, std::size_t members);

  [[nodiscard]] std::size_t dimension() const noexcept { return base.layout().estimated().size(); }
  [[nodiscard]] std::span<const double> member(std::size_t j) const {
    return {transformed.data() + j * dimension(), dimension()};
  }
  [[nodiscard]] std::span<double> member(std::size_t j) {
    return {transformed.data() + j * dimension(), dimension()};
  }
  /// Natural-scale parameter vector of member j.
  [[nodiscard]] ParamVector natural(std::size_t j) const;
  /// Arithmetic mean of the members on the natural scale.
  [[nodiscard]] ParamVector natural_mean() const;
};

struct Mif2Settings {
  std::size_t iterations = 100;
  std::size_t particles = 500;
  /// Random-walk sd on the estimation scale, indexed like the layout; entries
  /// for fixed parameters are ignored.
  std::vector<double> rw_sd;
  double cooling_fraction = 0.05;
  double cooling_horizon = 50.0;
  double tolerance = 1e-17;
  pf::Resampling resampling = pf::Resampling::multinomial;
  std::size_t workers = 1;

  void validate(const ParamLayout& layout) const;
};

struct Mif2Result {
  ParamSwarm swarm;
  ParamVector estimate;  // natural-scale mean of the final swarm
  /// Per iteration: log-likelihood of the perturbed filter (diagnostic only),
  /// filtering failures, and the natural-scale swarm mean of each estimated parameter.
  std::vector<double> loglik;
  std::vector<std::size_t> nfail;
  std::vector<std::vector<double>> param_means;
};

/// k^(m / horizon).
double cooling_intensity(double iteration, double fraction, double horizon);

/// Independent normal increments on estimated coordinates; sd == 0 leaves a coordinate unchanged.
void perturb(std::span<double> theta, std::span<const double> sd, Rng& rng);

/// Seed of the filter run in iteration m (1-based) of a search seeded with `seed`.
std::uint64_t iteration_seed(std::uint64_t seed, std::size_t iteration);

/// Iterated filtering (IF2). Each iteration is a particle filter over (state,
/// parameter) pairs whose parameters follow a Gaussian random walk on the
/// estimation scale with sd rw_sd * cooling_intensity(m).
Mif2Result mif2(const PompModel& model, const TimeSeries& data, const ParamSwarm& start,
                const Mif2Settings& settings, std::uint64_t seed);

struct CandidateScore {
  std::size_t index = 0;  // position in the input list
  double mean_loglik = 0.0;
  double se = 0.0;
  std::vector<double> replicates;
};

/// Replicated unperturbed particle filters per candidate; results ranked by
/// descending mean log-likelihood, ties by smaller SE then input order.
std::vector<CandidateScore> evaluate_candidates(const std::vector<ParamVector>& candidates,
                                                const PompModel& model, const TimeSeries& data,
                                                std::size_t replicates,
                                                const pf::FilterOptions& options,
                                                std::uint64_t seed, std::size_t workers = 1);

/// Uniform draw from a box on the natural scale for the estimated coordinates.
/// `lower`/`upper` are indexed like the layout.
ParamVector draw_from_box(const ParamVector& base, std::span<const double> lower,
                          std::span<const double> upper, Rng& rng);

}  // namespace pompif::mif
