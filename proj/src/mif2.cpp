#include "pompif/mif2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pompif/detail/filter_core.hpp"
#include "pompif/errors.hpp"
#include "pompif/parallel.hpp"

namespace pompif::mif {

ParamSwarm ParamSwarm::replicate(const ParamVector& start, std::size_t members) {
  ParamSwarm s;
  s.base = start;
  s.members = members;
  const auto& est = start.layout().estimated();
  s.transformed.resize(members * est.size());
  for (std::size_t j = 0; j < members; ++j) {
    for (std::size_t e = 0; e < est.size(); ++e)
      s.transformed[j * est.size() + e] = to_estimation(start[est[e]], start.layout()[est[e]]);
  }
  return s;
}

ParamVector ParamSwarm::natural(std::size_t j) const {
  ParamVector p = base;
  const auto& est = base.layout().estimated();
  const auto theta = member(j);
  for (std::size_t e = 0; e < est.size(); ++e)
    p[est[e]] = from_estimation(theta[e], base.layout()[est[e]]);
  return p;
}

ParamVector ParamSwarm::natural_mean() const {
  ParamVector p = base;
  const auto& est = base.layout().estimated();
  for (std::size_t e = 0; e < est.size(); ++e) {
    double s = 0.0;
    for (std::size_t j = 0; j < members; ++j)
      s += from_estimation(member(j)[e], base.layout()[est[e]]);
    p[est[e]] = s / static_cast<double>(members);
  }
  return p;
}

void Mif2Settings::validate(const ParamLayout& layout) const {
  if (iterations < 1) throw ConfigError("mif2 needs at least one iteration");
  if (particles < 1) throw ConfigError("mif2 needs at least one particle");
  if (!(cooling_fraction > 0.0 && cooling_fraction < 1.0))
    throw ConfigError("cooling fraction must lie in (0, 1)");
  if (!(cooling_horizon > 0.0)) throw ConfigError("cooling horizon must be positive");
  if (rw_sd.size() != layout.size())
    throw ConfigError("random-walk sd must have one entry per parameter");
  for (std::size_t i = 0; i < rw_sd.size(); ++i) {
    if (!(rw_sd[i] >= 0.0) || !std::isfinite(rw_sd[i]))
      throw ConfigError("random-walk sd of '" + layout[i].name + "' must be non-negative");
  }
}

double cooling_intensity(double iteration, double fraction, double horizon) {
  return std::pow(fraction, iteration / horizon);
}

void perturb(std::span<double> theta, std::span<const double> sd, Rng& rng) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (sd[i] > 0.0) theta[i] = rng.normal(theta[i], sd[i]);
  }
}

std::uint64_t iteration_seed(std::uint64_t seed, std::size_t iteration) {
  return Rng::stream(seed, {0x6d6966ULL, iteration}).engine()();
}

namespace {

// Per-particle parameters for one IF2 iteration. Holds both the estimation-scale
// swarm and the natural-scale vectors the model reads.
class SwarmParams {
 public:
  SwarmParams(ParamSwarm& swarm, std::vector<double> sd)
      : swarm_(swarm), sd_(std::move(sd)), natural_(swarm.members, swarm.base) {
    for (std::size_t j = 0; j < swarm_.members; ++j) refresh(j);
  }

  void start(std::size_t j, Rng& rng) { perturb(j, rng); }

  [[nodiscard]] const ParamVector& at(std::size_t j) const { return natural_[j]; }

  void perturb(std::size_t j, Rng& rng) {
    mif::perturb(swarm_.member(j), sd_, rng);
    refresh(j);
  }

  void select(std::span<const std::size_t> ancestors) {
    const std::size_t d = swarm_.dimension();
    scratch_.resize(swarm_.transformed.size());
    for (std::size_t j = 0; j < ancestors.size(); ++j) {
      std::copy_n(swarm_.transformed.begin() + static_cast<std::ptrdiff_t>(ancestors[j] * d), d,
                  scratch_.begin() + static_cast<std::ptrdiff_t>(j * d));
    }
    swarm_.transformed.swap(scratch_);
    natural_scratch_.resize(natural_.size());
    for (std::size_t j = 0; j < ancestors.size(); ++j) natural_scratch_[j] = natural_[ancestors[j]];
    natural_.swap(natural_scratch_);
  }

 private:
  void refresh(std::size_t j) {
    const auto& est = swarm_.base.layout().estimated();
    const auto theta = swarm_.member(j);
    for (std::size_t e = 0; e < est.size(); ++e)
      natural_[j][est[e]] = from_estimation(theta[e], swarm_.base.layout()[est[e]]);
  }

  ParamSwarm& swarm_;
  std::vector<double> sd_;
  std::vector<ParamVector> natural_;
  std::vector<ParamVector> natural_scratch_;
  std::vector<double> scratch_;
};

}  // namespace

Mif2Result mif2(const PompModel& model, const TimeSeries& data, const ParamSwarm& start,
                const Mif2Settings& settings, std::uint64_t seed) {
  const auto& layout = start.base.layout();
  settings.validate(layout);
  if (start.members != settings.particles)
    throw ConfigError("initial swarm size must equal the particle count");

  Mif2Result result;
  result.swarm = start;
  const auto& est = layout.estimated();

  pf::FilterOptions fopt;
  fopt.particles = settings.particles;
  fopt.tolerance = settings.tolerance;
  fopt.resampling = settings.resampling;
  fopt.workers = settings.workers;

  for (std::size_t m = 1; m <= settings.iterations; ++m) {
    const double intensity = cooling_intensity(static_cast<double>(m), settings.cooling_fraction,
                                               settings.cooling_horizon);
    std::vector<double> sd(est.size());
    for (std::size_t e = 0; e < est.size(); ++e) sd[e] = settings.rw_sd[est[e]] * intensity;

    SwarmParams params(result.swarm, std::move(sd));
    const auto filtered = pf::detail::run_filter(model, data, params, fopt, iteration_seed(seed, m));
    result.swarm.iteration = m;

    result.loglik.push_back(filtered.log_likelihood);
    result.nfail.push_back(filtered.nfail());
    const ParamVector mean = result.swarm.natural_mean();
    std::vector<double> means(est.size());
    for (std::size_t e = 0; e < est.size(); ++e) means[e] = mean[est[e]];
    result.param_means.push_back(std::move(means));
  }
  result.estimate = result.swarm.natural_mean();
  return result;
}

std::vector<CandidateScore> evaluate_candidates(const std::vector<ParamVector>& candidates,
                                                const PompModel& model, const TimeSeries& data,
                                                std::size_t replicates,
                                                const pf::FilterOptions& options,
                                                std::uint64_t seed, std::size_t workers) {
  if (replicates < 2) throw ConfigError("candidate evaluation needs at least 2 replicates");
  const std::size_t C = candidates.size();
  std::vector<CandidateScore> scores(C);
  std::vector<double> flat(C * replicates);
  parallel_for(C * replicates, workers, [&](std::size_t job) {
    const std::size_t c = job / replicates;
    const std::size_t r = job % replicates;
    const auto s = Rng::stream(seed, {c, r}).engine()();
    flat[job] = pf::particle_filter(model, data, candidates[c], options, s).log_likelihood;
  });
  for (std::size_t c = 0; c < C; ++c) {
    auto& sc = scores[c];
    sc.index = c;
    sc.replicates.assign(flat.begin() + static_cast<std::ptrdiff_t>(c * replicates),
                         flat.begin() + static_cast<std::ptrdiff_t>((c + 1) * replicates));
    const auto R = static_cast<double>(replicates);
    const double mean = std::accumulate(sc.replicates.begin(), sc.replicates.end(), 0.0) / R;
    double ss = 0.0;
    for (double v : sc.replicates) ss += (v - mean) * (v - mean);
    sc.mean_loglik = mean;
    sc.se = std::sqrt(ss / (R - 1.0) / R);
  }
  std::stable_sort(scores.begin(), scores.end(), [](const CandidateScore& a, const CandidateScore& b) {
    if (a.mean_loglik != b.mean_loglik) return a.mean_loglik > b.mean_loglik;
    return a.se < b.se;
  });
  return scores;
}

ParamVector draw_from_box(const ParamVector& base, std::span<const double> lower,
                          std::span<const double> upper, Rng& rng) {
  ParamVector p = base;
  for (std::size_t i : base.layout().estimated()) {
    if (!(lower[i] <= upper[i]))
      throw ConfigError("start box for '" + base.layout()[i].name + "' is empty");
    p[i] = lower[i] + (upper[i] - lower[i]) * rng.uniform();
  }
  return p;
}

}  // namespace pompif::mif
