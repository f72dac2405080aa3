#include "pompif/model.hpp"

#include <cmath>
#include <sstream>

#include "pompif/errors.hpp"

namespace pompif {

PompModel::PompModel(double step_size) : step_size_(step_size) {
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw ConfigError("simulation step size must be positive");
}

void PompModel::skeleton(std::span<const double>, const ParamVector&, double,
                         std::span<double>) const {
  throw ModelError("model '" + std::string(name()) + "' has no deterministic skeleton");
}

std::shared_ptr<const ParamLayout> default_layout(const PompModel& model) {
  return std::make_shared<const ParamLayout>(model.parameter_specs());
}

std::size_t substep_count(double from, double to, double step_size) {
  const double span = to - from;
  if (!(span > 0.0)) return 0;
  // tolerate representation error so that e.g. 1/0.01 stays 100 substeps
  const double k = std::ceil(span / step_size - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, k));
}

void advance(const PompModel& model, StateVector& x, const ParamVector& p, double to, Rng& rng) {
  const double from = x.t;
  const std::size_t k = substep_count(from, to, model.step_size());
  if (k == 0) return;
  const double dt = (to - from) / static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) model.step(x, p, dt, rng);
  x.t = to;
}

namespace {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Mean and variance of the observation density by direct summation over counts.
Moments density_moments(const PompModel& model, const StateVector& x, const ParamVector& p) {
  double mass = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (Count y = 0; y < 10'000'000; ++y) {
    const double pr = std::exp(model.obs_log_density(y, x, p));
    mass += pr;
    m1 += pr * static_cast<double>(y);
    m2 += pr * static_cast<double>(y) * static_cast<double>(y);
    if (mass > 1.0 - 1e-12 && y > 10) break;
  }
  const double mean = m1 / mass;
  return {mean, m2 / mass - mean * mean};
}

}  // namespace

ValidationReport validate_model(const PompModel& model, const ParamVector& p,
                                const ValidationOptions& options) {
  ValidationReport report;
  auto add = [&report](std::string msg) {
    for (const auto& v : report.violations) {
      if (v == msg) return;
    }
    report.violations.push_back(std::move(msg));
  };

  std::vector<StateVector> probe_states;
  const auto population = model.conserved_population(p);

  for (std::size_t r = 0; r < options.trajectories; ++r) {
    auto rng = Rng::stream(options.seed, {0, r});
    try {
      StateVector x = model.initialize(p, 0.0, rng);
      for (std::size_t n = 1; n <= options.observation_times; ++n) {
        const double to = static_cast<double>(n);
        const std::size_t k = substep_count(x.t, to, model.step_size());
        const double dt = (to - x.t) / static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i) {
          model.step(x, p, dt, rng);
          for (std::size_t c = 0; c < x.size; ++c) {
            if (x.counts[c] < 0.0 || !std::isfinite(x.counts[c]))
              add("negative or non-finite count in compartment " +
                  model.compartment_names()[c]);
          }
          if (x.H < 0.0) add("negative incidence accumulator");
          if (population && std::abs(x.total() - *population) > 1e-6 * (1.0 + *population)) {
            std::ostringstream msg;
            msg << "population not conserved (expected " << *population << ")";
            add(msg.str());
          }
        }
        x.t = to;
        if (r == 0 && x.H > 0.0 && probe_states.size() < options.sampler_states)
          probe_states.push_back(x);
        x.H = 0.0;
      }
    } catch (const std::exception& e) {
      add(std::string("model raised an error during simulation: ") + e.what());
    }
  }

  if (probe_states.empty()) {
    StateVector x;
    auto rng = Rng::stream(options.seed, {2});
    try {
      x = model.initialize(p, 0.0, rng);
    } catch (const std::exception&) {
    }
    probe_states.push_back(x);
  }

  for (std::size_t s = 0; s < probe_states.size(); ++s) {
    const auto& x = probe_states[s];
    auto rng = Rng::stream(options.seed, {1, s});
    try {
      const Moments mom = density_moments(model, x, p);
      double sum = 0.0;
      for (std::size_t d = 0; d < options.sampler_draws; ++d)
        sum += static_cast<double>(model.sample_observation(x, p, rng));
      const double sample_mean = sum / static_cast<double>(options.sampler_draws);
      const double se = std::sqrt(mom.variance / static_cast<double>(options.sampler_draws));
      const double gap = std::abs(sample_mean - mom.mean);
      if ((se > 0.0 && gap > 3.0 * se) || (se == 0.0 && gap > 0.0)) {
        std::ostringstream msg;
        msg << "observation sampler mean " << sample_mean << " differs from density mean "
            << mom.mean << " by more than 3 standard errors";
        add(msg.str());
      }
    } catch (const std::exception& e) {
      add(std::string("observation model raised an error: ") + e.what());
    }
  }
  return report;
}

}  // namespace pompif
