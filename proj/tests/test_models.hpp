// Small models used only by the tests.
#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "pompif/model.hpp"
#include "pompif/models/sir.hpp"

namespace testing {

using pompif::Count;
using pompif::Observation;
using pompif::ParamSpec;
using pompif::ParamVector;
using pompif::Rng;
using pompif::StateVector;

/// Two-state hidden Markov chain with binary emissions, one transition per unit time.
struct HmmSpec {
  std::array<double, 2> init{0.6, 0.4};
  std::array<std::array<double, 2>, 2> trans{{{0.85, 0.15}, {0.25, 0.75}}};
  std::array<std::array<double, 2>, 2> emit{{{0.9, 0.1}, {0.3, 0.7}}};  // emit[state][y]
};

class HmmModel final : public pompif::PompModel {
 public:
  explicit HmmModel(HmmSpec spec = {}) : PompModel(1.0), spec_(spec) {}

  std::string_view name() const override { return "hmm"; }
  std::span<const std::string> compartment_names() const override { return names_; }
  std::vector<ParamSpec> parameter_specs() const override {
    return {{"dummy", 1.0, pompif::Scale::log, false}};
  }
  StateVector initialize(const ParamVector&, double t0, Rng& rng) const override {
    StateVector x;
    x.size = 1;
    x.t = t0;
    x.counts[0] = rng.uniform() < spec_.init[0] ? 0.0 : 1.0;
    return x;
  }
  void step(StateVector& x, const ParamVector&, double dt, Rng& rng) const override {
    const auto s = static_cast<std::size_t>(x.counts[0]);
    x.counts[0] = rng.uniform() < spec_.trans[s][0] ? 0.0 : 1.0;
    x.t += dt;
  }
  double obs_log_density(Observation y, const StateVector& x, const ParamVector&) const override {
    if (!y) return 0.0;
    return std::log(spec_.emit[static_cast<std::size_t>(x.counts[0])][static_cast<std::size_t>(*y)]);
  }
  Count sample_observation(const StateVector& x, const ParamVector&, Rng& rng) const override {
    return rng.uniform() < spec_.emit[static_cast<std::size_t>(x.counts[0])][0] ? 0 : 1;
  }

  /// Exact likelihood by the forward algorithm.
  double forward_likelihood(const std::vector<Observation>& ys) const {
    std::array<double, 2> alpha = spec_.init;
    double like = 1.0;
    for (const auto& y : ys) {
      std::array<double, 2> next{};
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) next[j] += alpha[i] * spec_.trans[i][j];
      double total = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        if (y) next[j] *= spec_.emit[j][static_cast<std::size_t>(*y)];
        total += next[j];
      }
      like *= total;
      for (std::size_t j = 0; j < 2; ++j) alpha[j] = next[j] / total;
    }
    return like;
  }

 private:
  HmmSpec spec_;
  std::vector<std::string> names_{"Z"};
};

/// Deterministic model whose observation density collapses at one time.
class FailureModel final : public pompif::PompModel {
 public:
  explicit FailureModel(double fail_time) : PompModel(1.0), fail_time_(fail_time) {}

  std::string_view name() const override { return "fail"; }
  std::span<const std::string> compartment_names() const override { return names_; }
  std::vector<ParamSpec> parameter_specs() const override {
    return {{"a", 1.0, pompif::Scale::log, false}};
  }
  StateVector initialize(const ParamVector&, double t0, Rng&) const override {
    StateVector x;
    x.size = 1;
    x.t = t0;
    return x;
  }
  void step(StateVector& x, const ParamVector&, double dt, Rng& rng) const override {
    x.counts[0] = rng.uniform();
    x.t += dt;
  }
  double obs_log_density(Observation y, const StateVector& x, const ParamVector&) const override {
    if (!y) return 0.0;
    return std::abs(x.t - fail_time_) < 1e-9 ? -100.0 : -1.0 - x.counts[0];
  }
  Count sample_observation(const StateVector&, const ParamVector&, Rng&) const override { return 0; }

 private:
  double fail_time_;
  std::vector<std::string> names_{"U"};
};

/// SIR whose stepper loses one susceptible per step.
class LeakyModel final : public pompif::PompModel {
 public:
  LeakyModel() : PompModel(0.1) {}
  std::string_view name() const override { return "leaky"; }
  std::span<const std::string> compartment_names() const override { return sir_.compartment_names(); }
  std::vector<ParamSpec> parameter_specs() const override { return sir_.parameter_specs(); }
  StateVector initialize(const ParamVector& p, double t0, Rng& rng) const override {
    return sir_.initialize(p, t0, rng);
  }
  void step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const override {
    sir_.step(x, p, dt, rng);
    if (x.counts[0] > 0) x.counts[0] -= 1;
  }
  double obs_log_density(Observation y, const StateVector& x, const ParamVector& p) const override {
    return sir_.obs_log_density(y, x, p);
  }
  Count sample_observation(const StateVector& x, const ParamVector& p, Rng& rng) const override {
    return sir_.sample_observation(x, p, rng);
  }
  std::optional<double> conserved_population(const ParamVector& p) const override {
    return sir_.conserved_population(p);
  }

 private:
  pompif::models::SirModel sir_{0.1};
};

/// SIR whose observation sampler is biased upward by `shift` against its density.
class BiasedSamplerModel final : public pompif::PompModel {
 public:
  explicit BiasedSamplerModel(Count shift) : PompModel(0.1), shift_(shift) {}
  std::string_view name() const override { return "biased"; }
  std::span<const std::string> compartment_names() const override { return sir_.compartment_names(); }
  std::vector<ParamSpec> parameter_specs() const override { return sir_.parameter_specs(); }
  StateVector initialize(const ParamVector& p, double t0, Rng& rng) const override {
    return sir_.initialize(p, t0, rng);
  }
  void step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const override {
    sir_.step(x, p, dt, rng);
  }
  double obs_log_density(Observation y, const StateVector& x, const ParamVector& p) const override {
    return sir_.obs_log_density(y, x, p);
  }
  Count sample_observation(const StateVector& x, const ParamVector& p, Rng& rng) const override {
    return sir_.sample_observation(x, p, rng) + shift_;
  }
  std::optional<double> conserved_population(const ParamVector& p) const override {
    return sir_.conserved_population(p);
  }

 private:
  pompif::models::SirModel sir_{0.1};
  Count shift_;
};

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_var(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

/// Standard error of the sample variance, from the fourth central moment.
inline double var_se(const std::vector<double>& v) {
  const double m = sample_mean(v);
  const auto n = static_cast<double>(v.size());
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = (x - m) * (x - m);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return std::sqrt((m4 - m2 * m2) / n);
}

}  // namespace testing
