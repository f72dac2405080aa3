#include "pompif/models/sir.hpp"

#include <cmath>

#include "pompif/errors.hpp"
#include "pompif/models/observation.hpp"

namespace pompif::models {

namespace {
const std::array<std::string, 3> kCompartments{"S", "I", "R"};
}

sim::ReactionSet sir_reactions() {
  using sim::RateContext;
  std::vector<sim::Reaction> r;
  r.push_back({"infection", SirModel::kS, SirModel::kI,
               [](const StateVector& x, const ParamVector& p, const RateContext&) {
                 return p[SirModel::kBeta] * x.counts[SirModel::kI] / p[SirModel::kN];
               },
               true});
  r.push_back({"recovery", SirModel::kI, SirModel::kR,
               [](const StateVector&, const ParamVector& p, const RateContext&) {
                 return p[SirModel::kGamma];
               },
               false});
  return sim::ReactionSet(3, std::move(r));
}

void sir_skeleton(std::span<const double> x, const ParamVector& p, std::span<double> dxdt) {
  const double infection = p[SirModel::kBeta] * x[SirModel::kI] * x[SirModel::kS] / p[SirModel::kN];
  const double recovery = p[SirModel::kGamma] * x[SirModel::kI];
  dxdt[SirModel::kS] = -infection;
  dxdt[SirModel::kI] = infection - recovery;
  dxdt[SirModel::kR] = recovery;
  dxdt[3] = infection;
}

SirModel::SirModel(double step_size) : PompModel(step_size), reactions_(sir_reactions()) {}

std::span<const std::string> SirModel::compartment_names() const { return kCompartments; }

std::vector<ParamSpec> SirModel::parameter_specs() const {
  return {
      {"beta", 1.0, Scale::log, false},
      {"gamma", 0.5, Scale::log, false},
      {"N", 10000.0, Scale::log, false},
      {"I0", 1.0, Scale::log, false},
      {"kappa", 1.0, Scale::logit, false, 0.0, 1.0},
  };
}

StateVector SirModel::initialize(const ParamVector& p, double t0, Rng&) const {
  const double n = std::round(p[kN]);
  const double i0 = std::round(p[kI0]);
  if (!(i0 >= 0.0 && i0 <= n)) throw ModelError("I0 must lie in [0, N]");
  StateVector x;
  x.size = 3;
  x.counts[kS] = n - i0;
  x.counts[kI] = i0;
  x.counts[kR] = 0.0;
  x.H = 0.0;
  x.t = t0;
  return x;
}

void SirModel::step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const {
  if (x.counts[kI] <= 0.0) {
    // no infectious individuals: every rate is zero
    x.t += dt;
    return;
  }
  sim::tau_leap_step(x, reactions_, p, dt, rng);
}

double SirModel::obs_log_density(Observation y, const StateVector& x, const ParamVector& p) const {
  return poisson_obs_logdensity(y, x.H, p[kKappa]);
}

Count SirModel::sample_observation(const StateVector& x, const ParamVector& p, Rng& rng) const {
  return sample_poisson_obs(x.H, p[kKappa], rng);
}

void SirModel::skeleton(std::span<const double> x, const ParamVector& p, double,
                        std::span<double> dxdt) const {
  sir_skeleton(x, p, dxdt);
}

}  // namespace pompif::models
