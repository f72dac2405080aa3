#include "pompif/models/sirs.hpp"

#include <cmath>
#include <numbers>

#include "pompif/errors.hpp"
#include "pompif/models/observation.hpp"

namespace pompif::models {

namespace {
const std::array<std::string, 3> kCompartments{"S", "I", "R"};
using M = SirsModel;
}  // namespace

double seasonal_beta(double t, double beta, double rho, double w, double phi) {
  return beta * (1.0 + rho * std::cos(2.0 * std::numbers::pi / w * t + phi));
}

sim::ReactionSet sirs_reactions() {
  using sim::kOutside;
  using sim::RateContext;
  const auto mu = [](const StateVector&, const ParamVector& p, const RateContext&) {
    return p[M::kMu];
  };
  std::vector<sim::Reaction> r;
  r.push_back({"birth", kOutside, M::kS,
               [](const StateVector&, const ParamVector& p, const RateContext&) {
                 return p[M::kMu] * p[M::kN];
               },
               false});
  r.push_back({"infection", M::kS, M::kI,
               [](const StateVector& x, const ParamVector& p, const RateContext& ctx) {
                 return seasonal_beta(ctx.t, p[M::kBeta], p[M::kRho], p[M::kW], p[M::kPhi]) *
                        ctx.noise * x.counts[M::kI] / p[M::kN];
               },
               true});
  r.push_back({"recovery", M::kI, M::kR,
               [](const StateVector&, const ParamVector& p, const RateContext&) {
                 return p[M::kGamma];
               },
               false});
  r.push_back({"waning", M::kR, M::kS,
               [](const StateVector&, const ParamVector& p, const RateContext&) {
                 return p[M::kOmega];
               },
               false});
  r.push_back({"death_S", M::kS, kOutside, mu, false});
  r.push_back({"death_I", M::kI, kOutside, mu, false});
  r.push_back({"death_R", M::kR, kOutside, mu, false});
  return sim::ReactionSet(3, std::move(r), true);
}

void sirs_skeleton(std::span<const double> x, const ParamVector& p, double t,
                   std::span<double> dxdt) {
  const double n = p[M::kN];
  const double beta_t = seasonal_beta(t, p[M::kBeta], p[M::kRho], p[M::kW], p[M::kPhi]);
  const double infection = beta_t * x[M::kI] * x[M::kS] / n;
  const double mu = p[M::kMu];
  dxdt[M::kS] = mu * n - infection + p[M::kOmega] * x[M::kR] - mu * x[M::kS];
  dxdt[M::kI] = infection - p[M::kGamma] * x[M::kI] - mu * x[M::kI];
  dxdt[M::kR] = p[M::kGamma] * x[M::kI] - p[M::kOmega] * x[M::kR] - mu * x[M::kR];
  dxdt[3] = infection;
}

StateVector sirs_stationary_init(const ParamVector& p) {
  const double n = p[M::kN];
  const double beta = p[M::kBeta];
  const double gamma = p[M::kGamma];
  const double mu = p[M::kMu];
  const double omega = p[M::kOmega];
  if (!(beta / (gamma + mu) > 1.0))
    throw ModelError("no endemic equilibrium: beta / (gamma + mu) <= 1");
  if (!(omega + mu > 0.0))
    throw ModelError("no endemic equilibrium: immunity is permanent and there is no turnover");
  const double s_star = n * (gamma + mu) / beta;
  const double i_star = (n - s_star) * (omega + mu) / (omega + mu + gamma);

  StateVector x;
  x.size = 3;
  x.counts[M::kS] = std::round(s_star);
  x.counts[M::kI] = std::round(i_star);
  x.counts[M::kR] = std::round(n) - x.counts[M::kS] - x.counts[M::kI];
  return x;
}

SirsModel::SirsModel(double step_size, bool transmission_noise)
    : PompModel(step_size), reactions_(sirs_reactions()), transmission_noise_(transmission_noise) {}

std::span<const std::string> SirsModel::compartment_names() const { return kCompartments; }

std::vector<ParamSpec> SirsModel::parameter_specs() const {
  const double two_pi = 2.0 * std::numbers::pi;
  return {
      {"beta", 3.0, Scale::log, false},
      {"rho", 0.3, Scale::logit, false, 0.0, 1.0},
      {"w", 52.0, Scale::log, false},
      {"phi", 1.5, Scale::logit, false, 0.0, two_pi},
      {"sigma2", 0.01, Scale::log, false},
      {"psi", 0.05, Scale::log, false},
      {"gamma", 1.0, Scale::log, false},
      {"omega", 1.0 / 52.0, Scale::log, false},
      {"mu", 1.0 / (70.0 * 52.0), Scale::log, false},
      {"N", 1.0e6, Scale::log, false},
      {"kappa", 1.0, Scale::logit, false, 0.0, 1.0},
  };
}

StateVector SirsModel::initialize(const ParamVector& p, double t0, Rng&) const {
  StateVector x = sirs_stationary_init(p);
  x.t = t0;
  return x;
}

void SirsModel::step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const {
  const double noise =
      transmission_noise_ ? sim::gamma_noise_increment(dt, p[kSigma2], rng) / dt : 1.0;
  sim::tau_leap_step(x, reactions_, p, dt, rng, noise);
}

double SirsModel::obs_log_density(Observation y, const StateVector& x,
                                  const ParamVector& p) const {
  return negbin_obs_logdensity(y, x.H, p[kPsi], p[kKappa]);
}

Count SirsModel::sample_observation(const StateVector& x, const ParamVector& p, Rng& rng) const {
  return sample_negbin_obs(x.H, p[kPsi], p[kKappa], rng);
}

void SirsModel::skeleton(std::span<const double> x, const ParamVector& p, double t,
                         std::span<double> dxdt) const {
  sirs_skeleton(x, p, t, dxdt);
}

}  // namespace pompif::models
