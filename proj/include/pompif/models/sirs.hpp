#pragma once

#include <array>
#include <span>
#include <string>

#include "pompif/model.hpp"
#include "pompif/simulators.hpp"

namespace pompif::models {

/// beta * (1 + rho * cos(2 pi t / w + phi)).
double seasonal_beta(double t, double beta, double rho, double w, double phi);

/// SIRS with births and deaths, cosine-forced transmission, multiplicative gamma
/// white noise on the infection rate, and negative-binomial reporting
/// Y_n ~ NegBin(mean kappa * H(t_n), variance m + psi m^2).
///
/// Births equal deaths in every tau-leap step, so N is held exactly constant.
/// The initial state is the endemic equilibrium of the unforced, noise-free skeleton.
///
/// The defaults (N = 1e6, beta = 3, rho = 0.3, phi = 1.5, sigma2 = 0.01, psi = 0.05,
/// gamma = 1, omega = 1/52, mu = 1/(70*52), w = 52) are this library's choices for a
/// rotavirus-like annual pattern; they are not estimates from data.
///
/// Event-driven (Gillespie) simulation ignores the transmission noise.
class SirsModel final : public PompModel {
 public:
  enum Param : std::size_t {
    kBeta, kRho, kW, kPhi, kSigma2, kPsi, kGamma, kOmega, kMu, kN, kKappa
  };
  enum Compartment : std::size_t { kS, kI, kR };

  /// With `transmission_noise` false, sigma2 is ignored and no gamma draws are made.
  explicit SirsModel(double step_size = 0.01, bool transmission_noise = true);

  [[nodiscard]] std::string_view name() const override { return "sirs"; }
  [[nodiscard]] std::span<const std::string> compartment_names() const override;
  [[nodiscard]] std::vector<ParamSpec> parameter_specs() const override;

  [[nodiscard]] StateVector initialize(const ParamVector& p, double t0, Rng& rng) const override;
  void step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const override;
  [[nodiscard]] double obs_log_density(Observation y, const StateVector& x,
                                       const ParamVector& p) const override;
  [[nodiscard]] Count sample_observation(const StateVector& x, const ParamVector& p,
                                         Rng& rng) const override;

  [[nodiscard]] bool has_skeleton() const override { return true; }
  void skeleton(std::span<const double> x, const ParamVector& p, double t,
                std::span<double> dxdt) const override;

  [[nodiscard]] const sim::ReactionSet* reactions() const override { return &reactions_; }
  [[nodiscard]] std::optional<double> conserved_population(const ParamVector& p) const override {
    return p[kN];
  }

 private:
  sim::ReactionSet reactions_;
  bool transmission_noise_;
};

/// Births into S at mu*N, S -> I at beta(t)*xi*I*S/N (counted in H), I -> R at gamma*I,
/// R -> S at omega*R, and deaths at mu from each compartment. xi is read from the
/// rate context's noise multiplier.
sim::ReactionSet sirs_reactions();

/// Noise-free (xi = 1) skeleton with forcing, births, deaths and waning; `x` holds (S, I, R, H).
void sirs_skeleton(std::span<const double> x, const ParamVector& p, double t,
                   std::span<double> dxdt);

/// Endemic equilibrium of the unforced skeleton rounded to integers summing to N:
/// S* = N (gamma + mu) / beta, I* = (N - S*) (omega + mu) / (omega + mu + gamma), R* = N - S* - I*.
/// Throws ModelError when beta / (gamma + mu) <= 1 or omega + mu == 0.
StateVector sirs_stationary_init(const ParamVector& p);

}  // namespace pompif::models
