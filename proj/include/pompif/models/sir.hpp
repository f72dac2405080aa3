#pragma once

#include <array>
#include <span>
#include <string>

#include "pompif/model.hpp"
#include "pompif/simulators.hpp"

namespace pompif::models {

/// Closed-population SIR with infection-time reporting: Y_n ~ Pois(kappa * H(t_n)).
class SirModel final : public PompModel {
 public:
  enum Param : std::size_t { kBeta, kGamma, kN, kI0, kKappa };
  enum Compartment : std::size_t { kS, kI, kR };

  explicit SirModel(double step_size = 0.01);

  [[nodiscard]] std::string_view name() const override { return "sir"; }
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
};

/// S -> I at beta*I*S/N (counted in H) and I -> R at gamma*I.
sim::ReactionSet sir_reactions();

/// dS = -beta I S / N, dI = beta I S / N - gamma I, dR = gamma I, dH = beta I S / N.
/// `x` holds (S, I, R, H).
void sir_skeleton(std::span<const double> x, const ParamVector& p, std::span<double> dxdt);

}  // namespace pompif::models
