#pragma once

#include <memory>
#include <string_view>

#include "pompif/model.hpp"

namespace pompif::models {

/// Wraps a model so that its process is the deterministic skeleton, integrated
/// with classical RK4 over each substep. Observation parts are delegated.
class SkeletonProcess final : public PompModel {
 public:
  explicit SkeletonProcess(std::shared_ptr<const PompModel> inner, double step_size = 0.01);

  [[nodiscard]] std::string_view name() const override { return inner_->name(); }
  [[nodiscard]] std::span<const std::string> compartment_names() const override {
    return inner_->compartment_names();
  }
  [[nodiscard]] std::vector<ParamSpec> parameter_specs() const override {
    return inner_->parameter_specs();
  }
  [[nodiscard]] StateVector initialize(const ParamVector& p, double t0, Rng& rng) const override {
    return inner_->initialize(p, t0, rng);
  }
  void step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const override;
  [[nodiscard]] double obs_log_density(Observation y, const StateVector& x,
                                       const ParamVector& p) const override {
    return inner_->obs_log_density(y, x, p);
  }
  [[nodiscard]] Count sample_observation(const StateVector& x, const ParamVector& p,
                                         Rng& rng) const override {
    return inner_->sample_observation(x, p, rng);
  }
  [[nodiscard]] bool has_skeleton() const override { return true; }
  void skeleton(std::span<const double> x, const ParamVector& p, double t,
                std::span<double> dxdt) const override {
    inner_->skeleton(x, p, t, dxdt);
  }
  [[nodiscard]] std::optional<double> conserved_population(const ParamVector& p) const override {
    return inner_->conserved_population(p);
  }

 private:
  std::shared_ptr<const PompModel> inner_;
};

/// Wraps a model so that its process is simulated event by event (exact SSA).
class GillespieProcess final : public PompModel {
 public:
  explicit GillespieProcess(std::shared_ptr<const PompModel> inner, double step_size = 1.0);

  [[nodiscard]] std::string_view name() const override { return inner_->name(); }
  [[nodiscard]] std::span<const std::string> compartment_names() const override {
    return inner_->compartment_names();
  }
  [[nodiscard]] std::vector<ParamSpec> parameter_specs() const override {
    return inner_->parameter_specs();
  }
  [[nodiscard]] StateVector initialize(const ParamVector& p, double t0, Rng& rng) const override {
    return inner_->initialize(p, t0, rng);
  }
  void step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const override;
  [[nodiscard]] double obs_log_density(Observation y, const StateVector& x,
                                       const ParamVector& p) const override {
    return inner_->obs_log_density(y, x, p);
  }
  [[nodiscard]] Count sample_observation(const StateVector& x, const ParamVector& p,
                                         Rng& rng) const override {
    return inner_->sample_observation(x, p, rng);
  }
  [[nodiscard]] const sim::ReactionSet* reactions() const override { return inner_->reactions(); }

 private:
  std::shared_ptr<const PompModel> inner_;
};

enum class ProcessKind { tau_leap, gillespie, skeleton };

ProcessKind process_from_string(std::string_view name);

/// "sir" or "sirs" with the requested process. Throws ConfigError for unknown names.
std::shared_ptr<const PompModel> make_model(std::string_view name,
                                            ProcessKind process = ProcessKind::tau_leap,
                                            double step_size = 0.01);

}  // namespace pompif::models
