#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pompif/params.hpp"
#include "pompif/rng.hpp"
#include "pompif/state.hpp"

namespace pompif {

namespace sim {
struct ReactionSet;
}

/// A partially observed Markov process: initial-state simulator, process stepper,
/// observation density and sampler, and optionally a deterministic skeleton.
///
/// Implementations are immutable after construction and shared across workers.
/// All randomness comes from the Rng argument.
class PompModel {
 public:
  virtual ~PompModel() = default;

  [[nodiscard]] virtual std::string_view name() const = 0;
  [[nodiscard]] virtual std::span<const std::string> compartment_names() const = 0;

  /// Parameters the model reads, in index order, with default values and scales.
  [[nodiscard]] virtual std::vector<ParamSpec> parameter_specs() const = 0;

  /// Draw X_0 at time t0. H starts at 0.
  [[nodiscard]] virtual StateVector initialize(const ParamVector& p, double t0, Rng& rng) const = 0;

  /// Advance `x` by exactly `dt` (one simulation substep); x.t is updated.
  virtual void step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const = 0;

  /// log f(y | x; p). A missing observation contributes 0.
  [[nodiscard]] virtual double obs_log_density(Observation y, const StateVector& x,
                                               const ParamVector& p) const = 0;

  [[nodiscard]] virtual Count sample_observation(const StateVector& x, const ParamVector& p,
                                                 Rng& rng) const = 0;

  [[nodiscard]] virtual bool has_skeleton() const { return false; }
  /// d/dt of (compartments..., H). Only called when has_skeleton().
  virtual void skeleton(std::span<const double> x, const ParamVector& p, double t,
                        std::span<double> dxdt) const;

  /// Reaction network for event-driven simulation, if the model has one.
  [[nodiscard]] virtual const sim::ReactionSet* reactions() const { return nullptr; }

  /// Total population when the process conserves it.
  [[nodiscard]] virtual std::optional<double> conserved_population(const ParamVector&) const {
    return std::nullopt;
  }

  [[nodiscard]] double step_size() const noexcept { return step_size_; }

 protected:
  explicit PompModel(double step_size);

 private:
  double step_size_;
};

/// Model's parameter layout with defaults.
std::shared_ptr<const ParamLayout> default_layout(const PompModel& model);

/// Number of equal substeps used to cover [from, to] with the model's step size.
std::size_t substep_count(double from, double to, double step_size);

/// Advance `x` from x.t to `to` in equal substeps no longer than the model step.
/// H keeps accumulating; callers reset it at observation times.
void advance(const PompModel& model, StateVector& x, const ParamVector& p, double to, Rng& rng);

struct ValidationReport {
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

struct ValidationOptions {
  std::size_t trajectories = 20;
  std::size_t observation_times = 30;
  std::size_t sampler_draws = 2000;
  std::size_t sampler_states = 3;
  std::uint64_t seed = 1;
};

/// Simulates the model and reports violated invariants: negative counts,
/// non-conserved population, and observation samplers whose mean differs from
/// the density's mean by more than 3 standard errors. Never throws for model
/// defects; they are listed in the report.
ValidationReport validate_model(const PompModel& model, const ParamVector& p,
                                const ValidationOptions& options = {});

}  // namespace pompif
