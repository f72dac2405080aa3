#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pompif/model.hpp"
#include "pompif/params.hpp"
#include "pompif/rng.hpp"
#include "pompif/state.hpp"

namespace pompif::sim {

/// Source of a birth or destination of a death.
inline constexpr int kOutside = -1;

/// Time and transmission-noise multiplier seen by rate functions.
struct RateContext {
  double t = 0.0;
  double noise = 1.0;  // xi(t); 1 when there is no transmission noise
};

using RateFn = std::function<double(const StateVector&, const ParamVector&, const RateContext&)>;

/// One transition between compartments.
///
/// For reactions with a source compartment `rate` is per capita, so the
/// propensity is rate * x[source]. Births (source == kOutside) use an absolute rate.
struct Reaction {
  std::string name;
  int source = kOutside;
  int destination = kOutside;
  RateFn rate;
  bool counts_incidence = false;  // increments H
};

struct ReactionSet {
  ReactionSet(std::size_t compartments, std::vector<Reaction> reactions,
              bool births_balance_deaths = false);

  std::size_t compartments;
  std::vector<Reaction> reactions;
  /// In tau-leaping, births equal the step's total deaths so the population is exactly constant.
  bool births_balance_deaths;

  /// Absolute event rate of reaction k. Throws ModelError if negative or non-finite.
  [[nodiscard]] double propensity(std::size_t k, const StateVector& x, const ParamVector& p,
                                  const RateContext& ctx) const;

  // reactions grouped by source compartment, filled by the constructor
  std::vector<std::vector<std::size_t>> by_source;
  std::vector<std::size_t> births;
};

struct GillespieEvent {
  StateVector state;
  double time = 0.0;  // +infinity once no event can occur
};

/// One event of the exact stochastic simulation algorithm. `x.t` is the current
/// time. If the total rate is zero the state is returned unchanged with time +inf.
GillespieEvent gillespie_step(const StateVector& x, const ReactionSet& rs, const ParamVector& p,
                              Rng& rng, double noise = 1.0);

/// Runs events until `to`; events past `to` are discarded (the process is memoryless).
void gillespie_advance(StateVector& x, const ReactionSet& rs, const ParamVector& p, double to,
                       Rng& rng);

/// Euler-multinomial exits of `n` individuals over `tau` given per-capita route rates.
/// out[k] is the number leaving by route k, out[rates.size()] the number staying.
void euler_multinomial_exits(Count n, std::span<const double> rates, double tau, Rng& rng,
                             std::span<Count> out);
std::vector<Count> euler_multinomial_exits(Count n, std::span<const double> rates, double tau,
                                           Rng& rng);

/// One tau-leap step: all exits drawn from the pre-step state, then applied together.
void tau_leap_step(StateVector& x, const ReactionSet& rs, const ParamVector& p, double tau,
                   Rng& rng, double noise = 1.0);

/// Increment of the integrated gamma white noise over `tau`: Gamma(shape tau/sigma2,
/// scale sigma2), mean tau and variance tau*sigma2. Returns exactly tau when sigma2 == 0
/// without consuming random numbers.
double gamma_noise_increment(double tau, double sigma2, Rng& rng);

enum class Method { tau_leap, gillespie };

struct SimulatedPath {
  std::vector<StateVector> states;  // recorded at each observation time, before H reset
  TimeSeries observations;
};

/// Simulates the latent process over the observation times and samples an
/// observation at each. Gillespie requires the model to expose its reactions.
SimulatedPath simulate_path(const PompModel& model, const ParamVector& p,
                            const TimeSeries& times, Method method, Rng& rng);

}  // namespace pompif::sim
