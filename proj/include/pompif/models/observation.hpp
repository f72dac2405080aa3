#pragma once

#include "pompif/rng.hpp"
#include "pompif/state.hpp"

namespace pompif::models {

/// log Pois(y; kappa * H). Missing -> 0; a zero mean gives 0 for y == 0 and -inf otherwise.
double poisson_obs_logdensity(Observation y, double H, double kappa);

/// Negative binomial with mean m = kappa * H and variance m + psi * m^2.
/// Missing -> 0; a zero mean is handled as in the Poisson case.
double negbin_obs_logdensity(Observation y, double H, double psi, double kappa);

Count sample_poisson_obs(double H, double kappa, Rng& rng);
Count sample_negbin_obs(double H, double psi, double kappa, Rng& rng);

}  // namespace pompif::models
