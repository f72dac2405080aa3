#include "pompif/simulators.hpp"

#include <array>
#include <cmath>

#include "pompif/errors.hpp"

namespace pompif::sim {

namespace {
constexpr std::size_t kMaxReactions = 16;
}

ReactionSet::ReactionSet(std::size_t compartments, std::vector<Reaction> reactions,
                         bool births_balance_deaths)
    : compartments(compartments),
      reactions(std::move(reactions)),
      births_balance_deaths(births_balance_deaths),
      by_source(compartments) {
  if (compartments > StateVector::kMaxCompartments)
    throw ConfigError("too many compartments for a reaction set");
  if (this->reactions.size() > kMaxReactions) throw ConfigError("too many reactions");
  for (std::size_t k = 0; k < this->reactions.size(); ++k) {
    const auto& r = this->reactions[k];
    const auto in_range = [compartments](int c) {
      return c == kOutside || (c >= 0 && static_cast<std::size_t>(c) < compartments);
    };
    if (!in_range(r.source) || !in_range(r.destination))
      throw ConfigError("reaction '" + r.name + "' refers to an unknown compartment");
    if (!r.rate) throw ConfigError("reaction '" + r.name + "' has no rate function");
    if (r.source == kOutside)
      births.push_back(k);
    else
      by_source[static_cast<std::size_t>(r.source)].push_back(k);
  }
}

double ReactionSet::propensity(std::size_t k, const StateVector& x, const ParamVector& p,
                               const RateContext& ctx) const {
  const auto& r = reactions[k];
  const double rate = r.rate(x, p, ctx);
  if (!(rate >= 0.0) || !std::isfinite(rate))
    throw ModelError("reaction '" + r.name + "' has invalid rate " + std::to_string(rate));
  return r.source == kOutside ? rate : rate * x.counts[static_cast<std::size_t>(r.source)];
}

GillespieEvent gillespie_step(const StateVector& x, const ReactionSet& rs, const ParamVector& p,
                              Rng& rng, double noise) {
  std::array<double, kMaxReactions> a{};
  const RateContext ctx{x.t, noise};
  double total = 0.0;
  for (std::size_t k = 0; k < rs.reactions.size(); ++k) {
    a[k] = rs.propensity(k, x, p, ctx);
    total += a[k];
  }
  GillespieEvent ev{x, x.t};
  if (total <= 0.0) {
    ev.time = std::numeric_limits<double>::infinity();
    return ev;
  }
  ev.time = x.t + rng.exponential(total);

  const double target = rng.uniform() * total;
  std::size_t chosen = 0;
  double cum = 0.0;
  for (std::size_t k = 0; k < rs.reactions.size(); ++k) {
    if (a[k] <= 0.0) continue;
    chosen = k;
    cum += a[k];
    if (target < cum) break;
  }
  const auto& r = rs.reactions[chosen];
  if (r.source != kOutside) ev.state.counts[static_cast<std::size_t>(r.source)] -= 1.0;
  if (r.destination != kOutside) ev.state.counts[static_cast<std::size_t>(r.destination)] += 1.0;
  if (r.counts_incidence) ev.state.H += 1.0;
  ev.state.t = ev.time;
  return ev;
}

void gillespie_advance(StateVector& x, const ReactionSet& rs, const ParamVector& p, double to,
                       Rng& rng) {
  while (true) {
    GillespieEvent ev = gillespie_step(x, rs, p, rng);
    if (!(ev.time <= to)) break;
    x = ev.state;
  }
  x.t = to;
}

void euler_multinomial_exits(Count n, std::span<const double> rates, double tau, Rng& rng,
                             std::span<Count> out) {
  const std::size_t routes = rates.size();
  double total_rate = 0.0;
  for (double r : rates) total_rate += r;
  for (std::size_t k = 0; k <= routes; ++k) out[k] = 0;
  out[routes] = n;
  if (n <= 0 || total_rate <= 0.0) return;

  // Exit by any route with probability 1 - exp(-R tau), then split the leavers
  // across routes in proportion to their rates. Equivalent to one multinomial draw.
  Count leaving = rng.binomial(n, -std::expm1(-total_rate * tau));
  out[routes] = n - leaving;
  double remaining_rate = total_rate;
  for (std::size_t k = 0; k < routes && leaving > 0; ++k) {
    if (k + 1 == routes || remaining_rate <= rates[k]) {
      out[k] = leaving;
      leaving = 0;
      break;
    }
    const Count taken = rng.binomial(leaving, rates[k] / remaining_rate);
    out[k] = taken;
    leaving -= taken;
    remaining_rate -= rates[k];
  }
}

std::vector<Count> euler_multinomial_exits(Count n, std::span<const double> rates, double tau,
                                           Rng& rng) {
  std::vector<Count> out(rates.size() + 1);
  euler_multinomial_exits(n, rates, tau, rng, out);
  return out;
}

void tau_leap_step(StateVector& x, const ReactionSet& rs, const ParamVector& p, double tau,
                   Rng& rng, double noise) {
  const RateContext ctx{x.t, noise};
  std::array<Count, kMaxReactions> events{};
  std::array<double, kMaxReactions> route_rates{};
  std::array<Count, kMaxReactions + 1> exits{};

  for (std::size_t c = 0; c < rs.compartments; ++c) {
    const auto& routes = rs.by_source[c];
    if (routes.empty()) continue;
    const auto n = static_cast<Count>(x.counts[c]);
    if (n <= 0) continue;
    for (std::size_t i = 0; i < routes.size(); ++i) {
      const double rate = rs.reactions[routes[i]].rate(x, p, ctx);
      if (!(rate >= 0.0) || !std::isfinite(rate))
        throw ModelError("reaction '" + rs.reactions[routes[i]].name + "' has invalid rate " +
                         std::to_string(rate));
      route_rates[i] = rate;
    }
    euler_multinomial_exits(n, std::span<const double>(route_rates.data(), routes.size()), tau,
                            rng, std::span<Count>(exits.data(), routes.size() + 1));
    for (std::size_t i = 0; i < routes.size(); ++i) events[routes[i]] = exits[i];
  }

  if (!rs.births.empty()) {
    if (rs.births_balance_deaths) {
      Count deaths = 0;
      for (std::size_t k = 0; k < rs.reactions.size(); ++k) {
        if (rs.reactions[k].source != kOutside && rs.reactions[k].destination == kOutside)
          deaths += events[k];
      }
      events[rs.births.front()] = deaths;
    } else {
      for (std::size_t k : rs.births) events[k] = rng.poisson(rs.propensity(k, x, p, ctx) * tau);
    }
  }

  for (std::size_t k = 0; k < rs.reactions.size(); ++k) {
    if (events[k] == 0) continue;
    const auto& r = rs.reactions[k];
    const auto e = static_cast<double>(events[k]);
    if (r.source != kOutside) x.counts[static_cast<std::size_t>(r.source)] -= e;
    if (r.destination != kOutside) x.counts[static_cast<std::size_t>(r.destination)] += e;
    if (r.counts_incidence) x.H += e;
  }
  x.t += tau;
}

double gamma_noise_increment(double tau, double sigma2, Rng& rng) {
  if (sigma2 == 0.0) return tau;
  return rng.gamma(tau / sigma2, sigma2);
}

SimulatedPath simulate_path(const PompModel& model, const ParamVector& p,
                            const TimeSeries& times, Method method, Rng& rng) {
  const ReactionSet* rs = nullptr;
  if (method == Method::gillespie) {
    rs = model.reactions();
    if (rs == nullptr)
      throw ModelError("model '" + std::string(model.name()) +
                       "' does not support Gillespie simulation");
  }
  SimulatedPath path;
  path.observations.t0 = times.t0;
  path.observations.times = times.times;
  path.observations.values.reserve(times.size());
  path.states.reserve(times.size());

  StateVector x = model.initialize(p, times.t0, rng);
  for (double t : times.times) {
    if (rs != nullptr)
      gillespie_advance(x, *rs, p, t, rng);
    else
      advance(model, x, p, t, rng);
    path.states.push_back(x);
    path.observations.values.emplace_back(model.sample_observation(x, p, rng));
    x.H = 0.0;
  }
  return path;
}

}  // namespace pompif::sim
