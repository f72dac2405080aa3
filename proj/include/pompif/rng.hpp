#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pompif {

/// Random number source passed explicitly to every stochastic routine.
///
/// Independent streams are derived from a master seed plus a path of integer
/// keys (e.g. {iteration, particle}), so results never depend on the order in
/// which parallel jobs are scheduled.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed);

  /// Stream keyed by (seed, path...). Distinct paths give statistically independent streams.
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  /// Uniform on [0, 1).
  double uniform();
  double normal(double mean, double sd);
  /// Exponential waiting time with the given rate (> 0).
  double exponential(double rate);
  std::int64_t binomial(std::int64_t n, double p);
  std::int64_t poisson(double mean);
  /// Gamma with shape/scale parametrization (mean shape*scale).
  double gamma(double shape, double scale);
  /// Negative binomial with the given mean and dispersion psi (variance mean + psi*mean^2).
  std::int64_t negative_binomial(double mean, double psi);

  engine_type& engine() noexcept { return engine_; }

 private:
  explicit Rng(engine_type engine) : engine_(std::move(engine)) {}

  engine_type engine_;
};

}  // namespace pompif
