#include "pompif/models/process.hpp"

#include <array>

#include "pompif/errors.hpp"
#include "pompif/models/sir.hpp"
#include "pompif/models/sirs.hpp"
#include "pompif/simulators.hpp"

namespace pompif::models {

SkeletonProcess::SkeletonProcess(std::shared_ptr<const PompModel> inner, double step_size)
    : PompModel(step_size), inner_(std::move(inner)) {
  if (!inner_->has_skeleton())
    throw ConfigError("model '" + std::string(inner_->name()) + "' has no deterministic skeleton");
}

void SkeletonProcess::step(StateVector& x, const ParamVector& p, double dt, Rng&) const {
  constexpr std::size_t kMax = StateVector::kMaxCompartments + 1;
  const std::size_t n = x.size + 1;
  std::array<double, kMax> y{}, k1{}, k2{}, k3{}, k4{}, tmp{};
  for (std::size_t i = 0; i < x.size; ++i) y[i] = x.counts[i];
  y[x.size] = x.H;
  const auto f = [&](const std::array<double, kMax>& in, double t, std::array<double, kMax>& out) {
    inner_->skeleton(std::span<const double>(in.data(), n), p, t, std::span<double>(out.data(), n));
  };
  const double t = x.t;
  f(y, t, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  f(tmp, t + 0.5 * dt, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  f(tmp, t + 0.5 * dt, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  f(tmp, t + dt, k4);
  for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  for (std::size_t i = 0; i < x.size; ++i) x.counts[i] = y[i];
  x.H = y[x.size];
  x.t = t + dt;
}

GillespieProcess::GillespieProcess(std::shared_ptr<const PompModel> inner, double step_size)
    : PompModel(step_size), inner_(std::move(inner)) {
  if (inner_->reactions() == nullptr)
    throw ConfigError("model '" + std::string(inner_->name()) + "' has no reaction network");
}

void GillespieProcess::step(StateVector& x, const ParamVector& p, double dt, Rng& rng) const {
  sim::gillespie_advance(x, *inner_->reactions(), p, x.t + dt, rng);
}

ProcessKind process_from_string(std::string_view name) {
  if (name == "tauleap" || name == "tau_leap" || name == "euler") return ProcessKind::tau_leap;
  if (name == "gillespie") return ProcessKind::gillespie;
  if (name == "skeleton" || name == "deterministic") return ProcessKind::skeleton;
  throw ConfigError("unknown process '" + std::string(name) + "'");
}

std::shared_ptr<const PompModel> make_model(std::string_view name, ProcessKind process,
                                            double step_size) {
  std::shared_ptr<const PompModel> base;
  if (name == "sir")
    base = std::make_shared<const SirModel>(step_size);
  else if (name == "sirs")
    base = std::make_shared<const SirsModel>(step_size);
  else
    throw ConfigError("unknown model '" + std::string(name) + "'");

  switch (process) {
    case ProcessKind::tau_leap: return base;
    case ProcessKind::gillespie: return std::make_shared<const GillespieProcess>(base, step_size);
    case ProcessKind::skeleton: return std::make_shared<const SkeletonProcess>(base, step_size);
  }
  return base;
}

}  // namespace pompif::models
