#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "pompif/errors.hpp"
#include "pompif/mif2.hpp"
#include "pompif/models/sir.hpp"
#include "pompif/profile.hpp"
#include "pompif/simulators.hpp"

using namespace pompif;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<double> quadratic_profile(const std::vector<double>& x, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> y;
  for (double v : x) y.push_back(-(v - 1.0) * (v - 1.0) + noise_sd * rng.normal(0.0, 1.0));
  return y;
}

}  // namespace

TEST_CASE("chi-square cutoff") {
  CHECK(profile::wilks_cutoff(0.95) == doctest::Approx(3.841458820694124 / 2.0).epsilon(1e-12));
  CHECK(profile::wilks_cutoff(0.95) == doctest::Approx(1.9207).epsilon(1e-4));
}

TEST_CASE("local quadratic smoother reproduces quadratics") {
  const auto x = linspace(-3, 5, 17);
  std::vector<double> y;
  for (double v : x) y.push_back(2.0 - 0.5 * v + 0.25 * v * v);
  for (double x0 : {-3.0, -1.1, 0.0, 2.5, 4.9})
    CHECK(profile::local_quadratic(x, y, 0.75, x0) == doctest::Approx(2.0 - 0.5 * x0 + 0.25 * x0 * x0).epsilon(1e-10));
  CHECK(profile::local_quadratic(x, y, 0.1, 1.0) == doctest::Approx(2.0 - 0.5 + 0.25).epsilon(1e-10));
}

TEST_CASE("noise-free quadratic profile gives the Wilks interval") {
  const auto x = linspace(-2, 4, 21);
  const auto y = quadratic_profile(x, 0.0, 0);
  const auto r = profile::mcap(x, y);
  CHECK(r.cutoff == doctest::Approx(1.9207294103470622).epsilon(1e-9));
  const double half = std::sqrt(profile::wilks_cutoff(0.95));
  CHECK(std::abs(r.ci_lower - (1.0 - half)) < 1e-6);
  CHECK(std::abs(r.ci_upper - (1.0 + half)) < 1e-6);
  CHECK(r.ci_lower == doctest::Approx(-0.386).epsilon(1e-3));
  CHECK(r.ci_upper == doctest::Approx(2.386).epsilon(1e-3));
  CHECK(r.mle == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.quad_a == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.se_stat == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));
  CHECK(r.se_mc < 1e-6);
  CHECK_FALSE(r.lower_open);
  CHECK_FALSE(r.upper_open);
  CHECK(r.warnings.empty());
}

TEST_CASE("Monte Carlo noise inflates the cutoff") {
  const auto x = linspace(-2, 4, 21);
  const auto clean = profile::mcap(x, quadratic_profile(x, 0.0, 0));
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto noisy = profile::mcap(x, quadratic_profile(x, 0.3, seed));
    CHECK(noisy.se_mc > 0.0);
    CHECK(noisy.cutoff > clean.cutoff);
    CHECK(noisy.cutoff >= profile::wilks_cutoff(0.95));
    CHECK(noisy.ci_lower <= noisy.mle);
    CHECK(noisy.mle <= noisy.ci_upper);
  }
}

TEST_CASE("cutoff and expected width are non-decreasing in the Monte Carlo error") {
  const auto x = linspace(-2, 4, 21);
  // same noise pattern at growing scale: the cutoff grows in every realization
  for (std::uint64_t seed : {11, 12, 13}) {
    double prev = 0.0;
    for (double sd : {0.0, 0.3, 1.0}) {
      const auto r = profile::mcap(x, quadratic_profile(x, sd, seed));
      CHECK(r.cutoff >= prev);
      prev = r.cutoff;
    }
  }
  // a noisy smoothed maximum also rises, so widths are compared on average
  const int runs = 200;
  double prev_mean = 0.0, prev_se = 0.0;
  for (double sd : {0.0, 0.3, 1.0}) {
    std::vector<double> widths;
    for (int s = 0; s < runs; ++s) {
      profile::McapOptions o;
      o.bootstrap = 100;
      o.seed = static_cast<std::uint64_t>(s);
      const auto r = profile::mcap(x, quadratic_profile(x, sd, 500 + static_cast<std::uint64_t>(s)), o);
      widths.push_back(r.ci_upper - r.ci_lower);
    }
    double m = 0.0, ss = 0.0;
    for (double w : widths) m += w;
    m /= runs;
    for (double w : widths) ss += (w - m) * (w - m);
    const double se = std::sqrt(ss / (runs - 1) / runs);
    CHECK(m >= prev_mean - 3.0 * std::hypot(se, prev_se));
    prev_mean = m;
    prev_se = se;
  }
}

TEST_CASE("shifting the profile leaves the interval unchanged") {
  const auto x = linspace(-2, 4, 21);
  auto y = quadratic_profile(x, 0.3, 7);
  const auto a = profile::mcap(x, y);
  for (double& v : y) v -= 1234.5;
  const auto b = profile::mcap(x, y);
  CHECK(b.ci_lower == doctest::Approx(a.ci_lower).epsilon(1e-8));
  CHECK(b.ci_upper == doctest::Approx(a.ci_upper).epsilon(1e-8));
  CHECK(b.cutoff == doctest::Approx(a.cutoff).epsilon(1e-8));
  CHECK(b.smoothed_max == doctest::Approx(a.smoothed_max - 1234.5).epsilon(1e-12));
}

TEST_CASE("degenerate inputs") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK_THROWS_AS(profile::mcap(x, x), std::invalid_argument);
  // increasing profile: maximum at the right edge, one-sided interval
  const auto g = linspace(0, 3, 15);
  std::vector<double> y;
  for (double v : g) y.push_back(3.0 * v);
  const auto r = profile::mcap(g, y);
  CHECK(r.upper_open);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.ci_upper == 3.0);
}

namespace {

struct ProfileFixture {
  models::SirModel model;
  ParamVector truth;
  TimeSeries data;
  profile::ProfileSettings settings;

  ProfileFixture() {
    auto specs = model.parameter_specs();
    specs[models::SirModel::kBeta].estimated = true;
    specs[models::SirModel::kGamma].estimated = true;
    specs[models::SirModel::kI0].value = 10;
    truth = ParamVector(std::make_shared<const ParamLayout>(specs));
    Rng rng(21);
    data = sim::simulate_path(model, truth, TimeSeries::weekly(50), sim::Method::tau_leap, rng).observations;
    settings.mif2.iterations = 30;
    settings.mif2.particles = 200;
    settings.mif2.rw_sd = {0.02, 0.02, 0, 0, 0};
    settings.starts = 1;
    settings.lower = {0.1, 0.45, 0, 0, 0};
    settings.upper = {3.0, 0.55, 0, 0, 0};
    settings.eval_replicates = 5;
    settings.eval.particles = 500;
  }
};

}  // namespace

TEST_CASE("profile likelihood contracts") {
  ProfileFixture f;
  SUBCASE("target must be estimated") {
    ParamVector p = f.truth.relabel(f.truth.layout().with_estimated("beta", false));
    const std::vector<double> grid{1.0};
    CHECK_THROWS_AS(profile::profile_likelihood(f.model, f.data, p, "beta", grid, f.settings, 1), ConfigError);
    CHECK_THROWS_AS(profile::profile_likelihood(f.model, f.data, f.truth, "beta", std::vector<double>{}, f.settings, 1), ConfigError);
  }
  SUBCASE("points come back sorted with the target fixed") {
    f.settings.mif2.iterations = 3;
    f.settings.mif2.particles = 50;
    f.settings.eval_replicates = 2;
    f.settings.eval.particles = 50;
    const std::vector<double> grid{1.2, 0.8, 1.0};
    const auto pts = profile::profile_likelihood(f.model, f.data, f.truth, "beta", grid, f.settings, 3);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].value == 0.8);
    CHECK(pts[2].value == 1.2);
    for (const auto& pt : pts) {
      CHECK(pt.maximizer.get("beta") == pt.value);
      CHECK(pt.maximizer.get("N") == 10000);
      CHECK(pt.se > 0.0);
    }
  }
  SUBCASE("profile at the maximizer matches an independent evaluation") {
    const std::vector<double> grid{1.0};
    const auto pts = profile::profile_likelihood(f.model, f.data, f.truth, "beta", grid, f.settings, 4);
    const auto check = mif::evaluate_candidates({pts[0].maximizer}, f.model, f.data, 5, f.settings.eval, 99);
    CHECK(std::abs(pts[0].loglik - check[0].mean_loglik) < 2.0 * std::hypot(pts[0].se, check[0].se));
  }
  SUBCASE("nuisance start box does not matter beyond Monte Carlo error") {
    const std::vector<double> grid{1.0};
    auto s1 = f.settings, s2 = f.settings;
    s1.lower[1] = 0.3;
    s1.upper[1] = 0.42;
    s2.lower[1] = 0.6;
    s2.upper[1] = 0.8;
    s1.mif2.rw_sd = s2.mif2.rw_sd = {0.05, 0.05, 0, 0, 0};
    s1.mif2.iterations = s2.mif2.iterations = 40;
    const auto a = profile::profile_likelihood(f.model, f.data, f.truth, "beta", grid, s1, 5);
    const auto b = profile::profile_likelihood(f.model, f.data, f.truth, "beta", grid, s2, 6);
    CHECK(std::abs(a[0].loglik - b[0].loglik) < 3.0 * std::hypot(a[0].se, b[0].se));
  }
}
