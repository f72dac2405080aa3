#include <doctest.h>

#include <cmath>

#include "pompif/errors.hpp"
#include "pompif/mif2.hpp"
#include "pompif/models/sir.hpp"
#include "pompif/simulators.hpp"
#include "test_models.hpp"

using namespace pompif;
using testing::sample_mean;

namespace {

struct SirFixture {
  models::SirModel model;
  std::shared_ptr<const ParamLayout> layout;
  ParamVector truth;
  TimeSeries data;

  SirFixture() {
    auto specs = model.parameter_specs();
    specs[models::SirModel::kBeta].estimated = true;
    specs[models::SirModel::kGamma].estimated = true;
    specs[models::SirModel::kI0].value = 10;
    layout = std::make_shared<const ParamLayout>(specs);
    truth = ParamVector(layout);
    Rng rng(21);
    data = sim::simulate_path(model, truth, TimeSeries::weekly(50), sim::Method::tau_leap, rng).observations;
  }

  mif::Mif2Settings settings(std::size_t M, std::size_t J, double sd) const {
    mif::Mif2Settings s;
    s.iterations = M;
    s.particles = J;
    s.rw_sd.assign(layout->size(), 0.0);
    s.rw_sd[models::SirModel::kBeta] = sd;
    s.rw_sd[models::SirModel::kGamma] = sd;
    return s;
  }
};

}  // namespace

TEST_CASE("cooling schedule") {
  CHECK(mif::cooling_intensity(50, 0.05, 50) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(mif::cooling_intensity(0, 0.05, 50) == 1.0);
  CHECK(mif::cooling_intensity(25, 0.05, 50) == doctest::Approx(0.2236067977).epsilon(1e-9));
  for (int m = 1; m < 200; ++m)
    CHECK(mif::cooling_intensity(m + 1, 0.05, 50) < mif::cooling_intensity(m, 0.05, 50));
}

TEST_CASE("random-walk perturbation") {
  Rng rng(5);
  std::vector<double> theta{0.3, -1.2};
  const std::vector<double> zero{0.0, 0.0};
  mif::perturb(theta, zero, rng);
  CHECK(theta == std::vector<double>{0.3, -1.2});

  const std::vector<double> sd{0.02, 0.0};
  std::vector<double> draws;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    std::vector<double> t{1.0, 2.0};
    mif::perturb(t, sd, rng);
    REQUIRE(t[1] == 2.0);
    draws.push_back(t[0]);
  }
  const double s = std::sqrt(testing::sample_var(draws));
  // sd of the sample sd for normal data is about sigma / sqrt(2 (n - 1))
  CHECK(std::abs(s - 0.02) < 3.0 * 0.02 / std::sqrt(2.0 * (n - 1)));
  CHECK(std::abs(sample_mean(draws) - 1.0) < 3.0 * 0.02 / std::sqrt(n));
}

TEST_CASE("settings validation") {
  SirFixture f;
  auto s = f.settings(10, 10, 0.02);
  CHECK_NOTHROW(s.validate(*f.layout));
  s.cooling_fraction = 1.0;
  CHECK_THROWS_AS(s.validate(*f.layout), ConfigError);
  s = f.settings(0, 10, 0.02);
  CHECK_THROWS_AS(s.validate(*f.layout), ConfigError);
  s = f.settings(10, 10, -0.1);
  CHECK_THROWS_AS(s.validate(*f.layout), ConfigError);
  s = f.settings(10, 10, 0.02);
  s.rw_sd.pop_back();
  CHECK_THROWS_AS(s.validate(*f.layout), ConfigError);
}

TEST_CASE("with zero random-walk sd IF2 is a sequence of particle filters") {
  SirFixture f;
  const auto s = f.settings(3, 100, 0.0);
  const auto swarm = mif::ParamSwarm::replicate(f.truth, 100);
  const auto r = mif::mif2(f.model, f.data, swarm, s, 11);
  CHECK(r.swarm.transformed == swarm.transformed);
  REQUIRE(r.loglik.size() == 3);
  pf::FilterOptions o;
  o.particles = 100;
  for (std::size_t m = 1; m <= 3; ++m) {
    const auto plain = pf::particle_filter(f.model, f.data, f.truth, o, mif::iteration_seed(11, m));
    CHECK(r.loglik[m - 1] == plain.log_likelihood);
    CHECK(r.nfail[m - 1] == plain.nfail());
  }
  for (std::size_t i = 0; i < f.truth.size(); ++i) CHECK(r.estimate[i] == doctest::Approx(f.truth[i]).epsilon(1e-14));
}

TEST_CASE("fixed parameters never move and results ignore worker count") {
  SirFixture f;
  auto s = f.settings(4, 60, 0.1);
  Rng rng(2);
  const std::vector<double> lo{0.5, 0.2, 0, 0, 0}, hi{2.0, 1.0, 0, 0, 0};
  const auto start = mif::draw_from_box(f.truth, lo, hi, rng);
  const auto swarm = mif::ParamSwarm::replicate(start, 60);
  const auto a = mif::mif2(f.model, f.data, swarm, s, 3);
  s.workers = 4;
  const auto b = mif::mif2(f.model, f.data, swarm, s, 3);
  CHECK(a.swarm.transformed == b.swarm.transformed);
  CHECK(a.loglik == b.loglik);
  CHECK(a.loglik.size() == 4);
  CHECK(a.param_means.size() == 4);
  CHECK(a.param_means[0].size() == 2);
  for (std::size_t j = 0; j < 60; ++j) {
    const auto p = a.swarm.natural(j);
    for (std::size_t i : {2, 3, 4}) REQUIRE(p[i] == f.truth[i]);
  }
  CHECK_NOTHROW(a.estimate.validate());
  // members do move under perturbation
  CHECK(a.swarm.transformed != swarm.transformed);
}

TEST_CASE("box draws") {
  SirFixture f;
  Rng rng(1);
  const std::vector<double> lo{0.1, 0.05, 0, 0, 0}, hi{3.0, 2.0, 0, 0, 0};
  for (int k = 0; k < 1000; ++k) {
    const auto p = mif::draw_from_box(f.truth, lo, hi, rng);
    REQUIRE(p[0] >= 0.1);
    REQUIRE(p[0] <= 3.0);
    REQUIRE(p[1] >= 0.05);
    REQUIRE(p[1] <= 2.0);
    REQUIRE(p[2] == f.truth[2]);
  }
  const std::vector<double> bad{5.0, 0.05, 0, 0, 0};
  CHECK_THROWS_AS(mif::draw_from_box(f.truth, bad, hi, rng), ConfigError);
}

TEST_CASE("IF2 climbs toward the truth from a poor start") {
  SirFixture f;
  auto s = f.settings(25, 300, 0.05);
  ParamVector start = f.truth;
  start.set("beta", 1.8);
  start.set("gamma", 0.9);
  const auto r = mif::mif2(f.model, f.data, mif::ParamSwarm::replicate(start, 300), s, 17);
  CHECK(std::abs(r.estimate.get("beta") - 1.0) < std::abs(1.8 - 1.0));
  const double early = (r.loglik[0] + r.loglik[1] + r.loglik[2]) / 3.0;
  const double late = (r.loglik[22] + r.loglik[23] + r.loglik[24]) / 3.0;
  CHECK(late > early);
}

TEST_CASE("candidate evaluation") {
  SirFixture f;
  pf::FilterOptions o;
  o.particles = 300;
  SUBCASE("single candidate") {
    const auto r = mif::evaluate_candidates({f.truth}, f.model, f.data, 3, o, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].index == 0);
    CHECK(r[0].replicates.size() == 3);
  }
  SUBCASE("truth beats doubled beta") {
    ParamVector off = f.truth;
    off.set("beta", 2.0);
    const auto r = mif::evaluate_candidates({off, f.truth}, f.model, f.data, 4, o, 2);
    CHECK(r[0].index == 1);
    CHECK(r[0].mean_loglik > r[1].mean_loglik);
  }
  SUBCASE("too few replicates") {
    CHECK_THROWS_AS(mif::evaluate_candidates({f.truth}, f.model, f.data, 1, o, 1), ConfigError);
  }
  SUBCASE("worker count does not change scores") {
    const auto a = mif::evaluate_candidates({f.truth, f.truth}, f.model, f.data, 3, o, 9, 1);
    const auto b = mif::evaluate_candidates({f.truth, f.truth}, f.model, f.data, 3, o, 9, 3);
    for (std::size_t k = 0; k < 2; ++k) CHECK(a[k].replicates == b[k].replicates);
  }
}

TEST_CASE("candidate SE shrinks like one over root replicates") {
  const testing::HmmModel hmm;
  const ParamVector p(default_layout(hmm));
  TimeSeries data = TimeSeries::weekly(20);
  Rng rng(4);
  for (auto& v : data.values) v = rng.uniform() < 0.5 ? 0 : 1;
  pf::FilterOptions o;
  o.particles = 20;
  std::vector<double> se5, se20;
  for (std::uint64_t s = 0; s < 200; ++s) {
    se5.push_back(mif::evaluate_candidates({p}, hmm, data, 5, o, s)[0].se);
    se20.push_back(mif::evaluate_candidates({p}, hmm, data, 20, o, 1000 + s)[0].se);
  }
  // E[s] carries the c4 bias: c4(5) = 0.9400, c4(20) = 0.9869
  const double expected = 2.0 * 0.9400 / 0.9869;
  const double ratio = sample_mean(se5) / sample_mean(se20);
  CHECK(ratio == doctest::Approx(expected).epsilon(0.15));
}
