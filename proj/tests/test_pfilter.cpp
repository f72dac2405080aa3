#include <doctest.h>

#include <cmath>
#include <limits>

#include "pompif/errors.hpp"
#include "pompif/models/process.hpp"
#include "pompif/models/sir.hpp"
#include "pompif/pfilter.hpp"
#include "pompif/simulators.hpp"
#include "test_models.hpp"

using namespace pompif;
using testing::sample_mean;
using testing::sample_var;

namespace {

TimeSeries hmm_data(const std::vector<Observation>& ys) {
  TimeSeries d = TimeSeries::weekly(ys.size());
  d.values = ys;
  return d;
}

const std::vector<Observation> kHmmObs{0, 1, 1, 0, 0, 0, 1, 1, 1, 0};

pf::FilterOptions opts(std::size_t J) {
  pf::FilterOptions o;
  o.particles = J;
  return o;
}

// Data simulated from the stochastic SIR at the truth (10 initial infectives so it takes off).
struct SirCase {
  std::shared_ptr<const PompModel> model = std::make_shared<models::SirModel>();
  ParamVector p{default_layout(*model)};
  TimeSeries data;
  SirCase() {
    p.set("I0", 10);
    Rng rng(77);
    data = sim::simulate_path(*model, p, TimeSeries::weekly(50), sim::Method::tau_leap, rng).observations;
  }
};

}  // namespace

TEST_CASE("particle filter is unbiased for the likelihood of a hidden Markov chain") {
  const testing::HmmModel hmm;
  const ParamVector p(default_layout(hmm));
  const auto data = hmm_data(kHmmObs);
  const double exact = hmm.forward_likelihood(kHmmObs);
  for (auto scheme : {pf::Resampling::multinomial, pf::Resampling::systematic}) {
    auto o = opts(200);
    o.resampling = scheme;
    std::vector<double> L;
    for (std::uint64_t s = 0; s < 400; ++s)
      L.push_back(std::exp(pf::particle_filter(hmm, data, p, o, s).log_likelihood));
    CHECK(std::abs(sample_mean(L) - exact) < 3.0 * std::sqrt(sample_var(L) / 400.0));
  }
}

TEST_CASE("naive Monte Carlo is unbiased on the hidden Markov chain") {
  const testing::HmmModel hmm;
  const ParamVector p(default_layout(hmm));
  const auto data = hmm_data(kHmmObs);
  const double exact = hmm.forward_likelihood(kHmmObs);
  // the per-run likelihood is right-skewed, so use more runs than the filter test
  std::vector<double> L;
  for (std::uint64_t s = 0; s < 2000; ++s)
    L.push_back(std::exp(pf::naive_mc_loglik(hmm, data, p, 200, 50000 + s).log_likelihood));
  CHECK(std::abs(sample_mean(L) - exact) < 3.0 * std::sqrt(sample_var(L) / 2000.0));
}

TEST_CASE("log-likelihood variance does not grow with J") {
  const testing::HmmModel hmm;
  const ParamVector p(default_layout(hmm));
  std::vector<Observation> ys;
  Rng rng(3);
  for (int n = 0; n < 50; ++n) ys.emplace_back(rng.uniform() < 0.5 ? 0 : 1);
  const auto data = hmm_data(ys);
  double prev_var = std::numeric_limits<double>::infinity();
  double prev_se = 0.0;
  for (std::size_t J : {50, 200, 800}) {
    std::vector<double> ll;
    for (std::uint64_t s = 0; s < 100; ++s)
      ll.push_back(pf::particle_filter(hmm, data, p, opts(J), 1000 + s).log_likelihood);
    const double v = sample_var(ll);
    const double se = testing::var_se(ll);
    CHECK(v <= prev_var + prev_se + se);
    prev_var = v;
    prev_se = se;
  }
}

TEST_CASE("deterministic process: exact likelihood, zero variance, naive agrees") {
  const models::SkeletonProcess skel(std::make_shared<models::SirModel>());
  ParamVector p(default_layout(skel));
  p.set("I0", 5);
  TimeSeries data = TimeSeries::weekly(30);
  Rng sim_rng(4);
  data = sim::simulate_path(skel, p, data, sim::Method::tau_leap, sim_rng).observations;

  double expected = 0.0;
  {
    Rng rng(0);
    auto x = skel.initialize(p, 0.0, rng);
    for (std::size_t n = 0; n < data.size(); ++n) {
      advance(skel, x, p, data.times[n], rng);
      expected += skel.obs_log_density(data.values[n], x, p);
      x.H = 0.0;
    }
  }
  for (std::uint64_t s : {1, 2, 3}) {
    for (std::size_t J : {1, 7, 100}) {
      CHECK(pf::particle_filter(skel, data, p, opts(J), s).log_likelihood == doctest::Approx(expected).epsilon(1e-13));
    }
  }
  CHECK(pf::naive_mc_loglik(skel, data, p, 10, 5).log_likelihood == doctest::Approx(expected).epsilon(1e-13));
  CHECK(pf::naive_mc_loglik(skel, data, p, 10, 5).se == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("filtering failures") {
  const testing::FailureModel model(5.0);
  const ParamVector p(default_layout(model));
  TimeSeries data = TimeSeries::weekly(8);
  for (auto& v : data.values) v = 0;
  const auto r = pf::particle_filter(model, data, p, opts(50), 1);
  CHECK(r.failures == std::vector<std::size_t>{4});
  CHECK(r.nfail() == 1);
  CHECK(r.conditional_loglik[4] == std::log(1e-17));

  const testing::FailureModel everywhere(0.0);
  auto o = opts(50);
  o.tolerance = 1.0;  // every weight is below a tolerance of 1
  const auto all = pf::particle_filter(everywhere, data, p, o, 1);
  CHECK(all.nfail() == 8);
  for (double c : all.conditional_loglik) CHECK(c == 0.0);
}

namespace {

class NanModel final : public pompif::PompModel {
 public:
  NanModel() : PompModel(1.0) {}
  std::string_view name() const override { return "nan"; }
  std::span<const std::string> compartment_names() const override { return names_; }
  std::vector<ParamSpec> parameter_specs() const override { return {{"a", 1.0, Scale::log}}; }
  StateVector initialize(const ParamVector&, double t0, Rng&) const override {
    StateVector x;
    x.size = 1;
    x.t = t0;
    return x;
  }
  void step(StateVector& x, const ParamVector&, double dt, Rng&) const override { x.t += dt; }
  double obs_log_density(Observation, const StateVector& x, const ParamVector&) const override {
    return x.t == 3.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  }
  Count sample_observation(const StateVector&, const ParamVector&, Rng&) const override { return 0; }

 private:
  std::vector<std::string> names_{"Z"};
};

}  // namespace

TEST_CASE("non-finite weights are model errors naming the observation") {
  const NanModel model;
  const ParamVector p(default_layout(model));
  try {
    (void)pf::particle_filter(model, TimeSeries::weekly(5), p, opts(10), 1);
    FAIL("expected ModelError");
  } catch (const ModelError& e) {
    CHECK(std::string(e.what()).find("observation 3") != std::string::npos);
  }
}

TEST_CASE("resampling") {
  Rng rng(12);
  SUBCASE("equal weights, systematic: each index once") {
    const std::vector<double> w(500, 0.3);
    auto idx = pf::resample(w, 500, pf::Resampling::systematic, rng);
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < 500; ++i) CHECK(idx[i] == i);
  }
  SUBCASE("point mass") {
    const std::vector<double> w{1, 0, 0, 0, 0};
    for (auto scheme : {pf::Resampling::multinomial, pf::Resampling::systematic})
      for (auto i : pf::resample(w, 100, scheme, rng)) CHECK(i == 0);
  }
  SUBCASE("weights (2, 1)") {
    const std::vector<double> w{2, 1};
    const std::size_t J = 300000;
    for (auto scheme : {pf::Resampling::multinomial, pf::Resampling::systematic}) {
      const auto idx = pf::resample(w, J, scheme, rng);
      const double f = static_cast<double>(std::count(idx.begin(), idx.end(), 0)) / J;
      CHECK(std::abs(f - 2.0 / 3.0) < 3.0 * std::sqrt(2.0 / 9.0 / J));
    }
  }
  SUBCASE("all-zero weights are rejected") {
    const std::vector<double> w{0, 0};
    CHECK_THROWS_AS(pf::resample(w, 3, pf::Resampling::multinomial, rng), std::invalid_argument);
  }
}

TEST_CASE("effective sample size and log-mean-exp") {
  CHECK(pf::effective_sample_size(std::vector<double>(500, 0.2)) == doctest::Approx(500));
  CHECK(pf::effective_sample_size(std::vector<double>{0, 0, 4, 0}) == 1.0);
  CHECK(pf::effective_sample_size(std::vector<double>{3, 1}) == doctest::Approx(1.6));
  CHECK(pf::log_mean_exp(std::vector<double>{-1000, -1000}) == doctest::Approx(-1000));
  CHECK(pf::log_mean_exp(std::vector<double>{0, std::log(3.0)}) == doctest::Approx(std::log(2.0)));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(pf::log_mean_exp(std::vector<double>{ninf, ninf}) == ninf);
}

TEST_CASE("filter result contracts on the SIR") {
  SirCase c;
  auto o = opts(300);
  o.filter_means = true;
  const auto a = pf::particle_filter(*c.model, c.data, c.p, o, 42);
  double sum = 0.0;
  for (double x : a.conditional_loglik) sum += x;
  CHECK(a.log_likelihood == sum);
  REQUIRE(a.filter_means.size() == 50);
  CHECK(a.filter_means[0].size() == 4);
  for (const auto& m : a.filter_means) CHECK(m[0] + m[1] + m[2] == doctest::Approx(10000));
  for (double e : a.ess) {
    CHECK(e >= 1.0 - 1e-9);
    CHECK(e <= 300.0 + 1e-9);
  }

  const auto b = pf::particle_filter(*c.model, c.data, c.p, o, 42);
  CHECK(a.conditional_loglik == b.conditional_loglik);
  CHECK(a.ess == b.ess);
  o.workers = 3;
  const auto threaded = pf::particle_filter(*c.model, c.data, c.p, o, 42);
  CHECK(a.conditional_loglik == threaded.conditional_loglik);
  CHECK(a.filter_means == threaded.filter_means);
}

TEST_CASE("no filtering failures at the truth") {
  std::size_t failures = 0;
  models::SirModel sir;
  ParamVector p(default_layout(sir));
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng = Rng::stream(500, {s});
    const auto data = sim::simulate_path(sir, p, TimeSeries::weekly(50), sim::Method::tau_leap, rng).observations;
    failures += pf::particle_filter(sir, data, p, opts(500), s).nfail();
  }
  CHECK(failures <= 1);
}

TEST_CASE("missing observations contribute exactly zero") {
  const models::SkeletonProcess skel(std::make_shared<models::SirModel>());
  ParamVector p(default_layout(skel));
  p.set("I0", 5);
  Rng rng(9);
  const auto data = sim::simulate_path(skel, p, TimeSeries::weekly(30), sim::Method::tau_leap, rng).observations;
  const auto full = pf::particle_filter(skel, data, p, opts(20), 3);
  for (std::size_t k : {0, 11, 29}) {
    auto blanked = data;
    blanked.values[k] = std::nullopt;
    const auto r = pf::particle_filter(skel, blanked, p, opts(20), 3);
    for (std::size_t n = 0; n < data.size(); ++n) {
      if (n == k)
        CHECK(r.conditional_loglik[n] == 0.0);
      else
        CHECK(r.conditional_loglik[n] == full.conditional_loglik[n]);
    }
  }

  // stochastic process: terms before the blank are untouched under the same seed
  SirCase c;
  auto blanked = c.data;
  blanked.values[20] = std::nullopt;
  const auto a = pf::particle_filter(*c.model, c.data, c.p, opts(200), 8);
  const auto b = pf::particle_filter(*c.model, blanked, c.p, opts(200), 8);
  CHECK(b.conditional_loglik[20] == 0.0);
  for (std::size_t n = 0; n < 20; ++n) CHECK(a.conditional_loglik[n] == b.conditional_loglik[n]);
}
