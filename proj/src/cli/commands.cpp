#include "pompif/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "pompif/cli/csv_io.hpp"
#include "pompif/cli/ledger.hpp"
#include "pompif/errors.hpp"
#include "pompif/mif2.hpp"
#include "pompif/parallel.hpp"
#include "pompif/pfilter.hpp"
#include "pompif/profile.hpp"
#include "pompif/simulators.hpp"

namespace pompif::cli {

namespace {

// stream keys below the master seed, one per workflow stage
constexpr std::uint64_t kSimulate = 0x73696d;
constexpr std::uint64_t kStartDraw = 1;
constexpr std::uint64_t kSearch = 2;
constexpr std::uint64_t kEvaluate = 3;
constexpr std::uint64_t kProfile = 4;
constexpr std::uint64_t kRefine = 5;
constexpr std::uint64_t kMcap = 6;

std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng::stream(seed, path).engine()();
}

TimeSeries load_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw ConfigError("field 'data' is required for this command");
  return read_data_csv(cfg.data, cfg.t0);
}

pf::FilterOptions filter_options(const RunConfig& cfg, std::size_t particles) {
  pf::FilterOptions o;
  o.particles = particles;
  o.tolerance = cfg.pfilter.tolerance;
  o.resampling = cfg.pfilter.resampling;
  o.workers = cfg.parallel_filter ? cfg.workers : 1;
  return o;
}

// Outer (job-level) workers; within-filter threading takes the pool instead when requested.
std::size_t job_workers(const RunConfig& cfg) { return cfg.parallel_filter ? 1 : cfg.workers; }

std::pair<double, double> mean_se(std::span<const double> v) {
  const auto n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return {mean, std::numeric_limits<double>::quiet_NaN()};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

void append(const RunConfig& cfg, std::string workflow, const ParamVector& p, double loglik,
            double se, std::size_t particles, std::size_t replicates) {
  LedgerRecord r;
  r.timestamp = utc_timestamp();
  r.workflow = std::move(workflow);
  r.model = cfg.model_name;
  r.params = p.to_string();
  r.loglik = loglik;
  r.loglik_se = se;
  r.particles = particles;
  r.replicates = replicates;
  r.seed = cfg.master_seed();
  ledger_append(r, cfg.ledger_path());
}

std::string param_header(const ParamLayout& layout) {
  std::string s;
  for (const auto& spec : layout.specs()) s += "," + spec.name;
  return s;
}

std::string param_row(const ParamVector& p) {
  std::string s;
  for (double v : p.values()) s += "," + format_double(v);
  return s;
}

// Top-ranked row of a candidates.csv written by the mif2 command.
ParamVector read_mle(const std::filesystem::path& path, const ParamVector& base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string header;
  std::string row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw DataError("'" + path.string() + "' has no candidate rows");
  const auto names = split_csv_line(header);
  const auto fields = split_csv_line(row);
  if (names.size() != fields.size()) throw DataError("field count differs from header", 2);
  ParamVector p = base;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!base.layout().contains(names[i])) continue;
    try {
      p.set(names[i], std::stod(fields[i]));
    } catch (const std::logic_error&) {
      throw DataError("bad value for '" + names[i] + "'", 2);
    }
  }
  return p;
}

std::vector<double> default_grid(const RunConfig& cfg, const ParamVector& mle) {
  const auto& pc = cfg.profile;
  const auto& spec = mle.layout()[mle.layout().index_of(pc.target)];
  const double center = mle.get(pc.target);
  const double sd = pc.grid_sd.value_or(0.05 * std::abs(center));
  if (!(sd > 0.0)) throw ConfigError("field 'profile.grid_sd' must be positive");
  double lo = center - 4.0 * sd;
  double hi = center + 4.0 * sd;
  // keep the grid strictly inside the parameter's domain
  if (spec.scale == Scale::log) lo = std::max(lo, 0.02 * center);
  if (spec.scale == Scale::logit) {
    const double pad = 1e-3 * (spec.upper - spec.lower);
    lo = std::max(lo, spec.lower + pad);
    hi = std::min(hi, spec.upper - pad);
  }
  const std::size_t n = std::max<std::size_t>(pc.points, 1);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = n == 1 ? center : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return grid;
}

void write_mcap_csv(const std::filesystem::path& path, const profile::McapResult* m,
                    std::span<const profile::ProfilePoint> points) {
  std::ostringstream out;
  out << "value,smoothed,quadratic,mle,smoothed_max,quadratic_max,se_stat,se_mc,cutoff,ci_lower,"
         "ci_upper,lower_open,upper_open\n";
  if (m == nullptr) {
    for (const auto& pt : points) out << format_double(pt.value) << ",,,,,,,,,,,,\n";
  } else {
    std::ostringstream tail;
    tail << ',' << format_double(m->mle) << ',' << format_double(m->smoothed_max) << ','
         << format_double(m->quadratic_max) << ',' << format_double(m->se_stat) << ','
         << format_double(m->se_mc) << ',' << format_double(m->cutoff) << ','
         << format_double(m->ci_lower) << ',' << format_double(m->ci_upper) << ','
         << (m->lower_open ? 1 : 0) << ',' << (m->upper_open ? 1 : 0) << '\n';
    const std::string t = tail.str();
    for (std::size_t i = 0; i < m->curve_x.size(); ++i)
      out << format_double(m->curve_x[i]) << ',' << format_double(m->curve_smoothed[i]) << ','
          << format_double(m->curve_quadratic[i]) << t;
  }
  write_file(path, out.str());
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
  const std::size_t n = cfg.simulate.observations;
  if (n == 0) throw ConfigError("field 'simulate.observations' must be at least 1");
  TimeSeries times;
  times.t0 = cfg.t0;
  for (std::size_t i = 1; i <= n; ++i) {
    times.times.push_back(cfg.t0 + cfg.simulate.interval * static_cast<double>(i));
    times.values.emplace_back(std::nullopt);
  }
  Rng rng = Rng::stream(cfg.master_seed(), {kSimulate});
  const auto path = sim::simulate_path(*cfg.model, cfg.params, times, cfg.simulate.method, rng);
  write_data_csv(cfg.output / "data.csv", path.observations);
  write_states_csv(cfg.output / "states.csv", path, cfg.model->compartment_names());
  std::cout << "simulated " << n << " observations -> " << (cfg.output / "data.csv").string() << '\n';
}

void cmd_pfilter(const RunConfig& cfg) {
  const TimeSeries data = load_data(cfg);
  const std::uint64_t seed = cfg.master_seed();
  const std::size_t R = cfg.pfilter.replicates;
  if (R < 1) throw ConfigError("field 'pfilter.replicates' must be at least 1");
  const auto opts = filter_options(cfg, cfg.pfilter.particles);
  std::vector<pf::FilterResult> results(R);
  parallel_for(R, job_workers(cfg), [&](std::size_t r) {
    results[r] = pf::particle_filter(*cfg.model, data, cfg.params, opts, derive(seed, {r}));
  });

  std::vector<double> ll(R);
  for (std::size_t r = 0; r < R; ++r) ll[r] = results[r].log_likelihood;
  const auto [mean, se] = mean_se(ll);
  const double lme = pf::log_mean_exp(ll);

  std::ostringstream res;
  res << "replicate,loglik,nfail,mean_loglik,loglik_se,logmeanexp\n";
  for (std::size_t r = 0; r < R; ++r)
    res << r << ',' << format_double(ll[r]) << ',' << results[r].nfail() << ','
        << format_double(mean) << ',' << format_double(se) << ',' << format_double(lme) << '\n';
  write_file(cfg.output / "pfilter_result.csv", res.str());

  std::ostringstream cond;
  cond << "replicate,time,cond_loglik,ess,failure\n";
  for (std::size_t r = 0; r < R; ++r) {
    const auto& f = results[r];
    for (std::size_t n = 0; n < data.size(); ++n) {
      const bool failed = std::find(f.failures.begin(), f.failures.end(), n) != f.failures.end();
      cond << r << ',' << format_double(data.times[n]) << ',' << format_double(f.conditional_loglik[n])
           << ',' << format_double(f.ess[n]) << ',' << (failed ? 1 : 0) << '\n';
    }
  }
  write_file(cfg.output / "pfilter_conditional.csv", cond.str());

  append(cfg, "pfilter", cfg.params, mean, se, cfg.pfilter.particles, R);
  std::cout << "loglik " << format_double(mean) << " (se " << format_double(se) << ") over " << R
            << " replicates\n";
}

void cmd_mif2(const RunConfig& cfg) {
  const TimeSeries data = load_data(cfg);
  const std::uint64_t seed = cfg.master_seed();
  const std::size_t S = cfg.starts;
  if (S < 1) throw ConfigError("field 'mif2.starts' must be at least 1");
  const auto& layout = cfg.params.layout();
  if (layout.estimated().empty()) throw ConfigError("no parameter is marked 'estimate'");

  mif::Mif2Settings settings = cfg.mif2;
  settings.workers = cfg.parallel_filter ? cfg.workers : 1;
  std::vector<mif::Mif2Result> runs(S);
  parallel_for(S, job_workers(cfg), [&](std::size_t s) {
    Rng rng = Rng::stream(seed, {kStartDraw, s});
    const auto start = mif::draw_from_box(cfg.params, cfg.lower, cfg.upper, rng);
    runs[s] = mif::mif2(*cfg.model, data, mif::ParamSwarm::replicate(start, settings.particles),
                        settings, derive(seed, {kSearch, s}));
  });

  std::ostringstream tr;
  tr << "start,iteration,loglik,nfail";
  for (std::size_t i : layout.estimated()) tr << ',' << layout[i].name;
  tr << '\n';
  for (std::size_t s = 0; s < S; ++s) {
    const auto& run = runs[s];
    for (std::size_t m = 0; m < run.loglik.size(); ++m) {
      tr << s << ',' << (m + 1) << ',' << format_double(run.loglik[m]) << ',' << run.nfail[m];
      for (double v : run.param_means[m]) tr << ',' << format_double(v);
      tr << '\n';
    }
  }
  write_file(cfg.output / "traces.csv", tr.str());

  std::vector<ParamVector> candidates;
  for (const auto& run : runs) candidates.push_back(run.estimate);
  const auto ranked = mif::evaluate_candidates(
      candidates, *cfg.model, data, cfg.pfilter.replicates, filter_options(cfg, cfg.pfilter.particles),
      derive(seed, {kEvaluate}), job_workers(cfg));

  std::ostringstream cand;
  cand << "rank,start,loglik,loglik_se" << param_header(layout) << '\n';
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const auto& sc = ranked[k];
    cand << (k + 1) << ',' << sc.index << ',' << format_double(sc.mean_loglik) << ','
         << format_double(sc.se) << param_row(candidates[sc.index]) << '\n';
  }
  write_file(cfg.output / "candidates.csv", cand.str());

  for (const auto& sc : ranked)
    append(cfg, "mif2", candidates[sc.index], sc.mean_loglik, sc.se, cfg.pfilter.particles,
           cfg.pfilter.replicates);
  const auto& best = ranked.front();
  std::cout << "best start " << best.index << ": loglik " << format_double(best.mean_loglik)
            << " (se " << format_double(best.se) << ") " << candidates[best.index].to_string() << '\n';
}

void cmd_profile(const RunConfig& cfg) {
  const auto& pc = cfg.profile;
  if (pc.target.empty()) throw ConfigError("field 'profile.target' is required");
  const TimeSeries data = load_data(cfg);
  const std::uint64_t seed = cfg.master_seed();
  const ParamVector mle = pc.mle_from.empty() ? cfg.params : read_mle(pc.mle_from, cfg.params);
  mle.validate();

  std::vector<double> grid = pc.grid.empty() ? default_grid(cfg, mle) : pc.grid;
  profile::ProfileSettings ps;
  ps.mif2 = pc.mif2;
  ps.mif2.workers = cfg.parallel_filter ? cfg.workers : 1;
  ps.starts = pc.starts;
  ps.first_start_at_base = pc.start_at_mle;
  ps.lower = pc.lower;
  ps.upper = pc.upper;
  ps.eval_replicates = pc.eval_replicates;
  ps.eval = filter_options(cfg, pc.eval_particles);
  ps.workers = job_workers(cfg);

  auto points = profile::profile_likelihood(*cfg.model, data, mle, pc.target, grid, ps,
                                            derive(seed, {kProfile}));

  profile::McapOptions mo;
  mo.level = pc.level;
  mo.span = pc.span;
  mo.bootstrap = pc.bootstrap;
  mo.seed = derive(seed, {kMcap});

  std::optional<profile::McapResult> result;
  if (points.size() >= 5) {
    result = profile::mcap(points, mo);
    if (pc.refine && pc.grid.empty()) {
      // one extra pass of points bracketing each closed interval end
      const double spacing = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
      std::vector<double> extra;
      for (auto [bound, open] : {std::pair{result->ci_lower, result->lower_open},
                                 std::pair{result->ci_upper, result->upper_open}}) {
        if (open || !std::isfinite(bound)) continue;
        for (double d : {-0.5, 0.0, 0.5}) {
          const double v = bound + d * spacing;
          if (v > grid.front() && v < grid.back()) extra.push_back(v);
        }
      }
      if (!extra.empty()) {
        auto more = profile::profile_likelihood(*cfg.model, data, mle, pc.target, extra, ps,
                                                derive(seed, {kRefine}));
        points.insert(points.end(), more.begin(), more.end());
        std::stable_sort(points.begin(), points.end(),
                         [](const auto& a, const auto& b) { return a.value < b.value; });
        result = profile::mcap(points, mo);
      }
    }
  }

  std::ostringstream prof;
  prof << "value,loglik,loglik_se" << param_header(mle.layout()) << '\n';
  for (const auto& pt : points)
    prof << format_double(pt.value) << ',' << format_double(pt.loglik) << ',' << format_double(pt.se)
         << param_row(pt.maximizer) << '\n';
  write_file(cfg.output / ("profile_" + pc.target + ".csv"), prof.str());
  write_mcap_csv(cfg.output / ("mcap_" + pc.target + ".csv"), result ? &*result : nullptr, points);

  for (const auto& pt : points)
    append(cfg, "profile", pt.maximizer, pt.loglik, pt.se, pc.eval_particles, pc.eval_replicates);

  if (!result) {
    std::cerr << "warning: " << points.size()
              << " profile point(s); at least 5 are needed for an interval, CI columns left empty\n";
    return;
  }
  for (const auto& w : result->warnings) std::cerr << "warning: " << w << '\n';
  std::cout << pc.target << ": mle " << format_double(result->mle) << ", "
            << static_cast<int>(std::lround(pc.level * 100)) << "% CI [" << format_double(result->ci_lower)
            << ", " << format_double(result->ci_upper) << "], se_mc " << format_double(result->se_mc)
            << '\n';
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const ModelError*>(&e)) return 4;
  return 1;
}

}  // namespace pompif::cli
