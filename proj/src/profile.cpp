#include "pompif/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "pompif/errors.hpp"
#include "pompif/parallel.hpp"

namespace pompif::profile {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Tricube weights around x0 using the q nearest points, q = max(ceil(span n), 4).
std::vector<double> tricube_weights(std::span<const double> x, double span, double x0) {
  const std::size_t n = x.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(x[i] - x0);
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const auto q = std::min<std::size_t>(
      n, std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n)))));
  double h = sorted[q - 1];
  if (span > 1.0) h *= span;
  std::vector<double> w(n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = h > 0.0 ? dist[i] / h : (dist[i] == 0.0 ? 0.0 : 1.0);
      w[i] = r < 1.0 ? std::pow(1.0 - r * r * r, 3) : 0.0;
      if (w[i] > 0.0) ++positive;
    }
    if (positive >= 3) break;
    h = h > 0.0 ? h * 1.1 : sorted.back();
  }
  return w;
}

struct Quadratic {
  double c = 0.0;  // value at the center
  double b = 0.0;  // slope at the center
  double a = 0.0;  // loglik ~ c + b u - a u^2
};

Quadratic weighted_quadratic(std::span<const double> x, std::span<const double> y,
                             std::span<const double> w, double center) {
  Eigen::Matrix3d xtx = Eigen::Matrix3d::Zero();
  Eigen::Vector3d xty = Eigen::Vector3d::Zero();
  double scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] > 0.0) scale = std::max(scale, std::abs(x[i] - center));
  }
  if (scale == 0.0) scale = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const double u = (x[i] - center) / scale;
    const Eigen::Vector3d row(1.0, u, u * u);
    xtx += w[i] * row * row.transpose();
    xty += w[i] * y[i] * row;
  }
  const Eigen::Vector3d beta = xtx.colPivHouseholderQr().solve(xty);
  return {beta(0), beta(1) / scale, -beta(2) / (scale * scale)};
}

// argmax of f on [lo, hi] by golden-section search
template <class F>
double golden_max(F&& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo);
  double d = lo + g * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

// x in [inside, outside] where g changes sign; g(inside) >= 0 > g(outside)
template <class G>
double bisect(G&& g, double inside, double outside) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    if (g(mid) >= 0.0)
      inside = mid;
    else
      outside = mid;
  }
  return 0.5 * (inside + outside);
}

}  // namespace

double wilks_cutoff(double level) {
  boost::math::chi_squared chi2(1.0);
  return 0.5 * boost::math::quantile(chi2, level);
}

double local_quadratic(std::span<const double> x, std::span<const double> y, double span,
                       double x0) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("local_quadratic needs at least 3 points");
  const auto w = tricube_weights(x, span, x0);
  return weighted_quadratic(x, y, w, x0).c;
}

McapResult mcap(std::span<const double> values, std::span<const double> logliks,
                const McapOptions& options) {
  if (values.size() != logliks.size()) throw std::invalid_argument("mcap: size mismatch");
  if (values.size() < 5) throw std::invalid_argument("mcap needs at least 5 profile points");
  if (!(options.level > 0.0 && options.level < 1.0))
    throw std::invalid_argument("mcap: level must lie in (0, 1)");

  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = values[order[i]];
    y[i] = logliks[order[i]];
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("mcap: profile points must be finite");
  }

  McapResult out;
  out.level = options.level;
  const auto smooth = [&](double x0) { return local_quadratic(x, y, options.span, x0); };

  const std::size_t G = std::max<std::size_t>(options.curve_points, 3);
  out.curve_x.resize(G);
  out.curve_smoothed.resize(G);
  const double lo = x.front();
  const double hi = x.back();
  std::size_t best = 0;
  for (std::size_t g = 0; g < G; ++g) {
    out.curve_x[g] = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(G - 1);
    out.curve_smoothed[g] = smooth(out.curve_x[g]);
    if (out.curve_smoothed[g] > out.curve_smoothed[best]) best = g;
  }
  const bool max_at_lower = best == 0;
  const bool max_at_upper = best == G - 1;
  out.mle = golden_max(smooth, out.curve_x[best == 0 ? 0 : best - 1],
                       out.curve_x[best == G - 1 ? G - 1 : best + 1]);
  out.smoothed_max = smooth(out.mle);
  if (max_at_lower || max_at_upper)
    out.warnings.push_back("smoothed maximum lies on the grid boundary; interval is one-sided");

  // quadratic approximation near the maximum
  const auto qw = tricube_weights(x, options.span, out.mle);
  const Quadratic quad = weighted_quadratic(x, y, qw, out.mle);
  out.quadratic_center = out.mle;
  out.quad_a = quad.a;
  out.quad_b = quad.b;
  out.quad_c = quad.c;

  const double wilks = wilks_cutoff(options.level);
  double inflation = 1.0;
  if (quad.a > 0.0) {
    out.quadratic_max = out.mle + quad.b / (2.0 * quad.a);
    out.se_stat = std::sqrt(1.0 / (2.0 * quad.a));

    std::vector<double> fitted(n), resid(n);
    for (std::size_t i = 0; i < n; ++i) {
      fitted[i] = smooth(x[i]);
      resid[i] = y[i] - fitted[i];
    }
    const double mean_resid = std::accumulate(resid.begin(), resid.end(), 0.0) / static_cast<double>(n);
    for (double& r : resid) r -= mean_resid;

    Rng rng(options.seed);
    std::vector<double> ystar(n);
    std::vector<double> locations;
    locations.reserve(options.bootstrap);
    std::size_t discarded = 0;
    for (std::size_t b = 0; b < options.bootstrap; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
        ystar[i] = fitted[i] + resid[std::min(k, n - 1)];
      }
      const Quadratic qb = weighted_quadratic(x, ystar, qw, out.mle);
      if (qb.a > 0.0)
        locations.push_back(qb.b / (2.0 * qb.a));
      else
        ++discarded;
    }
    if (discarded > 0)
      out.warnings.push_back(std::to_string(discarded) +
                             " bootstrap fits were not concave and were dropped");
    if (locations.size() >= 2) {
      const double m = std::accumulate(locations.begin(), locations.end(), 0.0) /
                       static_cast<double>(locations.size());
      double ss = 0.0;
      for (double l : locations) ss += (l - m) * (l - m);
      out.se_mc = std::sqrt(ss / static_cast<double>(locations.size() - 1));
    }
    inflation = 1.0 + 2.0 * quad.a * out.se_mc * out.se_mc;
  } else {
    out.quadratic_max = kNaN;
    out.se_stat = kNaN;
    out.warnings.push_back("profile is not concave near its maximum; no Monte Carlo adjustment");
  }
  out.cutoff = wilks * inflation;

  const double threshold = out.smoothed_max - out.cutoff;
  const auto above = [&](double v) { return smooth(v) - threshold; };

  // first grid point below the threshold on each side of the maximum
  out.ci_lower = lo;
  out.lower_open = true;
  for (std::size_t g = best; g-- > 0;) {
    if (out.curve_smoothed[g] < threshold) {
      out.ci_lower = bisect(above, out.curve_x[g + 1], out.curve_x[g]);
      out.lower_open = false;
      break;
    }
  }
  out.ci_upper = hi;
  out.upper_open = true;
  for (std::size_t g = best + 1; g < G; ++g) {
    if (out.curve_smoothed[g] < threshold) {
      out.ci_upper = bisect(above, out.curve_x[g - 1], out.curve_x[g]);
      out.upper_open = false;
      break;
    }
  }
  if (out.lower_open) out.warnings.push_back("profile does not drop below the cutoff below the maximum");
  if (out.upper_open) out.warnings.push_back("profile does not drop below the cutoff above the maximum");

  // the quadratic is drawn where its weights are positive
  double reach = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (qw[i] > 0.0) reach = std::max(reach, std::abs(x[i] - out.mle));
  }
  out.curve_quadratic.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    const double u = out.curve_x[g] - out.mle;
    out.curve_quadratic[g] = std::abs(u) <= reach ? quad.c + quad.b * u - quad.a * u * u : kNaN;
  }
  return out;
}

McapResult mcap(std::span<const ProfilePoint> points, const McapOptions& options) {
  std::vector<double> x, y;
  x.reserve(points.size());
  y.reserve(points.size());
  for (const auto& p : points) {
    x.push_back(p.value);
    y.push_back(p.loglik);
  }
  return mcap(x, y, options);
}

std::vector<ProfilePoint> profile_likelihood(const PompModel& model, const TimeSeries& data,
                                             const ParamVector& base, std::string_view target,
                                             std::span<const double> grid,
                                             const ProfileSettings& settings, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("profile grid is empty");
  const auto& layout = base.layout();
  const std::size_t ti = layout.index_of(target);
  if (!layout[ti].estimated)
    throw ConfigError("profile target '" + std::string(target) + "' is not an estimated parameter");
  if (settings.starts < 1) throw ConfigError("profile needs at least one start per grid point");

  const auto fixed_layout = layout.with_estimated(target, false);
  mif::Mif2Settings mset = settings.mif2;
  mset.rw_sd.at(ti) = 0.0;

  const std::size_t G = grid.size();
  const std::size_t S = settings.starts;
  std::vector<ParamVector> found(G * S);
  parallel_for(G * S, settings.workers, [&](std::size_t job) {
    const std::size_t g = job / S;
    const std::size_t s = job % S;
    ParamVector p = base.relabel(fixed_layout);
    p[ti] = grid[g];
    Rng rng = Rng::stream(seed, {g, s, 0});
    const ParamVector start = (s == 0 && settings.first_start_at_base)
                                  ? p
                                  : mif::draw_from_box(p, settings.lower, settings.upper, rng);
    const auto swarm = mif::ParamSwarm::replicate(start, mset.particles);
    const auto search_seed = Rng::stream(seed, {g, s, 1}).engine()();
    found[job] = mif::mif2(model, data, swarm, mset, search_seed).estimate;
  });

  std::vector<ProfilePoint> points(G);
  for (std::size_t g = 0; g < G; ++g) {
    std::vector<ParamVector> candidates(found.begin() + static_cast<std::ptrdiff_t>(g * S),
                                        found.begin() + static_cast<std::ptrdiff_t>((g + 1) * S));
    const auto eval_seed = Rng::stream(seed, {g, 2}).engine()();
    const auto ranked = mif::evaluate_candidates(candidates, model, data, settings.eval_replicates,
                                                 settings.eval, eval_seed, settings.workers);
    const auto& top = ranked.front();
    points[g] = {grid[g], top.mean_loglik, top.se, candidates[top.index].relabel(base.layout_ptr())};
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const ProfilePoint& a, const ProfilePoint& b) { return a.value < b.value; });
  return points;
}

}  // namespace pompif::profile
