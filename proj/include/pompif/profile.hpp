#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pompif/mif2.hpp"
#include "pompif/model.hpp"
#include "pompif/params.hpp"

namespace pompif::profile {

struct ProfilePoint {
  double value = 0.0;   // profiled parameter, natural scale
  double loglik = 0.0;  // best mean log-likelihood over nuisance searches
  double se = 0.0;      // Monte Carlo SE of `loglik`
  ParamVector maximizer;
};

struct ProfileSettings {
  mif::Mif2Settings mif2;
  std::size_t starts = 2;
  /// Start the first search at the base nuisance values rather than a box draw.
  bool first_start_at_base = true;
  /// Start box for the nuisance parameters, indexed like the layout.
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t eval_replicates = 5;
  pf::FilterOptions eval;
  std::size_t workers = 1;
};

/// Profile log-likelihood of `target` over `grid`. At each grid value the target
/// is fixed, the remaining estimated parameters are maximized by `starts` IF2
/// searches (from `base` and/or random box draws), and the best search (by replicated filters)
/// gives the point. Returned points are sorted by value.
std::vector<ProfilePoint> profile_likelihood(const PompModel& model, const TimeSeries& data,
                                             const ParamVector& base, std::string_view target,
                                             std::span<const double> grid,
                                             const ProfileSettings& settings, std::uint64_t seed);

/// Locally weighted quadratic regression (tricube weights over the
/// ceil(span * n) nearest points, at least 4) evaluated at x0.
double local_quadratic(std::span<const double> x, std::span<const double> y, double span,
                       double x0);

struct McapOptions {
  double level = 0.95;
  double span = 0.75;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 0;
  std::size_t curve_points = 1000;
};

struct McapResult {
  double level = 0.95;
  std::vector<double> curve_x;
  std::vector<double> curve_smoothed;
  std::vector<double> curve_quadratic;  // NaN outside the quadratic's neighborhood
  // quadratic near the maximum: loglik ~ c + b u - a u^2 with u = value - quadratic_center
  double quadratic_center = 0.0;
  double quad_a = 0.0;
  double quad_b = 0.0;
  double quad_c = 0.0;
  double quadratic_max = 0.0;  // location of the quadratic's maximum
  double mle = 0.0;            // argmax of the smoothed curve
  double smoothed_max = 0.0;   // smoothed log-likelihood at the MLE
  double se_stat = 0.0;        // 1 / sqrt(2a)
  double se_mc = 0.0;          // bootstrap sd of the quadratic maximum
  double cutoff = 0.0;         // drop from the maximum defining the interval
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool lower_open = false;  // no crossing found below the MLE; bound is the grid edge
  bool upper_open = false;
  std::vector<std::string> warnings;
};

/// Monte Carlo adjusted profile interval.
///
/// Smooths the profile with local_quadratic, fits a weighted quadratic near the
/// smoothed maximum and estimates the Monte Carlo sd of its maximizer (se_mc) by
/// a residual bootstrap. The cutoff is chi2_1(level)/2 * (1 + 2 a se_mc^2), i.e.
/// the Wilks cutoff inflated by the ratio of total to statistical variance. The
/// interval is where the smoothed curve is within `cutoff` of its maximum.
/// Requires at least 5 points.
McapResult mcap(std::span<const double> values, std::span<const double> logliks,
                const McapOptions& options = {});
McapResult mcap(std::span<const ProfilePoint> points, const McapOptions& options = {});

/// chi2_1 quantile at `level`, halved.
double wilks_cutoff(double level);

}  // namespace pompif::profile
