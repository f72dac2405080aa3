#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pompif {

/// How a parameter maps to the unconstrained estimation scale.
enum class Scale {
  identity,  ///< unconstrained
  log,       ///< positive
  logit,     ///< bounded interval [lower, upper]; (0, 1) by default
};

std::string_view to_string(Scale scale);
Scale scale_from_string(std::string_view name);

struct ParamSpec {
  std::string name;
  double value = 0.0;
  Scale scale = Scale::identity;
  bool estimated = false;
  // interval bounds, only read for Scale::logit
  double lower = 0.0;
  double upper = 1.0;
};

/// Natural value -> estimation scale. Non-finite images raise BoundaryError.
double to_estimation(double value, const ParamSpec& spec);
double from_estimation(double value, const ParamSpec& spec);

/// Ordered parameter names with scale tags and fixed/estimated flags.
/// Names resolve to dense indices once; the layout is immutable and shared.
class ParamLayout {
 public:
  explicit ParamLayout(std::vector<ParamSpec> specs);

  [[nodiscard]] std::size_t size() const noexcept { return specs_.size(); }
  [[nodiscard]] const ParamSpec& operator[](std::size_t i) const { return specs_[i]; }
  [[nodiscard]] std::span<const ParamSpec> specs() const noexcept { return specs_; }

  /// Throws ConfigError for unknown names.
  [[nodiscard]] std::size_t index_of(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const noexcept;

  /// Indices of estimated parameters, in layout order.
  [[nodiscard]] const std::vector<std::size_t>& estimated() const noexcept { return estimated_; }

  /// Copy of this layout with the estimated flag of `name` changed.
  [[nodiscard]] std::shared_ptr<const ParamLayout> with_estimated(std::string_view name,
                                                                  bool estimated) const;

 private:
  std::vector<ParamSpec> specs_;
  std::vector<std::size_t> estimated_;
};

class ParamVector {
 public:
  ParamVector() = default;
  /// Values taken from the layout's spec defaults.
  explicit ParamVector(std::shared_ptr<const ParamLayout> layout);
  ParamVector(std::shared_ptr<const ParamLayout> layout, std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  [[nodiscard]] double get(std::string_view name) const;
  void set(std::string_view name, double value);

  [[nodiscard]] const ParamLayout& layout() const noexcept { return *layout_; }
  [[nodiscard]] const std::shared_ptr<const ParamLayout>& layout_ptr() const noexcept {
    return layout_;
  }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  /// Same values under a different layout of identical names/order.
  [[nodiscard]] ParamVector relabel(std::shared_ptr<const ParamLayout> layout) const;

  /// Checks scale-tag constraints. Estimated parameters must lie strictly inside
  /// their domain; fixed ones may sit on the closed boundary (e.g. kappa = 1,
  /// sigma2 = 0). Throws ConfigError naming the first offender.
  void validate() const;

  /// "name=value;..." with 17 significant digits.
  [[nodiscard]] std::string to_string() const;

 private:
  std::shared_ptr<const ParamLayout> layout_;
  std::vector<double> values_;
};

/// Every coordinate mapped to the estimation scale.
std::vector<double> to_estimation_scale(const ParamVector& p);
ParamVector from_estimation_scale(std::shared_ptr<const ParamLayout> layout,
                                  std::span<const double> transformed);

}  // namespace pompif
