#include "pompif/params.hpp"

#include <cmath>
#include <cstdio>

#include "pompif/errors.hpp"

namespace pompif {

std::string_view to_string(Scale scale) {
  switch (scale) {
    case Scale::identity: return "identity";
    case Scale::log: return "log";
    case Scale::logit: return "logit";
  }
  return "identity";
}

Scale scale_from_string(std::string_view name) {
  if (name == "identity" || name == "none") return Scale::identity;
  if (name == "log" || name == "positive") return Scale::log;
  if (name == "logit" || name == "interval" || name == "unit") return Scale::logit;
  throw ConfigError("unknown parameter scale '" + std::string(name) + "'");
}

double to_estimation(double value, const ParamSpec& spec) {
  double out = value;
  switch (spec.scale) {
    case Scale::identity: break;
    case Scale::log: out = std::log(value); break;
    case Scale::logit: {
      const double u = (value - spec.lower) / (spec.upper - spec.lower);
      out = std::log(u) - std::log1p(-u);
      break;
    }
  }
  if (!std::isfinite(out)) throw BoundaryError(spec.name);
  return out;
}

double from_estimation(double value, const ParamSpec& spec) {
  switch (spec.scale) {
    case Scale::identity: return value;
    case Scale::log: return std::exp(value);
    case Scale::logit: {
      const double u = value >= 0.0 ? 1.0 / (1.0 + std::exp(-value))
                                    : std::exp(value) / (1.0 + std::exp(value));
      return spec.lower + (spec.upper - spec.lower) * u;
    }
  }
  return value;
}

ParamLayout::ParamLayout(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (specs_[k].name == specs_[i].name)
        throw ConfigError("duplicate parameter '" + specs_[i].name + "'");
    }
    if (specs_[i].scale == Scale::logit && !(specs_[i].lower < specs_[i].upper))
      throw ConfigError("parameter '" + specs_[i].name + "' has an empty interval");
    if (specs_[i].estimated) estimated_.push_back(i);
  }
}

std::size_t ParamLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return i;
  }
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

bool ParamLayout::contains(std::string_view name) const noexcept {
  for (const auto& s : specs_) {
    if (s.name == name) return true;
  }
  return false;
}

std::shared_ptr<const ParamLayout> ParamLayout::with_estimated(std::string_view name,
                                                               bool estimated) const {
  auto specs = specs_;
  specs[index_of(name)].estimated = estimated;
  return std::make_shared<const ParamLayout>(std::move(specs));
}

ParamVector::ParamVector(std::shared_ptr<const ParamLayout> layout) : layout_(std::move(layout)) {
  values_.reserve(layout_->size());
  for (const auto& s : layout_->specs()) values_.push_back(s.value);
}

ParamVector::ParamVector(std::shared_ptr<const ParamLayout> layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_->size())
    throw ConfigError("parameter vector length does not match its layout");
}

double ParamVector::get(std::string_view name) const { return values_[layout_->index_of(name)]; }

void ParamVector::set(std::string_view name, double value) {
  values_[layout_->index_of(name)] = value;
}

ParamVector ParamVector::relabel(std::shared_ptr<const ParamLayout> layout) const {
  if (layout->size() != layout_->size()) throw ConfigError("layout size mismatch");
  for (std::size_t i = 0; i < layout->size(); ++i) {
    if ((*layout)[i].name != (*layout_)[i].name) throw ConfigError("layout name mismatch");
  }
  return ParamVector(std::move(layout), values_);
}

void ParamVector::validate() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const auto& s = (*layout_)[i];
    const double v = values_[i];
    const auto fail = [&s, v](const char* why) {
      throw ConfigError("parameter '" + s.name + "' = " + std::to_string(v) + " " + why);
    };
    if (!std::isfinite(v)) fail("is not finite");
    switch (s.scale) {
      case Scale::identity: break;
      case Scale::log:
        if (s.estimated ? !(v > 0.0) : v < 0.0) fail("must be positive");
        break;
      case Scale::logit:
        if (s.estimated ? !(v > s.lower && v < s.upper) : (v < s.lower || v > s.upper))
          fail("is outside its interval");
        break;
    }
  }
}

std::string ParamVector::to_string() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i > 0) out += ';';
    std::snprintf(buf, sizeof buf, "%.17g", values_[i]);
    out += (*layout_)[i].name;
    out += '=';
    out += buf;
  }
  return out;
}

std::vector<double> to_estimation_scale(const ParamVector& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = to_estimation(p[i], p.layout()[i]);
  return out;
}

ParamVector from_estimation_scale(std::shared_ptr<const ParamLayout> layout,
                                  std::span<const double> transformed) {
  std::vector<double> values(transformed.size());
  for (std::size_t i = 0; i < transformed.size(); ++i)
    values[i] = from_estimation(transformed[i], (*layout)[i]);
  return ParamVector(std::move(layout), std::move(values));
}

}  // namespace pompif
