#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pompif {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input data. Carries the 1-based line number when known.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A model produced something it must not (negative rate, non-finite weight, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A parameter sits on the boundary of its domain, so its estimation-scale image is not finite.
class BoundaryError : public ModelError {
 public:
  explicit BoundaryError(const std::string& parameter)
      : ModelError("parameter '" + parameter + "' is on the boundary of its domain"),
        parameter_(parameter) {}

  [[nodiscard]] const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

}  // namespace pompif
