#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace magel {

/// Shortest %g-style rendering for messages (std::to_string loses small values).
inline std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Invalid sizes, parameters or configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field shapes or ranks that do not fit together.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested allocation exceeds the configured memory budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter combination outside the regime where the expanded LLG form is valid.
class UnsupportedParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite or exploding coefficients during time integration.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, double last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Unit-norm drift of the magnetization beyond the configured threshold.
class ConstraintViolation : public std::runtime_error {
 public:
  ConstraintViolation(const std::string& what, double time, double drift)
      : std::runtime_error(what), time_(time), drift_(drift) {}
  double time() const { return time_; }
  double drift() const { return drift_; }

 private:
  double time_;
  double drift_;
};

/// Picard iteration on a window did not reach the tolerance.
class FixedPointError : public std::runtime_error {
 public:
  FixedPointError(const std::string& what, double residual, int iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// File system or format failures, always carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magel
