// Time-step refinement studies behind `magel convergence`.
#pragma once

#include <string>
#include <vector>

namespace magel {

enum class ConvergenceCase { taylor_green, heat_F, precession, m_drift };

ConvergenceCase parse_convergence_case(const std::string& s);
std::string to_string(ConvergenceCase c);

struct ConvergenceStudy {
  ConvergenceCase kind = ConvergenceCase::taylor_green;
  std::vector<double> dts;     // halving sequence
  std::vector<double> errors;  // per dt: error against a reference, or difference to the next finer run
  bool self_convergence = false;
  double order = 0.0;          // from the finest pair
  double ratio = 0.0;          // errors[k-1] / errors[k] of the finest pair
  double order_low = 0.0;      // pass window on the order
  double order_high = 0.0;
  std::string note;            // extra closed-form check, if any

  bool passed() const { return order >= order_low && order <= order_high; }
  std::string line() const;
};

/// taylor_green: velocity Galerkin ODE from perturbed Taylor-Green data,
///   self-convergence over four halvings (pure Taylor-Green data is
///   integrated exactly by the integrating factor, see `note`).
/// heat_F: F transport by a steady velocity, self-convergence; `note`
///   carries the v = 0 heat-kernel error.
/// precession: constant M in a uniform field against the closed-form
///   damped precession.
/// m_drift: unit-norm drift of a generic coupled run under a uniform field;
///   passes when the drift ratio for one halving lies in [12, 20].
ConvergenceStudy run_convergence(ConvergenceCase c);

}  // namespace magel
