// Integrating-factor RK4 stepping for the velocity coefficient ODE, the
// deformation-gradient transport, the LLG equation and the coupled system.
#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "magel/state.hpp"

namespace magel {

/// One Lawson integrating-factor RK4 step of u' = L u + N(u, t) with
/// `propagate(x, h)` = exp(L h) x. U needs u + u and double * u.
template <typename U, typename Rhs, typename Propagate>
U ifrk4_step(const U& u, double t, double dt, Rhs&& rhs, Propagate&& propagate) {
  const double h = 0.5 * dt;
  const U eu_half = propagate(u, h);
  const U eu_full = propagate(eu_half, h);
  const U a = rhs(u, t);
  const U b = rhs(propagate(u + h * a, h), t + h);
  const U c = rhs(eu_half + h * b, t + h);
  const U d = rhs(eu_full + dt * propagate(c, h), t + dt);
  return eu_full + (dt / 6.0) * (propagate(propagate(a, h), h) + 2.0 * propagate(b + c, h) + d);
}

/// exp(-coef |kappa|^2 h) per spectral index.
RealGrid heat_factor(const Domain& d, double coef, double h);

/// Throws DivergedError for NaN or magnitudes above the blow-up threshold.
void check_finite(const Eigen::VectorXd& g, double last_valid_time, const char* what);
void check_finite(const SpectralField& f, double last_valid_time, const char* what);

constexpr double kBlowUpThreshold = 1e12;

struct VelocitySolve {
  CoeffTrajectory g;
  std::vector<double> viscous;  // cumulative nu int sum lambda_i g_i^2
};

/// dg_i/dt = -nu lambda_i g_i + sum_jk A^i_jk g_j g_k + D_i(t), D linear in t
/// between samples; output sampled on the D grid.
VelocitySolve solve_v_given_FM(const CoeffTrajectory& d, const Eigen::VectorXd& v0, const GalerkinTensors& tensors,
                               const Eigen::VectorXd& eigenvalues, double nu);

/// F transport driven by the velocity trajectory (linear in F).
FieldTrajectory solve_F_given_v(const CoeffTrajectory& v, const SpectralField& F0, const Problem& pb);

enum class DriftAction { warn, abort };

struct LlgSolveOptions {
  bool renormalize = false;
  double initial_tolerance = 1e-10;  // required max||M0|-1|
  double drift_limit = 1e-6;
  DriftAction drift_action = DriftAction::warn;
};

/// LLG driven by the velocity trajectory. The returned trajectory records the
/// largest unit-norm drift seen; exceeding `drift_limit` throws
/// ConstraintViolation under DriftAction::abort.
FieldTrajectory solve_M_given_v(const CoeffTrajectory& v, const SpectralField& M0, const Problem& pb,
                                const LlgSolveOptions& opt = {});

/// D on every sample of the F/M trajectories.
CoeffTrajectory forcing_trajectory(const FieldTrajectory& F, const FieldTrajectory& M, const Problem& pb);

/// One step of the fully coupled system, accumulators included.
SimState step_monolithic(const SimState& s, double dt, const Problem& pb);

/// Projects M pointwise onto the unit sphere and back to resolved modes.
SpectralField renormalize_unit(const SpectralField& M);

/// Rates entering the energy ledger at one state.
struct EnergyRates {
  double viscous = 0.0;
  double regularization = 0.0;
  double llg = 0.0;
  double external_work = 0.0;
};

double viscous_rate(const Eigen::VectorXd& g, const Eigen::VectorXd& eigenvalues, double nu);
double regularization_rate(const SpectralField& F, const ModelParams& p);

}  // namespace magel
