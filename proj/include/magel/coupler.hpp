// The solution map L (velocity trajectory -> F, M -> forcing -> velocity),
// Picard iteration on one window, and the windowed extension to a horizon.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "magel/subsolvers.hpp"

namespace magel {

enum class CouplingMode { fixed_point, monolithic };

CouplingMode parse_coupling_mode(const std::string& s);
std::string to_string(CouplingMode m);

struct FixedPointConfig {
  double tau = 0.05;      // window length
  double tol = 1e-10;     // on sup_t sum_i |dg_i|^2
  int max_iter = 50;
  CouplingMode mode = CouplingMode::fixed_point;
  double tau_min = 1e-3;  // smallest window tried after halving

  void validate() const;
};

struct LResult {
  CoeffTrajectory v;  // L(v)
  FieldTrajectory F;
  FieldTrajectory M;
  std::vector<double> viscous;  // cumulative along L(v)
};

/// One application of L on a window starting at `state0`.
LResult apply_L(const CoeffTrajectory& v, const SimState& state0, const Problem& pb,
                const LlgSolveOptions& llg = {});

struct IterationRecord {
  int window = 0;
  double t0 = 0.0;
  int iteration = 0;
  double residual = 0.0;   // sup_t sum_i |L(v)_i - v_i|^2
  double sup_norm = 0.0;   // sup_t |L(v)(t)|
  double ball_radius = 0.0;
  bool ball_violation = false;
};

struct WindowResult {
  SimState end;
  LResult fixed_point;  // verification application of L to the converged iterate
  int iterations = 0;
  double residual = 0.0;               // at convergence
  double verification_residual = 0.0;  // sup distance of the verification application
  bool converged = false;

  /// State at sample i of the window (accumulators offset by the window start).
  SimState sample(int i, const SimState& start) const;
};

/// Picard iteration from the constant-in-time extension of state0's
/// velocity. Throws FixedPointError when `max_iter` is exhausted. After
/// convergence L is applied once more: that application re-verifies the
/// residual and is what the window reports, because its (F, M) were computed
/// from the converged iterate and so match its velocity to the contraction
/// factor times the last update rather than to the tolerance.
WindowResult run_window_fixed_point(const SimState& state0, double tau, double dt, const FixedPointConfig& cfg,
                                    const Problem& pb, const LlgSolveOptions& llg = {},
                                    std::vector<IterationRecord>* log = nullptr, int window_index = 0);

struct StepInfo {
  int window = 0;
  int fp_iterations = 0;
};

using StateObserver = std::function<void(const SimState&, const StepInfo&)>;

struct RunOptions {
  double dt = 1e-3;
  LlgSolveOptions llg{};
};

struct WindowRecord {
  int index = 0;
  double t0 = 0.0;
  double tau = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct RunResult {
  SimState final_state;
  bool completed = false;
  std::string failure;       // empty when completed
  double failure_time = 0.0;
  std::vector<WindowRecord> windows;
  std::vector<IterationRecord> iterations;
  int tau_halvings = 0;
  double max_unit_drift = 0.0;
};

/// Integrates to `horizon`, reporting every dt-sample (the initial one
/// included) to `observer`. Fixed-point windows are glued end to start; a
/// window that fails to converge is retried with tau halved down to tau_min.
/// Divergence or tau underflow ends the run with a failure marker.
RunResult run(const SimState& initial, double horizon, const FixedPointConfig& cfg, const Problem& pb,
              const RunOptions& opt = {}, const StateObserver& observer = {});

}  // namespace magel
