#include "magel/coupler.hpp"

#include <cmath>
#include <iostream>

namespace magel {

CouplingMode parse_coupling_mode(const std::string& s) {
  if (s == "fixed_point") return CouplingMode::fixed_point;
  if (s == "monolithic") return CouplingMode::monolithic;
  throw ConfigError("mode must be fixed_point or monolithic, got '" + s + "'");
}

std::string to_string(CouplingMode m) { return m == CouplingMode::fixed_point ? "fixed_point" : "monolithic"; }

void FixedPointConfig::validate() const {
  if (!(tau > 0)) throw ConfigError("tau must be > 0");
  if (!(tol > 0)) throw ConfigError("fp_tol must be > 0");
  if (max_iter < 1) throw ConfigError("fp_max_iter must be >= 1");
  if (!(tau_min > 0) || tau_min > tau) throw ConfigError("tau_min must lie in (0, tau]");
}

namespace {

int whole_steps(double span, double dt, const char* what) {
  const double s = span / dt;
  const long r = std::lround(s);
  if (r < 1 || std::abs(s - static_cast<double>(r)) > 1e-9 * std::max(1.0, s))
    throw ConfigError(std::string(what) + " must be a positive multiple of dt");
  return static_cast<int>(r);
}

}  // namespace

LResult apply_L(const CoeffTrajectory& v, const SimState& state0, const Problem& pb, const LlgSolveOptions& llg) {
  if (v.dimension() != state0.v.size()) throw ShapeError("apply_L: trajectory and state mode counts differ");
  if (v[0] != state0.v) throw ConfigError("apply_L: trajectory must start at the state's velocity");
  LResult r;
  r.F = solve_F_given_v(v, state0.F, pb);
  r.M = solve_M_given_v(v, state0.M, pb, llg);
  const CoeffTrajectory d = forcing_trajectory(r.F, r.M, pb);
  VelocitySolve vs = solve_v_given_FM(d, state0.v, pb.tensors, pb.basis.eigenvalues(), pb.params.nu);
  r.v = std::move(vs.g);
  r.viscous = std::move(vs.viscous);
  return r;
}

SimState WindowResult::sample(int i, const SimState& start) const {
  const size_t k = static_cast<size_t>(i);
  SimState s;
  s.t = start.t + i * fixed_point.v.dt();
  s.v = fixed_point.v[i];
  s.F = fixed_point.F.samples[k];
  s.M = fixed_point.M.samples[k];
  s.acc = {start.acc.viscous + fixed_point.viscous[k], start.acc.regularization + fixed_point.F.dissipation[k],
           start.acc.llg + fixed_point.M.dissipation[k], start.acc.external_work + fixed_point.M.external_work[k]};
  return s;
}

WindowResult run_window_fixed_point(const SimState& state0, double tau, double dt, const FixedPointConfig& cfg,
                                    const Problem& pb, const LlgSolveOptions& llg, std::vector<IterationRecord>* log,
                                    int window_index) {
  cfg.validate();
  const int steps = whole_steps(tau, dt, "window length");
  const double radius = state0.v.norm() + 1.0;
  CoeffTrajectory v = CoeffTrajectory::constant(state0.t, dt, steps, state0.v);
  WindowResult w;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    LResult next = apply_L(v, state0, pb, llg);
    w.residual = next.v.sup_sq_distance(v);
    w.iterations = k;
    IterationRecord rec{window_index, state0.t, k, w.residual, next.v.sup_norm(), radius, false};
    rec.ball_violation = rec.sup_norm > radius;
    if (rec.ball_violation)
      std::cerr << "warning: window " << window_index << " iterate " << k << " leaves the ball of radius " << radius
                << " (sup norm " << rec.sup_norm << ")\n";
    if (log) log->push_back(rec);
    v = next.v;
    w.fixed_point = std::move(next);
    if (w.residual <= cfg.tol) {
      w.converged = true;
      break;
    }
  }
  if (!w.converged)
    throw FixedPointError("fixed point not reached on window at t=" + format_number(state0.t) + " after " +
                              std::to_string(w.iterations) + " iterations (residual " + format_number(w.residual) +
                              ")",
                          w.residual, w.iterations);
  // a zero last update means the iterate already is its own image, bit for bit
  if (w.residual > 0.0) {
    LResult check = apply_L(v, state0, pb, llg);
    w.verification_residual = check.v.sup_sq_distance(v);
    w.fixed_point = std::move(check);
  }
  w.end = w.sample(steps, state0);
  return w;
}

namespace {

void check_drift(const SimState& s, const LlgSolveOptions& llg, double& max_drift, bool& warned) {
  const double drift = s.unit_norm_drift();
  max_drift = std::max(max_drift, drift);
  if (drift <= llg.drift_limit) return;
  const std::string msg = "max||M|-1| = " + format_number(drift) + " at t=" + format_number(s.t);
  if (llg.drift_action == DriftAction::abort) throw ConstraintViolation(msg, s.t, drift);
  if (!warned) std::cerr << "warning: " << msg << '\n';
  warned = true;
}

}  // namespace

RunResult run(const SimState& initial, double horizon, const FixedPointConfig& cfg, const Problem& pb,
              const RunOptions& opt, const StateObserver& observer) {
  cfg.validate();
  if (!(horizon > 0)) throw ConfigError("T must be > 0");
  if (!(opt.dt > 0)) throw ConfigError("dt must be > 0");
  const int total = whole_steps(horizon, opt.dt, "T");
  RunResult res;
  res.final_state = initial;
  res.max_unit_drift = initial.unit_norm_drift();
  if (observer) observer(initial, {});
  SimState cur = initial;
  int done = 0;
  bool warned = false;
  try {
    if (cfg.mode == CouplingMode::monolithic) {
      for (; done < total; ++done) {
        cur = step_monolithic(cur, opt.dt, pb);
        if (opt.llg.renormalize) cur.M = renormalize_unit(cur.M);
        check_drift(cur, opt.llg, res.max_unit_drift, warned);
        res.final_state = cur;
        if (observer) observer(cur, {0, 0});
      }
    } else {
      int window_steps = whole_steps(cfg.tau, opt.dt, "tau");
      const int min_steps = std::max(1, static_cast<int>(std::ceil(cfg.tau_min / opt.dt - 1e-9)));
      int index = 0;
      while (done < total) {
        const int steps = std::min(window_steps, total - done);
        WindowResult w;
        try {
          w = run_window_fixed_point(cur, steps * opt.dt, opt.dt, cfg, pb, opt.llg, &res.iterations, index);
        } catch (const FixedPointError& e) {
          if (window_steps / 2 < min_steps) throw;
          window_steps /= 2;
          ++res.tau_halvings;
          std::cerr << "warning: " << e.what() << "; retrying with tau=" << window_steps * opt.dt << '\n';
          continue;
        }
        res.windows.push_back({index, cur.t, steps * opt.dt, w.iterations, w.residual});
        for (int i = 1; i <= steps; ++i) {
          SimState s = w.sample(i, cur);
          check_drift(s, opt.llg, res.max_unit_drift, warned);
          if (observer) observer(s, {index, w.iterations});
        }
        cur = w.end;
        res.final_state = cur;
        done += steps;
        ++index;
      }
    }
    res.completed = true;
  } catch (const DivergedError& e) {
    res.failure = std::string("diverged: ") + e.what();
    res.failure_time = e.last_valid_time();
  } catch (const FixedPointError& e) {
    res.failure = std::string("tau underflow: ") + e.what();
    res.failure_time = cur.t;
  } catch (const ConstraintViolation& e) {
    res.failure = std::string("constraint violation: ") + e.what();
    res.failure_time = e.time();
  }
  return res;
}

}  // namespace magel
