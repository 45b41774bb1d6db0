#include "magel/subsolvers.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace magel {

namespace {

// State vector shared by all steppers; unused parts stay empty.
struct Stage {
  Eigen::VectorXd g;
  SpectralField F;
  SpectralField M;
  Eigen::Vector4d acc = Eigen::Vector4d::Zero();  // viscous, regularization, llg, external work
};

Stage operator+(Stage a, const Stage& b) {
  if (a.g.size()) a.g += b.g;
  if (a.F.components()) a.F += b.F;
  if (a.M.components()) a.M += b.M;
  a.acc += b.acc;
  return a;
}

Stage operator*(double s, Stage a) {
  if (a.g.size()) a.g *= s;
  if (a.F.components()) a.F *= s;
  if (a.M.components()) a.M *= s;
  a.acc *= s;
  return a;
}

// exp(L h) for a fixed h = dt/2.
struct Propagator {
  Eigen::VectorXd g;
  RealGrid F, M;

  Stage operator()(Stage u, double /*h*/) const {
    if (u.g.size()) u.g.array() *= g.array();
    if (u.F.components()) u.F.scale_modes(F);
    if (u.M.components()) u.M.scale_modes(M);
    return u;
  }
};

double llg_stiff_coefficient(const Problem& pb) {
  return pb.llg_form == LlgForm::expanded ? 1.0 : pb.params.lambda_llg * 2.0 * pb.params.a_exch;
}

Propagator make_propagator(const Problem& pb, double h, bool with_g, bool with_F, bool with_M) {
  Propagator p;
  if (with_g) p.g = (-pb.params.nu * h * pb.basis.eigenvalues().array()).exp().matrix();
  if (with_F) p.F = heat_factor(pb.domain(), pb.params.kappa, h);
  if (with_M) p.M = heat_factor(pb.domain(), llg_stiff_coefficient(pb), h);
  return p;
}

int step_count(const CoeffTrajectory& v) { return v.steps(); }

}  // namespace

RealGrid heat_factor(const Domain& d, double coef, double h) { return (-coef * h * laplace_symbol(d)).exp(); }

void check_finite(const Eigen::VectorXd& g, double last_valid_time, const char* what) {
  if (!g.allFinite() || (g.size() && g.cwiseAbs().maxCoeff() > kBlowUpThreshold))
    throw DivergedError(std::string(what) + " coefficients diverged after t=" + std::to_string(last_valid_time),
                        last_valid_time);
}

void check_finite(const SpectralField& f, double last_valid_time, const char* what) {
  const double m = f.max_abs();
  if (!std::isfinite(m) || m > kBlowUpThreshold)
    throw DivergedError(std::string(what) + " coefficients diverged after t=" + std::to_string(last_valid_time),
                        last_valid_time);
}

double viscous_rate(const Eigen::VectorXd& g, const Eigen::VectorXd& eigenvalues, double nu) {
  return nu * (eigenvalues.array() * g.array().square()).sum();
}

double regularization_rate(const SpectralField& F, const ModelParams& p) {
  // kappa int W''[grad F, grad F] = kappa 2 c_e int |grad F|^2
  const RealGrid sym = laplace_symbol(F.domain());
  double s = 0.0;
  for (int c = 0; c < F.components(); ++c) s += (sym * F[c].abs2()).sum();
  return p.kappa * 2.0 * p.elastic.c_e * s * F.domain().area();
}

VelocitySolve solve_v_given_FM(const CoeffTrajectory& d, const Eigen::VectorXd& v0, const GalerkinTensors& tensors,
                               const Eigen::VectorXd& eigenvalues, double nu) {
  const int m = static_cast<int>(v0.size());
  if (d.dimension() != m || tensors.size() != m || eigenvalues.size() != m)
    throw ShapeError("solve_v_given_FM: mode counts of D, v0, tensors and eigenvalues differ");
  const double dt = d.dt();
  Propagator prop;
  prop.g = (-nu * 0.5 * dt * eigenvalues.array()).exp().matrix();
  auto rhs = [&](const Stage& u, double t) {
    Stage r;
    r.g = tensors.contract(u.g) + d.at(t);
    r.acc(0) = viscous_rate(u.g, eigenvalues, nu);
    return r;
  };
  std::vector<Eigen::VectorXd> out{v0};
  std::vector<double> visc{0.0};
  Stage u;
  u.g = v0;
  check_finite(u.g, d.t0(), "velocity");
  for (int i = 0; i < d.steps(); ++i) {
    const double t = d.time(i);
    u = ifrk4_step(u, t, dt, rhs, prop);
    check_finite(u.g, t, "velocity");
    out.push_back(u.g);
    visc.push_back(u.acc(0));
  }
  return {CoeffTrajectory(d.t0(), dt, std::move(out)), std::move(visc)};
}

FieldTrajectory solve_F_given_v(const CoeffTrajectory& v, const SpectralField& F0, const Problem& pb) {
  if (F0.rank() != Rank::tensor2x2) throw ShapeError("solve_F_given_v: F0 must be tensor2x2");
  if (v.dimension() != pb.basis.size()) throw ShapeError("solve_F_given_v: velocity trajectory mode count");
  const double dt = v.dt();
  const Propagator prop = make_propagator(pb, 0.5 * dt, false, true, false);
  auto rhs = [&](const Stage& u, double t) {
    Stage r;
    r.F = transport_rhs_F(pb.basis.synthesize(v.at(t)), u.F, pb.params, pb.dealias).nonlinear;
    r.acc(1) = regularization_rate(u.F, pb.params);
    return r;
  };
  FieldTrajectory out;
  out.t0 = v.t0();
  out.dt = dt;
  out.samples.push_back(F0);
  out.dissipation.push_back(0.0);
  Stage u;
  u.F = F0;
  for (int i = 0; i < step_count(v); ++i) {
    const double t = v.time(i);
    u = ifrk4_step(u, t, dt, rhs, prop);
    check_finite(u.F, t, "deformation gradient");
    out.samples.push_back(u.F);
    out.dissipation.push_back(u.acc(1));
  }
  return out;
}

SpectralField renormalize_unit(const SpectralField& M) {
  auto g = backward(M);
  const RealGrid norm = (g[0].square() + g[1].square() + g[2].square()).sqrt();
  for (auto& c : g) c /= norm;
  return forward_truncated(M.domain(), Rank::vec3, g);
}

FieldTrajectory solve_M_given_v(const CoeffTrajectory& v, const SpectralField& M0, const Problem& pb,
                                const LlgSolveOptions& opt) {
  if (M0.rank() != Rank::vec3) throw ShapeError("solve_M_given_v: M0 must be vec3");
  if (v.dimension() != pb.basis.size()) throw ShapeError("solve_M_given_v: velocity trajectory mode count");
  const double drift0 = unit_norm_drift(M0);
  if (drift0 > opt.initial_tolerance)
    throw ConstraintViolation("solve_M_given_v: initial max||M|-1| = " + format_number(drift0) +
                                  " exceeds " + format_number(opt.initial_tolerance),
                              v.t0(), drift0);
  const double dt = v.dt();
  const Propagator prop = make_propagator(pb, 0.5 * dt, false, false, true);
  auto rhs = [&](const Stage& u, double t) {
    const SplitRhs r = llg_rhs_split(pb.basis.synthesize(v.at(t)), u.M, pb.hext, t, pb.params, pb.llg_form, pb.dealias);
    Stage s;
    s.M = r.nonlinear;
    s.acc(2) = r.dissipation_rate;
    s.acc(3) = r.external_work_rate;
    return s;
  };
  FieldTrajectory out;
  out.t0 = v.t0();
  out.dt = dt;
  out.samples.push_back(M0);
  out.dissipation.push_back(0.0);
  out.external_work.push_back(0.0);
  out.max_unit_drift = drift0;
  Stage u;
  u.M = M0;
  bool warned = false;
  for (int i = 0; i < step_count(v); ++i) {
    const double t = v.time(i);
    u = ifrk4_step(u, t, dt, rhs, prop);
    check_finite(u.M, t, "magnetization");
    if (opt.renormalize) u.M = renormalize_unit(u.M);
    const double drift = unit_norm_drift(u.M);
    out.max_unit_drift = std::max(out.max_unit_drift, drift);
    if (drift > opt.drift_limit) {
      const std::string msg = "max||M|-1| = " + format_number(drift) + " at t=" + format_number(t + dt);
      if (opt.drift_action == DriftAction::abort) throw ConstraintViolation(msg, t + dt, drift);
      if (!warned) std::cerr << "warning: " << msg << '\n';
      warned = true;
    }
    out.samples.push_back(u.M);
    out.dissipation.push_back(u.acc(2));
    out.external_work.push_back(u.acc(3));
  }
  return out;
}

CoeffTrajectory forcing_trajectory(const FieldTrajectory& F, const FieldTrajectory& M, const Problem& pb) {
  if (F.size() != M.size()) throw ShapeError("forcing_trajectory: F and M sample counts differ");
  std::vector<Eigen::VectorXd> d;
  d.reserve(static_cast<size_t>(F.size()));
  for (int i = 0; i < F.size(); ++i)
    d.push_back(stress_forcing(F.samples[static_cast<size_t>(i)], M.samples[static_cast<size_t>(i)], pb.hext,
                               F.time(i), pb.basis, pb.params, pb.dealias));
  return CoeffTrajectory(F.t0, F.dt, std::move(d));
}

SimState step_monolithic(const SimState& s, double dt, const Problem& pb) {
  if (!(dt > 0)) throw ConfigError("step_monolithic: dt must be positive");
  const Propagator prop = make_propagator(pb, 0.5 * dt, true, true, true);
  const Eigen::VectorXd ev = pb.basis.eigenvalues();
  auto rhs = [&](const Stage& u, double t) {
    const SpectralField v = pb.basis.synthesize(u.g);
    const SplitRhs mr = llg_rhs_split(v, u.M, pb.hext, t, pb.params, pb.llg_form, pb.dealias);
    Stage r;
    r.F = transport_rhs_F(v, u.F, pb.params, pb.dealias).nonlinear;
    r.M = mr.nonlinear;
    r.g = pb.tensors.contract(u.g) + stress_forcing(u.F, u.M, pb.hext, t, pb.basis, pb.params, pb.dealias);
    r.acc << viscous_rate(u.g, ev, pb.params.nu), regularization_rate(u.F, pb.params), mr.dissipation_rate,
        mr.external_work_rate;
    return r;
  };
  Stage u;
  u.g = s.v;
  u.F = s.F;
  u.M = s.M;
  u = ifrk4_step(u, s.t, dt, rhs, prop);
  SimState out;
  out.t = s.t + dt;
  out.v = std::move(u.g);
  out.F = std::move(u.F);
  out.M = std::move(u.M);
  out.acc = {s.acc.viscous + u.acc(0), s.acc.regularization + u.acc(1), s.acc.llg + u.acc(2),
             s.acc.external_work + u.acc(3)};
  out.check_finite(s.t);
  return out;
}

}  // namespace magel
