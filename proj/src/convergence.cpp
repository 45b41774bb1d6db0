#include "magel/convergence.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "magel/initial.hpp"
#include "magel/subsolvers.hpp"

namespace magel {

ConvergenceCase parse_convergence_case(const std::string& s) {
  if (s == "taylor_green") return ConvergenceCase::taylor_green;
  if (s == "heat_F") return ConvergenceCase::heat_F;
  if (s == "precession") return ConvergenceCase::precession;
  if (s == "m_drift") return ConvergenceCase::m_drift;
  throw ConfigError("case must be taylor_green, heat_F, precession or m_drift, got '" + s + "'");
}

std::string to_string(ConvergenceCase c) {
  switch (c) {
    case ConvergenceCase::taylor_green: return "taylor_green";
    case ConvergenceCase::heat_F: return "heat_F";
    case ConvergenceCase::precession: return "precession";
    case ConvergenceCase::m_drift: return "m_drift";
  }
  return "?";
}

std::string ConvergenceStudy::line() const {
  std::ostringstream os;
  os.precision(4);
  os << "convergence case=" << to_string(kind) << " order=" << std::fixed << order << std::defaultfloat
     << " ratio=" << ratio << " window=[" << order_low << "," << order_high << "]"
     << " status=" << (passed() ? "pass" : "fail");
  return os.str();
}

namespace {

int steps_for(double T, double dt) { return static_cast<int>(std::lround(T / dt)); }

// Differences between successive refinements; the last run only serves as reference.
template <typename Run>
void self_convergence(ConvergenceStudy& s, int levels, double dt0, Run&& solve) {
  s.self_convergence = true;
  std::vector<Eigen::VectorXd> finals;
  for (int k = 0; k < levels; ++k) finals.push_back(solve(dt0 / std::pow(2.0, k)));
  for (int k = 0; k + 1 < levels; ++k) {
    s.dts.push_back(dt0 / std::pow(2.0, k));
    s.errors.push_back((finals[static_cast<size_t>(k)] - finals[static_cast<size_t>(k + 1)]).norm());
  }
}

Eigen::VectorXd flatten(const SpectralField& f) {
  Eigen::VectorXd out(2 * f.components() * f.domain().n * f.domain().n);
  Eigen::Index k = 0;
  for (int c = 0; c < f.components(); ++c)
    for (Eigen::Index i = 0; i < f[c].size(); ++i) {
      out(k++) = f[c].data()[i].real();
      out(k++) = f[c].data()[i].imag();
    }
  return out;
}

void finish(ConvergenceStudy& s) {
  const size_t n = s.errors.size();
  s.ratio = s.errors[n - 2] / s.errors[n - 1];
  s.order = std::log2(s.ratio);
}

ConvergenceStudy taylor_green_case() {
  ConvergenceStudy s;
  s.kind = ConvergenceCase::taylor_green;
  ModelParams p;
  const Problem pb = Problem::build(Domain(32), 24, p, {});
  SimState tg = taylor_green_state(pb, 1.0);
  const Eigen::VectorXd pure = tg.v;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd pert(pb.basis.size());
  for (int i = 0; i < pert.size(); ++i) pert(i) = normal(rng);
  const Eigen::VectorXd v0 = pure + 0.3 * pert / pert.norm();
  const double T = 1.0;
  auto solve = [&](const Eigen::VectorXd& g0, double dt) {
    const CoeffTrajectory d =
        CoeffTrajectory::constant(0.0, dt, steps_for(T, dt), Eigen::VectorXd::Zero(pb.basis.size()));
    return solve_v_given_FM(d, g0, pb.tensors, pb.basis.eigenvalues(), p.nu).g[steps_for(T, dt)];
  };
  self_convergence(s, 4, 0.05, [&](double dt) { return solve(v0, dt); });
  const Eigen::VectorXd exact = pure * std::exp(-2.0 * p.nu * T);
  std::ostringstream note;
  note << "pure Taylor-Green relative error at dt=0.05: " << (solve(pure, 0.05) - exact).norm() / exact.norm();
  s.note = note.str();
  s.order_low = 3.8;
  s.order_high = 4.2;
  finish(s);
  return s;
}

ConvergenceStudy heat_F_case() {
  ConvergenceStudy s;
  s.kind = ConvergenceCase::heat_F;
  ModelParams p;
  const Problem pb = Problem::build(Domain(16), 8, p, {});
  std::mt19937_64 rng(5);
  const SpectralField F0 = constant_field(pb.domain(), Rank::tensor2x2, Eigen::Vector4d(1, 0, 0, 1)) +
                           random_field(pb.domain(), Rank::tensor2x2, 2, rng, 0.3);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(pb.basis.size());
  g(0) = 1.0;
  g(3) = -0.7;
  const double T = 1.0;
  auto solve = [&](const Eigen::VectorXd& gv, double dt) {
    const CoeffTrajectory v = CoeffTrajectory::constant(0.0, dt, steps_for(T, dt), gv);
    return solve_F_given_v(v, F0, pb).samples.back();
  };
  self_convergence(s, 4, 0.05, [&](double dt) { return flatten(solve(g, dt)); });
  // v = 0: every mode decays by exp(-kappa |k|^2 T).
  SpectralField exact = F0;
  exact.scale_modes(heat_factor(pb.domain(), p.kappa, T));
  const SpectralField heat = solve(Eigen::VectorXd::Zero(pb.basis.size()), 0.05);
  std::ostringstream note;
  note << "v = 0 heat-kernel max coefficient error at dt=0.05: " << (heat - exact).max_abs();
  s.note = note.str();
  s.order_low = 3.8;
  s.order_high = 4.2;
  finish(s);
  return s;
}

ConvergenceStudy precession_case() {
  ConvergenceStudy s;
  s.kind = ConvergenceCase::precession;
  ModelParams p;
  ExternalField h;
  h.preset = HextPreset::uniform_constant;
  h.amplitude = 2.0;
  h.direction = Eigen::Vector3d::UnitZ();
  const Problem pb = Problem::build(Domain(8), 4, p, h);
  const double theta0 = 1.2, phi0 = 0.3, T = 1.0;
  const Eigen::Vector3d m0(std::sin(theta0) * std::cos(phi0), std::sin(theta0) * std::sin(phi0), std::cos(theta0));
  const SpectralField M0 = constant_field(pb.domain(), Rank::vec3, m0);
  // tan(theta/2) = tan(theta0/2) exp(-h t), phi = phi0 + h t
  const double hs = h.amplitude * p.mu0;
  const double theta = 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(-hs * T));
  const double phi = phi0 + hs * T;
  const Eigen::Vector3d exact(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  for (int k = 0; k < 3; ++k) {
    const double dt = 0.1 / std::pow(2.0, k);
    const CoeffTrajectory v =
        CoeffTrajectory::constant(0.0, dt, steps_for(T, dt), Eigen::VectorXd::Zero(pb.basis.size()));
    LlgSolveOptions opt;
    opt.drift_limit = 1e-2;  // coarse steps drift visibly; the error is what is measured
    const SpectralField M = solve_M_given_v(v, M0, pb, opt).samples.back();
    s.dts.push_back(dt);
    s.errors.push_back((mean(M) - exact).norm());
  }
  s.order_low = 3.8;
  s.order_high = 4.2;
  finish(s);
  return s;
}

ConvergenceStudy m_drift_case() {
  ConvergenceStudy s;
  s.kind = ConvergenceCase::m_drift;
  ModelParams p;
  ExternalField h;
  h.preset = HextPreset::uniform_constant;
  h.amplitude = 10.0;
  h.direction = Eigen::Vector3d::UnitX();
  const Problem pb = Problem::build(Domain(32), 24, p, h);
  const SimState s0 = generic_small_state(pb, 7);
  const double T = 0.5;
  for (int k = 0; k < 2; ++k) {
    const double dt = 2e-3 / std::pow(2.0, k);
    SimState cur = s0;
    double drift = 0.0;
    for (int i = 0; i < steps_for(T, dt); ++i) {
      cur = step_monolithic(cur, dt, pb);
      drift = std::max(drift, cur.unit_norm_drift());
    }
    s.dts.push_back(dt);
    s.errors.push_back(drift);
  }
  s.order_low = std::log2(12.0);
  s.order_high = std::log2(20.0);
  finish(s);
  return s;
}

}  // namespace

ConvergenceStudy run_convergence(ConvergenceCase c) {
  switch (c) {
    case ConvergenceCase::taylor_green: return taylor_green_case();
    case ConvergenceCase::heat_F: return heat_F_case();
    case ConvergenceCase::precession: return precession_case();
    case ConvergenceCase::m_drift: return m_drift_case();
  }
  throw ConfigError("unknown convergence case");
}

}  // namespace magel
