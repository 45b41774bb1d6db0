// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "magel/coupler.hpp"
#include "magel/diagnostics.hpp"
#include "magel/initial.hpp"
#include "magel/weakform.hpp"

using namespace magel;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << "criterion " << id << ' ' << (ok ? "PASS" : "FAIL") << ' ' << name << ": " << detail << std::endl;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double max_norm_fine(const SpectralField& f) {
  double m = 0.0;
  for (const auto& c : backward(f, 2 * f.domain().n)) m = std::max(m, c.abs().maxCoeff());
  return m;
}

double relative_state_difference(const SimState& a, const SimState& b) {
  const double num = (a.v - b.v).squaredNorm() + l2_norm_sq(a.F - b.F) + l2_norm_sq(a.M - b.M);
  const double den = b.v.squaredNorm() + l2_norm_sq(b.F) + l2_norm_sq(b.M);
  return std::sqrt(num / den);
}

ExternalField uniform_field(double h0, const Eigen::Vector3d& dir) {
  ExternalField h;
  h.preset = HextPreset::uniform_constant;
  h.amplitude = h0;
  h.direction = dir;
  return h;
}

// Worst normalized cross/expanded difference over a sample of projected-unit fields.
double form_gap(const Domain& d, double perturbation, std::mt19937_64& rng, double* drift) {
  const ModelParams p;
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const SpectralField M = random_unit_field(d, 1, rng, perturbation);
    const SpectralField v = random_field(d, Rank::vec2, 3, rng, 0.5);
    if (drift) *drift = std::max(*drift, unit_norm_drift(M));
    const SpectralField e = llg_rhs_expanded(v, M, ExternalField{}, 0.0, p).total(M);
    const SpectralField c = llg_rhs_cross(v, M, effective_field(M, ExternalField{}, 0.0, p), p);
    worst = std::max(worst, max_norm_fine(e - c) / (1.0 + max_norm_fine(laplacian(M))));
  }
  return worst;
}

void criterion_1() {
  const Domain d(32);
  std::mt19937_64 rng(101);
  double drift = 0.0;
  const auto t0 = Clock::now();
  // perturbation 0.05 keeps the normalized field resolved to round-off at n = 32
  const double worst = form_gap(d, 0.05, rng, &drift);
  const double secs = seconds_since(t0);
  const double coarse = form_gap(d, 0.1, rng, nullptr);
  report(1, worst <= 1e-9 && secs < 5.0, "LLG form equivalence",
         "max |cross - expanded| / (1 + |Lap M|) = " + fmt("%.3e", worst) + " (<= 1e-9), unit drift " +
             fmt("%.1e", drift) + ", " + fmt("%.2f", secs) + " s (< 5 s); with perturbation 0.1 (truncation tail " +
             "not resolved at n=32) the gap is " + fmt("%.1e", coarse));
}

void criterion_2() {
  const auto t0 = Clock::now();
  const ModelParams p;
  const Problem pb = Problem::build(Domain(32), 24, p, {});
  const SimState s0 = taylor_green_state(pb);
  RunOptions opt;
  opt.dt = 1e-3;
  const RunResult r = run(s0, 1.0, FixedPointConfig{}, pb, opt);
  const Eigen::VectorXd exact = s0.v * std::exp(-2 * p.nu * 1.0);
  // relative L2 error of the velocity field equals the coefficient error for an orthonormal basis
  const double err = (r.final_state.v - exact).norm() / exact.norm();
  const double secs = seconds_since(t0);
  report(2, r.completed && err <= 1e-8 && secs < 30.0, "Taylor-Green regression",
         "relative L2 velocity error at t=1 = " + fmt("%.3e", err) + " (<= 1e-8), " + fmt("%.2f", secs) +
             " s (< 30 s)");
}

void criterion_3() {
  const auto t0 = Clock::now();
  ModelParams p;
  p.kappa = 0.1;
  const Problem pb = Problem::build(Domain(32), 24, p, {});
  std::mt19937_64 rng(103);
  const SpectralField F0 = constant_field(pb.domain(), Rank::tensor2x2, Eigen::Vector4d(1, 0, 0, 1)) +
                           random_field(pb.domain(), Rank::tensor2x2, 15, rng, 0.5);
  const CoeffTrajectory v = CoeffTrajectory::constant(0.0, 1e-3, 1000, Eigen::VectorXd::Zero(pb.basis.size()));
  const SpectralField F = solve_F_given_v(v, F0, pb).samples.back();
  const Domain& d = pb.domain();
  double worst = 0.0;
  for (int c = 0; c < 4; ++c)
    for (int j = 0; j < d.n; ++j)
      for (int i = 0; i < d.n; ++i) {
        if (std::abs(F0[c](i, j)) < 1e-300) continue;
        const double k2 = std::pow(d.kscale(), 2) * (std::pow(d.wavenumber(i), 2) + std::pow(d.wavenumber(j), 2));
        const std::complex<double> exact = F0[c](i, j) * std::exp(-p.kappa * k2 * 1.0);
        if (std::abs(exact) < 1e-280) continue;
        worst = std::max(worst, std::abs(F[c](i, j) - exact) / std::abs(exact));
      }
  const double secs = seconds_since(t0);
  report(3, worst <= 1e-10 && secs < 10.0, "F heat decay",
         "max per-mode relative error at t=1 = " + fmt("%.3e", worst) + " (<= 1e-10), " + fmt("%.2f", secs) +
             " s (< 10 s)");
}

struct GenericRun {
  std::vector<EnergyRow> rows;
  double ied = 0.0;
  double seconds = 0.0;
  WeakFormReport weak, corrupted;
  bool completed = false;
  double max_drift = 0.0;
};

// The generic small-data coupled run shared by criteria 4, 6 and 9. Weak-form
// pairings are streamed; their cost is excluded from the run time.
GenericRun generic_run(double dt, bool with_corruption) {
  const Problem pb = Problem::build(Domain(32), 24, ModelParams{}, {});
  const SimState s0 = generic_small_state(pb, 1);
  const TestBattery battery = make_battery(pb, 20, 2024);
  WeakFormAccumulator clean(pb, battery), bad(pb, battery);
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  GenericRun out;
  out.ied = ied(s0, pb, 1.0).total;
  double weak_secs = 0.0;
  int index = 0;
  RunOptions opt;
  opt.dt = dt;
  const auto t0 = Clock::now();
  const RunResult r = run(s0, 1.0, FixedPointConfig{}, pb, opt, [&](const SimState& s, const StepInfo& info) {
    EnergyRow row = energy_components(s, pb);
    row.fp_iterations = info.fp_iterations;
    row.m_drift = s.unit_norm_drift();
    out.rows.push_back(row);
    const auto w0 = Clock::now();
    clean.add(s);
    if (with_corruption) {
      std::vector<SimState> one{s};
      if (index == steps / 2) corrupt_sample(one, 0, 1e-3);
      bad.add(one[0]);
    }
    weak_secs += seconds_since(w0);
    ++index;
  });
  out.seconds = seconds_since(t0) - weak_secs;
  out.completed = r.completed;
  out.max_drift = r.max_unit_drift;
  const auto w0 = Clock::now();
  out.weak = clean.finish();
  if (with_corruption) out.corrupted = bad.finish();
  std::cerr << "generic run dt=" << dt << ": " << out.seconds << " s integration, "
            << weak_secs + seconds_since(w0) << " s weak-form pairings\n";
  return out;
}

void criteria_4_6_9() {
  GenericRun a = generic_run(1e-3, true);
  const double scale = std::max(a.ied, 1.0);
  const double balance = energy_balance_residual(a.rows);
  double increase = 0.0;
  for (size_t i = 1; i < a.rows.size(); ++i) increase = std::max(increase, a.rows[i].total - a.rows[i - 1].total);
  report(4, a.completed && balance <= 1e-6 * scale && increase <= 1e-8 && a.seconds < 120.0, "energy inequality",
         "IED = " + fmt("%.4f", a.ied) + ", max balance residual = " + fmt("%.3e", balance) + " (<= " +
             fmt("%.1e", 1e-6 * scale) + "), largest energy increase = " + fmt("%.2e", increase) +
             " (<= 1e-8), " + fmt("%.1f", a.seconds) + " s (< 120 s)");

  const AprioriReport ap = apriori_report(a.rows, a.ied, 1e-6);
  report(6, a.completed && !ap.any_exceeds, "a-priori monitor",
         "max LHS = " + fmt("%.6f", ap.max_lhs) + " vs IED + 1e-6 = " + fmt("%.6f", a.ied + 1e-6));

  GenericRun b = generic_run(5e-4, false);
  bool order_ok = true;
  std::ostringstream orders;
  for (WeakEquation e : {WeakEquation::momentum, WeakEquation::deformation, WeakEquation::magnetization}) {
    const double order = std::log2(a.weak.total_of(e) / b.weak.total_of(e));
    order_ok = order_ok && order >= 1.9;
    orders << ' ' << to_string(e) << ' ' << fmt("%.2f", order);
  }
  const double amplification = a.corrupted.max() / a.weak.max();
  report(9, a.weak.max() <= 1e-5 && order_ok && amplification >= 10.0, "weak-form certificate",
         "max normalized residual = " + fmt("%.3e", a.weak.max()) + " (<= 1e-5), orders under dt halving:" +
             orders.str() + " (>= 1.9), 1e-3 corruption raises the max by " + fmt("%.1f", amplification) +
             "x (>= 10x)");
}

void criterion_5() {
  const Problem pb = Problem::build(Domain(32), 24, ModelParams{}, uniform_field(10.0, Eigen::Vector3d::UnitX()));
  const SimState s0 = generic_small_state(pb, 7);
  FixedPointConfig cfg;
  cfg.mode = CouplingMode::monolithic;
  double drift[2];
  for (int k = 0; k < 2; ++k) {
    RunOptions opt;
    opt.dt = 1e-3 / (k + 1);
    opt.llg.drift_limit = 1.0;
    drift[k] = run(s0, 1.0, cfg, pb, opt).max_unit_drift;
  }
  const double ratio = drift[0] / drift[1];
  report(5, drift[0] <= 1e-8 && ratio >= 12.0 && ratio <= 20.0, "unit-norm constraint",
         "H_ext = 10 e1, max ||M|-1| at dt=1e-3 = " + fmt("%.3e", drift[0]) + " (<= 1e-8), at dt=5e-4 = " +
             fmt("%.3e", drift[1]) + ", ratio " + fmt("%.2f", ratio) + " (in [12, 20])");
}

void criterion_7() {
  const Problem pb = Problem::build(Domain(32), 24, ModelParams{}, {});
  const SimState s0 = generic_small_state(pb, 1);
  const double T = 0.5;
  RunOptions opt;
  // tau / 4 = 0.0125 must be a whole number of steps
  opt.dt = 5e-4;
  FixedPointConfig mono;
  mono.mode = CouplingMode::monolithic;
  const SimState ref = run(s0, T, mono, pb, opt).final_state;
  double diff[3];
  for (int k = 0; k < 3; ++k) {
    FixedPointConfig cfg;
    cfg.tau = 0.05 / (1 << k);
    diff[k] = relative_state_difference(run(s0, T, cfg, pb, opt).final_state, ref);
  }
  // least-squares slope of log diff against log tau
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < 3; ++k) {
    const double x = std::log(0.05 / (1 << k)), y = std::log(diff[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  report(7, diff[0] <= 1e-5 && slope >= 0.8 && slope <= 1.2, "fixed-point/monolithic consistency",
         "relative terminal difference at tau=0.05: " + fmt("%.3e", diff[0]) + " (<= 1e-5); tau/2: " +
             fmt("%.3e", diff[1]) + ", tau/4: " + fmt("%.3e", diff[2]) + "; observed slope " + fmt("%.3f", slope) +
             " (in [0.8, 1.2])");
}

void criterion_8() {
  double skew = 0.0, cubic = 0.0;
  std::mt19937_64 rng(108);
  std::normal_distribution<double> nd;
  for (int m : {1, 8, 16, 24, 32}) {
    const VelocityBasis b(Domain(32), m);
    const GalerkinTensors A = assemble_convection_tensor(b);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) skew = std::max(skew, std::abs(A(i, j, k) + A(k, j, i)));
    for (int s = 0; s < 20; ++s) {
      Eigen::VectorXd g(m);
      for (int i = 0; i < m; ++i) g(i) = nd(rng);
      cubic = std::max(cubic, std::abs(g.dot(A.contract(g))) / std::pow(g.norm(), 3));
    }
  }
  report(8, skew <= 1e-12 && cubic <= 1e-11, "convection tensor identities",
         "max |A^i_jk + A^k_ji| = " + fmt("%.2e", skew) + " (<= 1e-12), max |sum g_i g_j g_k A^i_jk| / |g|^3 = " +
             fmt("%.2e", cubic) + " (<= 1e-11), m in {1, 8, 16, 24, 32}");
}

void criterion_10() {
  const Domain d(32), fine(64);
  const auto sample = inequality_sample(d, 100, 110);
  double refine = 0.0, scaling = 0.0;
  for (const auto& f : sample) {
    SpectralField g(fine, Rank::vec3);
    for (int c = 0; c < 3; ++c) g[c] = resize_spectrum(f[c], fine.n);
    const auto a = inequality_ratios(f), b = inequality_ratios(g), s = inequality_ratios(10.0 * f);
    for (int q = 0; q < kInequalityCount; ++q) {
      const auto& x = a[static_cast<size_t>(q)];
      if (!x) continue;
      refine = std::max(refine, std::abs(*b[static_cast<size_t>(q)] - *x) / *x);
      scaling = std::max(scaling, std::abs(*s[static_cast<size_t>(q)] - *x) / *x);
    }
  }
  const RatioReport rep = inequality_ratio_report(sample);
  std::ostringstream maxima;
  for (int q = 0; q < kInequalityCount; ++q)
    maxima << ' ' << to_string(static_cast<Inequality>(q)) << '=' << fmt("%.3f", rep.max_ratio[static_cast<size_t>(q)]);
  report(10, refine < 0.01 && scaling < 1e-12, "inequality ratio stability",
         "max relative change under grid doubling = " + fmt("%.2e", refine) + " (< 1%), under scaling by 10 = " +
             fmt("%.2e", scaling) + " (< 1e-12); measured maxima:" + maxima.str());
}

}  // namespace

int main() {
  const std::vector<std::pair<std::vector<int>, std::function<void()>>> checks = {
      {{1}, criterion_1}, {{2}, criterion_2}, {{3}, criterion_3}, {{4, 6, 9}, criteria_4_6_9},
      {{5}, criterion_5}, {{7}, criterion_7}, {{8}, criterion_8}, {{10}, criterion_10}};
  for (const auto& [ids, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      for (int id : ids) report(id, false, "exception", e.what());
    }
  }
  std::cout << (failures == 0 ? "acceptance: all criteria pass" : "acceptance: " + std::to_string(failures) + " failing")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
