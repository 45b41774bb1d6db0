#include <doctest.h>

#include <cmath>

#include "magel/coupler.hpp"
#include "magel/initial.hpp"

using namespace magel;

namespace {

CoeffTrajectory constant_traj(const Eigen::VectorXd& g, double tau, double dt) {
  return CoeffTrajectory::constant(0.0, dt, static_cast<int>(std::lround(tau / dt)), g);
}

Problem small_problem() { return Problem::build(Domain(32), 24, ModelParams{}, {}); }

}  // namespace

TEST_CASE("solution map on trivial data") {
  const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
  const SimState s0 = zero_state(pb);
  SUBCASE("zero is a fixed point") {
    const LResult r = apply_L(constant_traj(Eigen::VectorXd::Zero(12), 0.05, 0.01), s0, pb);
    CHECK(r.v.sup_norm() == 0.0);
  }
  SUBCASE("with F = 0 and constant M the map ignores its input") {
    SimState s = s0;
    s.v = Eigen::VectorXd::LinSpaced(12, -0.5, 0.5);
    const LResult a = apply_L(constant_traj(s.v, 0.05, 0.01), s, pb);
    CoeffTrajectory other = constant_traj(Eigen::VectorXd::Constant(12, 3.0), 0.05, 0.01);
    other[0] = s.v;
    const LResult b = apply_L(other, s, pb);
    CHECK(a.v.sup_sq_distance(b.v) == 0.0);
    const VelocitySolve ref = solve_v_given_FM(constant_traj(Eigen::VectorXd::Zero(12), 0.05, 0.01), s.v, pb.tensors,
                                               pb.basis.eigenvalues(), pb.params.nu);
    CHECK(a.v.sup_sq_distance(ref.g) == 0.0);
  }
}

TEST_CASE("fixed-point windows") {
  const FixedPointConfig cfg;

  SUBCASE("zero data converges in one iteration") {
    const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
    const WindowResult w = run_window_fixed_point(zero_state(pb), 0.05, 0.01, cfg, pb);
    CHECK(w.converged);
    CHECK(w.iterations == 1);
  }
  SUBCASE("Taylor-Green matches the closed form") {
    const Problem pb = small_problem();
    const SimState s0 = taylor_green_state(pb);
    const WindowResult w = run_window_fixed_point(s0, 0.05, 1e-3, cfg, pb);
    const Eigen::VectorXd exact = s0.v * std::exp(-2 * pb.params.nu * 0.05);
    CHECK((w.end.v - exact).norm() <= 1e-10 * exact.norm());
  }
  SUBCASE("generic small data: contraction, residual re-check and monolithic agreement") {
    const Problem pb = small_problem();
    const SimState s0 = generic_small_state(pb, 3);
    std::vector<IterationRecord> log;
    const double dt = 1e-3;
    const WindowResult w = run_window_fixed_point(s0, 0.05, dt, cfg, pb, {}, &log);
    REQUIRE(w.converged);
    CHECK(w.residual <= cfg.tol);
    REQUIRE(log.size() >= 2);
    for (size_t i = 1; i < log.size(); ++i) CHECK(log[i].residual < log[i - 1].residual);
    for (const auto& r : log) {
      CHECK(r.ball_radius == doctest::Approx(s0.v.norm() + 1.0));
      CHECK_FALSE(r.ball_violation);
    }
    // the verification application contracts further, and applying L again stays within the tolerance
    CHECK(w.verification_residual <= w.residual);
    const LResult again = apply_L(w.fixed_point.v, s0, pb);
    CHECK(again.v.sup_sq_distance(w.fixed_point.v) <= cfg.tol);

    SimState m = s0;
    for (int i = 0; i < 50; ++i) m = step_monolithic(m, dt, pb);
    const double rel = std::sqrt((m.v - w.end.v).squaredNorm() + l2_norm_sq(m.F - w.end.F) + l2_norm_sq(m.M - w.end.M)) /
                       std::sqrt(m.v.squaredNorm() + l2_norm_sq(m.F) + l2_norm_sq(m.M));
    CHECK(rel <= 1e-6);
  }
  SUBCASE("iteration cap raises") {
    const Problem pb = small_problem();
    FixedPointConfig tight = cfg;
    tight.max_iter = 1;
    CHECK_THROWS_AS(run_window_fixed_point(generic_small_state(pb, 3), 0.05, 1e-3, tight, pb), FixedPointError);
  }
}

TEST_CASE("windowed extension") {
  SUBCASE("three windows on zero data") {
    const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
    FixedPointConfig cfg;
    RunOptions opt;
    opt.dt = 0.01;
    int samples = 0;
    const RunResult r = run(zero_state(pb), 3 * cfg.tau, cfg, pb, opt, [&](const SimState& s, const StepInfo&) {
      ++samples;
      CHECK(s.v.norm() == 0.0);
    });
    CHECK(r.completed);
    CHECK(r.windows.size() == 3);
    CHECK(samples == 16);
    CHECK(r.final_state.t == doctest::Approx(0.15));
  }
  SUBCASE("window boundaries glue bitwise") {
    const Problem pb = small_problem();
    FixedPointConfig cfg;
    cfg.tau = 0.01;
    RunOptions opt;
    opt.dt = 1e-3;
    std::vector<SimState> seen;
    const RunResult r = run(generic_small_state(pb, 4), 0.02, cfg, pb, opt,
                            [&](const SimState& s, const StepInfo&) { seen.push_back(s); });
    REQUIRE(r.completed);
    REQUIRE(seen.size() == 21);
    // the state reported at the end of window 0 starts window 1
    const WindowResult w1 = run_window_fixed_point(seen[10], 0.01, 1e-3, cfg, pb);
    CHECK(w1.end.v == r.final_state.v);
    CHECK((w1.end.M - r.final_state.M).max_abs() == 0.0);
  }
  SUBCASE("monolithic mode reports every step") {
    const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
    FixedPointConfig cfg;
    cfg.mode = CouplingMode::monolithic;
    RunOptions opt;
    opt.dt = 0.01;
    int samples = 0;
    const RunResult r = run(zero_state(pb), 0.1, cfg, pb, opt, [&](const SimState&, const StepInfo&) { ++samples; });
    CHECK(r.completed);
    CHECK(samples == 11);
  }
  SUBCASE("large data ends with a clean failure report") {
    const Problem pb = Problem::build(Domain(16), 24, ModelParams{}, {});
    GenericSmallOptions big;
    big.kinetic = 1e6;
    FixedPointConfig cfg;
    cfg.mode = CouplingMode::monolithic;
    RunOptions opt;
    opt.dt = 0.05;
    bool finite = true;
    const RunResult r = run(generic_small_state(pb, 5, big), 1.0, cfg, pb, opt, [&](const SimState& s, const StepInfo&) {
      finite = finite && s.v.allFinite() && std::isfinite(s.F.max_abs()) && std::isfinite(s.M.max_abs());
    });
    CHECK_FALSE(r.completed);
    CHECK_FALSE(r.failure.empty());
    CHECK(finite);
    CHECK(r.final_state.v.allFinite());
  }
  SUBCASE("fixed-point failure halves tau down to tau_min") {
    const Problem pb = small_problem();
    FixedPointConfig cfg;
    cfg.max_iter = 1;
    cfg.tau = 0.02;
    cfg.tau_min = 0.005;
    RunOptions opt;
    opt.dt = 1e-3;
    const RunResult r = run(generic_small_state(pb, 3), 0.04, cfg, pb, opt);
    CHECK_FALSE(r.completed);
    CHECK(r.tau_halvings >= 2);
    CHECK(r.failure.find("tau") != std::string::npos);
  }
}

TEST_CASE("configuration checks") {
  FixedPointConfig cfg;
  cfg.tau = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(parse_coupling_mode("monolithic") == CouplingMode::monolithic);
  CHECK(to_string(CouplingMode::fixed_point) == "fixed_point");
  CHECK_THROWS_AS(parse_coupling_mode("explicit"), ConfigError);
}
