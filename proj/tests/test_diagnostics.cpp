#include <doctest.h>

#include <cmath>
#include <numbers>

#include "magel/coupler.hpp"
#include "magel/diagnostics.hpp"
#include "magel/initial.hpp"

using namespace magel;

namespace {

constexpr double kPi = std::numbers::pi;
const double kArea = 4 * kPi * kPi;

SimState harmonic_state(const Problem& pb) {
  SimState s = zero_state(pb);
  s.M = sample_field(pb.domain(), Rank::vec3, [](double x, double, double* o) {
    o[0] = std::sin(x);
    o[1] = std::cos(x);
    o[2] = 0.0;
  });
  return s;
}

ExternalField uniform(double h0) {
  ExternalField h;
  h.preset = HextPreset::uniform_constant;
  h.amplitude = h0;
  h.direction = Eigen::Vector3d::UnitZ();
  return h;
}

}  // namespace

TEST_CASE("energy components") {
  const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
  SUBCASE("zero data") {
    const EnergyRow r = energy_components(zero_state(pb), pb);
    CHECK(r.kinetic == 0.0);
    CHECK(r.exchange == 0.0);
    CHECK(r.zeeman == 0.0);
    CHECK(r.elastic == 0.0);
    CHECK(r.total == 0.0);
  }
  SUBCASE("identity deformation") {
    SimState s = zero_state(pb);
    s.F = constant_field(pb.domain(), Rank::tensor2x2, Eigen::Vector4d(1, 0, 0, 1));
    CHECK(energy_components(s, pb).elastic == doctest::Approx(2 * 0.01 * kArea).epsilon(1e-14));
  }
  SUBCASE("harmonic map exchange") {
    CHECK(energy_components(harmonic_state(pb), pb).exchange == doctest::Approx(0.5 * kArea).epsilon(1e-14));
  }
  SUBCASE("Zeeman term and kinetic energy") {
    const Problem ph = Problem::build(Domain(16), 12, ModelParams{}, uniform(2.0));
    SimState s = zero_state(ph);
    s.v(0) = 0.3;
    s.v(5) = -0.4;
    const EnergyRow r = energy_components(s, ph);
    CHECK(r.zeeman == doctest::Approx(-2.0 * kArea).epsilon(1e-14));
    CHECK(r.kinetic == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(r.total == doctest::Approx(r.kinetic + r.exchange + r.zeeman + r.elastic));
  }
}

TEST_CASE("initial energy datum") {
  const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
  CHECK(ied(zero_state(pb), pb, 1.0).total == 0.0);
  SimState s = zero_state(pb);
  s.F = constant_field(pb.domain(), Rank::tensor2x2, Eigen::Vector4d(1, 0, 0, 1));
  const double base = ied(s, pb, 1.0).total;
  CHECK(base == doctest::Approx(0.78957).epsilon(1e-5));
  const Problem ph = Problem::build(Domain(16), 12, ModelParams{}, uniform(0.7));
  const IedReport r = ied(s, ph, 1.0);
  CHECK(r.total - base == doctest::Approx(2 * 0.7 * kArea).epsilon(1e-13));
  CHECK(r.field_rate == 0.0);
  CHECK(r.describe().find("IED") != std::string::npos);
}

TEST_CASE("energy balance residual") {
  SUBCASE("zero data") {
    const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
    std::vector<EnergyRow> rows(5);
    for (int i = 0; i < 5; ++i) {
      SimState s = zero_state(pb);
      s.t = 0.1 * i;
      rows[static_cast<size_t>(i)] = energy_components(s, pb);
    }
    CHECK(energy_balance_residual(rows) == 0.0);
  }
  SUBCASE("closes on a short coupled run, energy nonincreasing") {
    const Problem pb = Problem::build(Domain(32), 24, ModelParams{}, {});
    FixedPointConfig cfg;
    cfg.mode = CouplingMode::monolithic;
    RunOptions opt;
    opt.dt = 1e-3;
    std::vector<EnergyRow> rows;
    run(generic_small_state(pb, 2), 0.05, cfg, pb, opt,
        [&](const SimState& s, const StepInfo&) { rows.push_back(energy_components(s, pb)); });
    const double scale = std::max(1.0, ied(generic_small_state(pb, 2), pb, 0.05).total);
    CHECK(energy_balance_residual(rows) <= 1e-6 * scale);
    for (size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].total <= rows[i - 1].total + 1e-8);
      CHECK(rows[i].viscous >= rows[i - 1].viscous);
      CHECK(rows[i].regularization >= rows[i - 1].regularization);
      CHECK(rows[i].llg >= rows[i - 1].llg - 1e-10);
    }
    // a-priori monitor from the same rows
    const AprioriReport ap = apriori_report(rows, ied(generic_small_state(pb, 2), pb, 0.05).total);
    CHECK_FALSE(ap.any_exceeds);
    for (size_t i = 1; i < ap.rows.size(); ++i) CHECK(ap.rows[i].lap_m_sq_integral >= ap.rows[i - 1].lap_m_sq_integral);
  }
  SUBCASE("detects a broken ledger") {
    std::vector<EnergyRow> rows(4);
    for (int i = 0; i < 4; ++i) {
      rows[static_cast<size_t>(i)].t = 0.1 * i;
      rows[static_cast<size_t>(i)].total = 1.0;
    }
    rows[2].total = 1.1;
    CHECK(energy_balance_residual(rows) > 0.1);
  }
}

TEST_CASE("constraint report") {
  const Problem pb = Problem::build(Domain(32), 24, ModelParams{}, {});
  SimState s = generic_small_state(pb, 6);
  const ConstraintReport r = constraint_report(s, pb.basis);
  CHECK(r.unit_drift <= 1e-12);
  CHECK(r.div_norm <= 1e-12);
  CHECK(r.mean_norm <= 1e-14);
}

TEST_CASE("a-priori monitor on zero data") {
  const Problem pb = Problem::build(Domain(16), 12, ModelParams{}, {});
  std::vector<EnergyRow> rows{energy_components(zero_state(pb), pb)};
  const AprioriReport r = apriori_report(rows, 0.0, 1e-6, 0.5);
  CHECK(r.max_lhs == 0.0);
  CHECK_FALSE(r.any_exceeds);
  CHECK(r.smallness == 0.0);
  rows[0].kinetic = 1.0;
  CHECK(apriori_report(rows, 0.5).any_exceeds);
}

TEST_CASE("inequality ratios") {
  const Domain d(16);
  SUBCASE("constant field skips the gradient forms") {
    const auto r = inequality_ratios(constant_field(d, Rank::vec3, Eigen::Vector3d(1, 2, 3)));
    CHECK_FALSE(r[static_cast<size_t>(Inequality::ladyzhenskaya)].has_value());
    CHECK_FALSE(r[static_cast<size_t>(Inequality::agmon)].has_value());
    CHECK_FALSE(r[static_cast<size_t>(Inequality::laplacian_l4)].has_value());
    CHECK(r[static_cast<size_t>(Inequality::w22_bound)].value() == doctest::Approx(1.0));
  }
  SUBCASE("sin x in closed form") {
    SpectralField f(d, Rank::vec3);
    f[0](1, 0) = std::complex<double>(0, -0.5);
    f[0](d.n - 1, 0) = std::complex<double>(0, 0.5);
    const auto r = inequality_ratios(f);
    const double l4 = std::pow(3.0 / 8.0 * kArea, 0.25), l2 = std::sqrt(kArea / 2);
    CHECK(r[static_cast<size_t>(Inequality::ladyzhenskaya)].value() == doctest::Approx(l4 / (2 * l2)).epsilon(1e-12));
    // grad f = (cos x, 0): same norms, so the L4 root form is l4 / (l2^1/2 (2 l2^2)^1/4)
    CHECK(r[static_cast<size_t>(Inequality::gradient_l4_root)].value() ==
          doctest::Approx(l4 / (std::sqrt(l2) * std::pow(2 * l2 * l2, 0.25))).epsilon(1e-12));
    // sup |cos x| = 1
    CHECK(r[static_cast<size_t>(Inequality::agmon)].value() ==
          doctest::Approx(1.0 / (std::sqrt(l2) * std::pow(3 * l2 * l2, 0.25))).epsilon(1e-12));
  }
  SUBCASE("grid doubling and scaling") {
    const auto sample = inequality_sample(d, 10, 21);
    for (const auto& f : sample) {
      SpectralField fine(Domain(32), Rank::vec3);
      for (int c = 0; c < 3; ++c) fine[c] = resize_spectrum(f[c], 32);
      const auto a = inequality_ratios(f), b = inequality_ratios(fine), s = inequality_ratios(10.0 * f);
      for (int q = 0; q < kInequalityCount; ++q) {
        const auto& x = a[static_cast<size_t>(q)];
        REQUIRE(x.has_value());
        CHECK(std::abs(*b[static_cast<size_t>(q)] - *x) < 0.01 * *x);
        CHECK(std::abs(*s[static_cast<size_t>(q)] - *x) < 1e-12 * *x);
      }
    }
  }
  SUBCASE("report bookkeeping") {
    const RatioReport r = inequality_ratio_report(inequality_sample(d, 5, 1));
    for (int q = 0; q < kInequalityCount; ++q) {
      CHECK(r.evaluated[static_cast<size_t>(q)] == 5);
      CHECK(r.max_ratio[static_cast<size_t>(q)] > 0.0);
    }
    CHECK(to_string(Inequality::agmon) == "agmon");
  }
}

TEST_CASE("sup norm of trigonometric polynomials") {
  const Domain d(16);
  SpectralField f(d, Rank::scalar);
  // cos(x) + cos(y) + 0.1 sin(3x + y): maximum near the origin, found off-grid
  f[0](1, 0) = f[0](d.n - 1, 0) = 0.5;
  f[0](0, 1) = f[0](0, d.n - 1) = 0.5;
  f[0](3, 1) = std::complex<double>(0, -0.05);
  f[0](d.n - 3, d.n - 1) = std::complex<double>(0, 0.05);
  double best = 0.0;
  const int fine = 2048;
  for (int j = 0; j < fine; ++j) {
    const double y = 2 * kPi * j / fine;
    for (int i = 0; i < fine; ++i) {
      const double x = 2 * kPi * i / fine;
      best = std::max(best, std::abs(std::cos(x) + std::cos(y) + 0.1 * std::sin(3 * x + y)));
    }
  }
  CHECK(sup_norm(f) >= best - 1e-12);
  CHECK(sup_norm(f) <= best + 1e-5);
}
