#include <doctest.h>

#include <random>

#include "magel/basis.hpp"
#include "magel/calculus.hpp"
#include "magel/initial.hpp"
#include "test_util.hpp"

using namespace magel;
using magel::testing::grid_diff;
using magel::testing::max_abs;
using magel::testing::max_diff;

TEST_CASE("projecting a basis mode gives a unit vector") {
  const VelocityBasis b(Domain(16), 24);
  const Eigen::VectorXd g = b.project(b.mode_field(2));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(24);
  e(2) = 1.0;
  CHECK((g - e).norm() < 1e-14);
}

TEST_CASE("gradient fields have no velocity coefficients") {
  const Domain d(16);
  const VelocityBasis b(d, 40);
  std::mt19937_64 rng(1);
  const SpectralField phi = random_field(d, Rank::scalar, 7, rng);
  CHECK(b.project(gradient(phi)).norm() < 1e-13);
}

TEST_CASE("full basis reconstructs divergence-free fields") {
  const Domain d(16);
  const VelocityBasis b(d, VelocityBasis::capacity(d.n));
  std::mt19937_64 rng(2);
  const SpectralField u = leray_project(random_field(d, Rank::vec2, 7, rng));
  SpectralField zero_mean = u;
  zero_mean[0](0, 0) = zero_mean[1](0, 0) = 0.0;
  CHECK(grid_diff(b.synthesize(b.project(u)), zero_mean) < 1e-12);
}

TEST_CASE("velocity basis is orthonormal") {
  const Domain d(16);
  const VelocityBasis b(d, 60);
  Eigen::MatrixXd gram(b.size(), b.size());
  for (int i = 0; i < b.size(); ++i)
    for (int j = 0; j < b.size(); ++j) gram(i, j) = l2_inner(b.mode_field(i), b.mode_field(j));
  CHECK((gram - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("modes are divergence free with the documented shape") {
  const Domain d(16, 3.0);
  const VelocityBasis b(d, 30);
  for (int i = 0; i < b.size(); ++i) {
    const SpectralField xi = b.mode_field(i);
    CHECK(max_abs(backward(divergence(xi))) < 1e-12);
    CHECK(max_diff(b.sample(i, d.n), backward(xi)) < 1e-13);
    const SpectralField gx = partial(xi, 0), gy = partial(xi, 1);
    const RealGridField grad = b.sample_gradient(i, d.n);
    CHECK(max_diff({grad[0], grad[2]}, backward(gx)) < 1e-12);
    CHECK(max_diff({grad[1], grad[3]}, backward(gy)) < 1e-12);
    // Stokes eigenfunction: -Lap xi = lambda xi
    CHECK(grid_diff(laplacian(xi), -b.mode(i).eigenvalue * xi) < 1e-12);
  }
}

TEST_CASE("eigenvalues are ordered with deterministic ties") {
  const VelocityBasis b(Domain(32), 200);
  for (int i = 1; i < b.size(); ++i) {
    const auto& p = b.mode(i - 1);
    const auto& q = b.mode(i);
    const int kp = p.k.squaredNorm(), kq = q.k.squaredNorm();
    CHECK(kp <= kq);
    if (kp == kq) {
      const auto a = std::make_tuple(p.k.x(), p.k.y(), static_cast<int>(p.phase));
      const auto c = std::make_tuple(q.k.x(), q.k.y(), static_cast<int>(q.phase));
      CHECK(a < c);
    }
  }
  // the first shell |k|^2 = 1 holds (0,1) and (1,0) with both phases
  CHECK(b.mode(0).k == Eigen::Vector2i(0, 1));
  CHECK(b.mode(0).phase == Phase::cosine);
  CHECK(b.mode(3).k == Eigen::Vector2i(1, 0));
  CHECK(b.mode(0).eigenvalue == 1.0);
  CHECK(b.mode(4).eigenvalue == 2.0);
}

TEST_CASE("basis size limits") {
  CHECK_THROWS_AS(VelocityBasis(Domain(8), 0), ConfigError);
  CHECK_THROWS_AS(VelocityBasis(Domain(8), VelocityBasis::capacity(8) + 1), ConfigError);
  CHECK_NOTHROW(VelocityBasis(Domain(8), VelocityBasis::capacity(8)));
  CHECK(VelocityBasis(Domain(32), 24).max_wavenumber() <= 3);
}

TEST_CASE("scalar bases") {
  const Domain d(16);
  const ScalarBasis lap(d, ScalarBasisKind::laplace, 30);
  const ScalarBasis bil(d, ScalarBasisKind::bilaplace_plus_identity, 30);
  CHECK(lap.mode(0).k == Eigen::Vector2i(0, 0));
  CHECK(lap.mode(0).eigenvalue == 0.0);
  CHECK(bil.mode(0).eigenvalue == 1.0);
  for (int i = 1; i < lap.size(); ++i) {
    CHECK(lap.mode(i - 1).k.squaredNorm() <= lap.mode(i).k.squaredNorm());
    CHECK(bil.mode(i - 1).eigenvalue <= bil.mode(i).eigenvalue);
  }
  for (int i = 0; i < lap.size(); ++i) {
    const SpectralField e = lap.mode_field(i);
    CHECK(l2_norm_sq(e) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(grid_diff(laplacian(e), -lap.mode(i).eigenvalue * e) < 1e-12);
    const SpectralField f = bil.mode_field(i);
    CHECK(grid_diff(laplacian(laplacian(f)) + f, bil.mode(i).eigenvalue * f) < 1e-11);
  }
  const RealGrid ev = lap.eigenvalue_grid();
  CHECK(ev(d.index(2), d.index(-1)) == doctest::Approx(5.0));
}
