// Galerkin bases on the torus. On the flat torus the Stokes, Laplace and
// bi-Laplace-plus-identity eigenfunctions are all real Fourier modes, so the
// bases below are closed-form lists of (wavevector, phase) pairs.
#pragma once

#include <Eigen/Dense>

#include <vector>

#include "magel/spectral.hpp"

namespace magel {

enum class Phase { cosine, sine };

/// One divergence-free velocity eigenmode
/// xi(x) = sqrt(2/|Omega|) e_perp(k) {cos|sin}(kappa.x), e_perp = (-k_y, k_x)/|k|.
struct VelocityMode {
  Eigen::Vector2i k;
  Phase phase;
  Eigen::Vector2d polarization;
  double eigenvalue;  // |kappa|^2
};

/// The first m Stokes eigenmodes ordered by |k|^2, ties broken by
/// (k_x, k_y, cosine before sine). The mean mode is excluded.
class VelocityBasis {
 public:
  VelocityBasis() = default;
  VelocityBasis(const Domain& d, int m);

  const Domain& domain() const { return domain_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const VelocityMode& mode(int i) const { return modes_[static_cast<size_t>(i)]; }
  const std::vector<VelocityMode>& modes() const { return modes_; }
  Eigen::VectorXd eigenvalues() const;
  /// Largest |k_a| over all modes.
  int max_wavenumber() const;

  /// Number of modes resolvable on an n-point grid (below Nyquist).
  static int capacity(int n);

  /// Spectral coefficients of sum_i g_i xi_i.
  SpectralField synthesize(const Eigen::VectorXd& g) const;
  /// Coefficients <u, xi_i>.
  Eigen::VectorXd project(const SpectralField& u) const;
  /// Mode i sampled on a size x size grid.
  RealGridField sample(int i, int size) const;
  /// Gradient of mode i sampled on a grid, ordered (d_x xi_x, d_y xi_x, d_x xi_y, d_y xi_y).
  RealGridField sample_gradient(int i, int size) const;
  /// Spectral coefficients of mode i alone.
  SpectralField mode_field(int i) const;

 private:
  Domain domain_{};
  std::vector<VelocityMode> modes_;
};

enum class ScalarBasisKind {
  laplace,                // eigenvalues |kappa|^2, used for F
  bilaplace_plus_identity // eigenvalues |kappa|^4 + 1, used for M
};

struct ScalarMode {
  Eigen::Vector2i k;
  Phase phase;
  double eigenvalue;
};

/// Real scalar Fourier modes (constant mode first) ordered by eigenvalue.
class ScalarBasis {
 public:
  ScalarBasis(const Domain& d, ScalarBasisKind kind, int count);

  ScalarBasisKind kind() const { return kind_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const ScalarMode& mode(int i) const { return modes_[static_cast<size_t>(i)]; }
  SpectralField mode_field(int i) const;
  /// Eigenvalue per spectral array index, for integrating factors.
  RealGrid eigenvalue_grid() const;

 private:
  Domain domain_;
  ScalarBasisKind kind_;
  std::vector<ScalarMode> modes_;
};

}  // namespace magel
