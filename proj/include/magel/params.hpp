// Constitutive constants, the elastic energy density and external field presets.
#pragma once

#include <Eigen/Dense>

#include <string>

#include "magel/spectral.hpp"

namespace magel {

/// Quadratic elastic energy W(F) = c_e |F|^2. Frame indifferent, W'(0) = 0,
/// strictly convex with constant a = 2 c_e.
struct ElasticLaw {
  double c_e = 0.01;

  double energy(const Eigen::Matrix2d& F) const { return c_e * F.squaredNorm(); }
  Eigen::Matrix2d stress(const Eigen::Matrix2d& F) const { return 2.0 * c_e * F; }  // W'(F)
  /// (W''(Xi) B) . B, independent of Xi for the quadratic law.
  double second_variation(const Eigen::Matrix2d& /*Xi*/, const Eigen::Matrix2d& B) const {
    return 2.0 * c_e * B.squaredNorm();
  }
  double convexity() const { return 2.0 * c_e; }
  double growth_constant() const { return c_e; }        // C1 in C1|F|^2 <= W <= C1(|F|^2+1)
  double derivative_growth() const { return 2.0 * c_e; }  // C2 in |W'(F)| <= C2(|F|+1)
  double hessian_bound() const { return 2.0 * c_e; }      // C3

  void validate() const {
    if (!(c_e > 0)) throw ConfigError("elastic: c_e must be positive");
  }
};

struct ModelParams {
  double nu = 0.1;
  double kappa = 0.1;
  double a_exch = 0.5;
  double mu0 = 1.0;
  double gamma_llg = 1.0;
  double lambda_llg = 1.0;
  ElasticLaw elastic{};

  void validate() const;
  /// gamma = lambda = 1 and 2A = 1: the regime where the expanded LLG form is used.
  bool normalized_llg() const;
};

enum class HextPreset { zero, uniform_constant, uniform_sinusoidal_in_time, spatial_gradient };

HextPreset parse_hext_preset(const std::string& s);
std::string to_string(HextPreset p);

/// Closed-form external field H_ext(x, t) in R^3.
///   uniform_constant:            h0 * direction
///   uniform_sinusoidal_in_time:  h0 sin(omega t) * direction
///   spatial_gradient:            h0 sin(kappa_g . x) * direction, kappa_g = (2 pi / l) wavevector
struct ExternalField {
  HextPreset preset = HextPreset::zero;
  double amplitude = 0.0;
  double omega = 0.0;
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  Eigen::Vector2i wavevector = Eigen::Vector2i(1, 0);

  void validate() const;

  Eigen::Vector3d value(const Eigen::Vector2d& x, double t, double l) const;
  Eigen::Vector3d time_derivative(const Eigen::Vector2d& x, double t, double l) const;
  /// Rows are field components k, columns spatial derivatives a: d_a H_k.
  Eigen::Matrix<double, 3, 2> gradient(const Eigen::Vector2d& x, double t, double l) const;
  bool is_uniform() const { return preset != HextPreset::spatial_gradient; }
  bool is_zero() const { return preset == HextPreset::zero || amplitude == 0.0; }

  /// H_ext sampled on a size x size grid of the domain (three grids).
  RealGridField sample(const Domain& d, double t, int size) const;
  RealGridField sample_time_derivative(const Domain& d, double t, int size) const;

  /// ||H(t)||_{L^1(Omega)} with the pointwise Euclidean norm, closed form.
  double l1_norm(const Domain& d, double t) const;
  /// sup_{[0,T]} ||H(t)||_{L^1}.
  double sup_l1_norm(const Domain& d, double T) const;
  /// int_0^T ||d_t H(t)||_{L^1} dt.
  double dt_l1_l1_norm(const Domain& d, double T) const;
};

}  // namespace magel
