// Constitutive and right-hand-side operators of the magnetoelastic system,
// evaluated pseudospectrally, plus the velocity Galerkin tensors.
//
// Index conventions: (grad v)_ab = d_b v_a; tensor components are stored
// row-major (xx, xy, yx, yy); (div T)_a = sum_b d_b T_ab.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "magel/basis.hpp"
#include "magel/calculus.hpp"
#include "magel/params.hpp"

namespace magel {

enum class ProductDealiasing {
  padding,    // zero-pad to 3n/2 for quadratic, 2n for cubic products
  truncation  // native grid, then two-thirds (quadratic) / half (cubic) masks
};

struct Dealiasing {
  ProductDealiasing mode = ProductDealiasing::padding;

  /// Grid size on which products of the given polynomial order are formed.
  int grid_size(int n, int order) const;
  /// Back to resolved modes, masking when the truncation rules are active.
  SpectralField finish(const Domain& d, Rank r, const RealGridField& grids, int order) const;
};

enum class LlgForm { cross, expanded };

/// Right-hand side split as nonlinear + stiff_coefficient * Laplacian(field),
/// with the energy rates measured on the same samples.
struct SplitRhs {
  SpectralField nonlinear;
  double stiff_coefficient = 0.0;
  double dissipation_rate = 0.0;     // LLG: lambda int |H_eff|^2 - (M.H_eff)^2
  double external_work_rate = 0.0;   // LLG: -mu0 int M . d_t H_ext

  SpectralField total(const SpectralField& field) const;
};

/// H_eff = 2A Lap M + mu0 H_ext.
SpectralField effective_field(const SpectralField& M, const ExternalField& hext, double t, const ModelParams& p);

/// -(v.grad)M - gamma M x H_eff - lambda M x (M x H_eff).
SpectralField llg_rhs_cross(const SpectralField& v, const SpectralField& M, const SpectralField& h_eff,
                            const ModelParams& p, const Dealiasing& dealias = {});

/// Expanded form valid for |M| = 1 with gamma = lambda = 2A = 1:
/// -(v.grad)M - M x (Lap M + H) + |grad M|^2 M + Lap M - M (M.H) + H, with H = mu0 H_ext.
/// The Lap M summand is returned as the stiff part. Throws
/// UnsupportedParameters outside the normalized regime and, when
/// `unit_tolerance` is given, ConstraintViolation if max||M|-1| exceeds it.
SplitRhs llg_rhs_expanded(const SpectralField& v, const SpectralField& M, const ExternalField& hext, double t,
                          const ModelParams& p, const Dealiasing& dealias = {},
                          std::optional<double> unit_tolerance = std::nullopt);

/// Either form, split for integrating-factor stepping. The cross form uses
/// lambda 2A Lap M as its stiff part.
SplitRhs llg_rhs_split(const SpectralField& v, const SpectralField& M, const ExternalField& hext, double t,
                       const ModelParams& p, LlgForm form, const Dealiasing& dealias = {});

/// (grad M (.) grad M)_ij = sum_k d_i M_k d_j M_k.
SpectralField exchange_product(const SpectralField& M, const Dealiasing& dealias = {});

/// W'(F) F^T.
SpectralField elastic_stress(const SpectralField& F, const ModelParams& p, const Dealiasing& dealias = {});

/// T_rev = -2A grad M (.) grad M + W'(F) F^T.
SpectralField magnetoelastic_stress(const SpectralField& M, const SpectralField& F, const ModelParams& p,
                                    const Dealiasing& dealias = {});

/// f_a = mu0 sum_k d_a (H_ext)_k M_k.
SpectralField body_force(const SpectralField& M, const ExternalField& hext, double t, const ModelParams& p,
                         const Dealiasing& dealias = {});

/// -(v.grad)F + grad v F as nonlinear part, kappa Lap F as stiff part.
SplitRhs transport_rhs_F(const SpectralField& v, const SpectralField& F, const ModelParams& p,
                         const Dealiasing& dealias = {});

/// A^i_jk = -int (xi_j . grad) xi_k . xi_i, stored as one m x m matrix per i.
class GalerkinTensors {
 public:
  GalerkinTensors() = default;
  explicit GalerkinTensors(std::vector<Eigen::MatrixXd> slices) : slices_(std::move(slices)) {}

  int size() const { return static_cast<int>(slices_.size()); }
  double operator()(int i, int j, int k) const { return slices_[static_cast<size_t>(i)](j, k); }
  const Eigen::MatrixXd& slice(int i) const { return slices_[static_cast<size_t>(i)]; }
  /// (sum_jk A^i_jk g_j g_k)_i.
  Eigen::VectorXd contract(const Eigen::VectorXd& g) const;

 private:
  std::vector<Eigen::MatrixXd> slices_;
};

/// Dense m^3 assembly by exact grid quadrature. Throws CapacityError when the
/// tensor would exceed `memory_budget_bytes`.
GalerkinTensors assemble_convection_tensor(const VelocityBasis& basis,
                                           std::size_t memory_budget_bytes = std::size_t(1) << 30);

/// D^i = <grad M (.) grad M - W'(F) F^T, grad xi_i> + <(grad H_ext)^T M, xi_i>
/// (with the general constants: 2A in front of the exchange term, mu0 on the force).
Eigen::VectorXd stress_forcing(const SpectralField& F, const SpectralField& M, const ExternalField& hext, double t,
                               const VelocityBasis& basis, const ModelParams& p, const Dealiasing& dealias = {});

/// max | |M(x)| - 1 | over the domain grid.
double unit_norm_drift(const SpectralField& M);

}  // namespace magel
