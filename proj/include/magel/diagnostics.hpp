// Energy ledger, the IED smallness quantity, constraint and a-priori
// monitors, and measured ratios of the interpolation inequalities.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "magel/state.hpp"

namespace magel {

struct EnergyRow {
  double t = 0.0;
  double kinetic = 0.0;   // 1/2 int |v|^2
  double exchange = 0.0;  // A int |grad M|^2
  double zeeman = 0.0;    // -mu0 int M . H_ext
  double elastic = 0.0;   // int W(F)
  double total = 0.0;
  double viscous = 0.0;         // cumulative
  double regularization = 0.0;  // cumulative
  double llg = 0.0;             // cumulative
  double external_work = 0.0;   // cumulative
  double balance_residual = 0.0;
  double m_drift = 0.0;
  double div_norm = 0.0;
  int fp_iterations = 0;
  double grad_m_sq = 0.0;  // int |grad M|^2
  double lap_m_sq = 0.0;   // int |Lap M|^2

  /// total + dissipations - external work: constant along exact dynamics.
  double conserved() const { return total + viscous + regularization + llg - external_work; }
};

/// Energy terms of one state (balance residual left at 0).
EnergyRow energy_components(const SimState& s, const Problem& pb);

struct IedReport {
  double kinetic = 0.0;   // 1/2 int |v0|^2
  double exchange = 0.0;  // 1/2 int |grad M0|^2
  double elastic = 0.0;   // int W(F0)
  double field = 0.0;     // 2 sup_t ||H_ext||_L1
  double field_rate = 0.0;  // int_0^T ||d_t H_ext||_L1
  double total = 0.0;

  std::string describe() const;
};

IedReport ied(const SimState& s0, const Problem& pb, double horizon);

/// Centered differences (one-sided at the ends) of the conserved ledger
/// quantity on uniformly spaced rows; writes balance_residual in place and
/// returns max |residual|.
double energy_balance_residual(std::vector<EnergyRow>& rows);

struct ConstraintReport {
  double unit_drift = 0.0;  // max | |M| - 1 |
  double div_norm = 0.0;    // || div v ||_inf
  double mean_norm = 0.0;   // | mean v |
};

ConstraintReport constraint_report(const SimState& s, const VelocityBasis& basis);

struct AprioriRow {
  double t = 0.0;
  double lhs = 0.0;        // 1/2|v|^2 + 1/2|grad M|^2 + W(F) + int kappa a |grad F|^2 + nu |grad v|^2
  bool exceeds = false;    // lhs > IED + tolerance
  double lap_m = 0.0;      // ||Lap M(t)||
  double lap_m_sq_integral = 0.0;  // int_0^t ||Lap M||^2
};

struct AprioriReport {
  std::vector<AprioriRow> rows;
  double ied = 0.0;
  double max_lhs = 0.0;
  bool any_exceeds = false;
  double measured_constant = 0.0;  // measured C~ from the inequality sample, if supplied
  double smallness = 0.0;          // measured C~ * IED (informational)
};

AprioriReport apriori_report(const std::vector<EnergyRow>& rows, double ied, double tolerance = 1e-6,
                             double measured_constant = 0.0);

enum class Inequality {
  ladyzhenskaya,     // ||f||_4 vs ||f|| + ||grad f||^1/2 ||f||^1/2
  gradient_l4,       // ||grad M||_4^4 vs ||grad M||^4 + ||grad^2 M||^2 ||grad M||^2
  w22_bound,         // ||M||_{W2,2} vs (||M||^2 + ||Lap M||^2)^1/2
  gradient_l4_root,  // ||grad M||_4 vs ||grad M||^1/2 (||grad M||^2 + ||Lap M||^2)^1/4
  gradient_l6,       // ||grad M||_6 vs ||grad M||^1/3 (||grad M||^2 + ||Lap M||^2)^1/3
  agmon,             // ||grad M||_inf vs ||grad M||^1/2 (||grad M||^2 + ||Lap M||^2 + ||grad Lap M||^2)^1/4
  laplacian_l4       // ||Lap M||_4 vs ||Lap M||^1/2 (||Lap M||^2 + ||grad Lap M||^2)^1/4
};

constexpr int kInequalityCount = 7;
std::string to_string(Inequality q);

/// LHS / RHS (constant 1) of every inequality for one field; empty where the
/// right-hand side vanishes.
std::array<std::optional<double>, kInequalityCount> inequality_ratios(const SpectralField& f);

struct RatioReport {
  std::array<double, kInequalityCount> max_ratio{};
  std::array<int, kInequalityCount> evaluated{};
};

RatioReport inequality_ratio_report(const std::vector<SpectralField>& fields);

/// Seeded band-limited vec3 sample used for the ratio reports.
std::vector<SpectralField> inequality_sample(const Domain& d, int count, std::uint64_t seed, int kmax = 4);

/// Max of sqrt(sum_c g_c(x)^2) over the torus for a trigonometric polynomial,
/// located on an upsampled grid and refined by local zooming.
double sup_norm(const SpectralField& f);
/// Same with the pointwise norm taken over all components of all parts.
double sup_norm(const std::vector<SpectralField>& parts);

}  // namespace magel
