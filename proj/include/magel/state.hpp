// Simulation state, sampled trajectories and the bundle of fixed model data.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "magel/basis.hpp"
#include "magel/params.hpp"
#include "magel/physics.hpp"

namespace magel {

/// Time integrals of the dissipation and work rates, integrated alongside the state.
struct Accumulators {
  double viscous = 0.0;         // nu int int |grad v|^2
  double regularization = 0.0;  // kappa int int W''[grad F, grad F]
  double llg = 0.0;             // int int |H_eff|^2 - (M.H_eff)^2 (lambda-weighted)
  double external_work = 0.0;   // -mu0 int int M . d_t H_ext
};

struct SimState {
  double t = 0.0;
  Eigen::VectorXd v;  // velocity basis coefficients
  SpectralField F;    // tensor2x2
  SpectralField M;    // vec3
  Accumulators acc{};

  const Domain& domain() const { return M.domain(); }
  double unit_norm_drift() const { return magel::unit_norm_drift(M); }
  /// Throws DivergedError on NaN or any coefficient above 1e12.
  void check_finite(double last_valid_time) const;
};

/// Uniformly sampled coefficient vectors on [t0, t0 + (size-1) dt].
class CoeffTrajectory {
 public:
  CoeffTrajectory() = default;
  CoeffTrajectory(double t0, double dt, std::vector<Eigen::VectorXd> samples);
  static CoeffTrajectory constant(double t0, double dt, int steps, const Eigen::VectorXd& g);

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double t1() const { return time(size() - 1); }
  int size() const { return static_cast<int>(samples_.size()); }
  int steps() const { return size() - 1; }
  int dimension() const { return samples_.empty() ? 0 : static_cast<int>(samples_.front().size()); }
  double time(int i) const { return t0_ + i * dt_; }
  const Eigen::VectorXd& operator[](int i) const { return samples_[static_cast<size_t>(i)]; }
  Eigen::VectorXd& operator[](int i) { return samples_[static_cast<size_t>(i)]; }
  const std::vector<Eigen::VectorXd>& samples() const { return samples_; }

  /// Linear interpolation between samples; clamped outside the window.
  Eigen::VectorXd at(double t) const;
  /// sup over samples of sum_i |a_i - b_i|^2.
  double sup_sq_distance(const CoeffTrajectory& o) const;
  /// sup over samples of the Euclidean norm.
  double sup_norm() const;

 private:
  double t0_ = 0.0;
  double dt_ = 1.0;
  std::vector<Eigen::VectorXd> samples_;
};

/// Uniformly sampled spectral fields with cumulative rate integrals per sample.
struct FieldTrajectory {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<SpectralField> samples;
  std::vector<double> dissipation;    // cumulative, starting at 0
  std::vector<double> external_work;  // cumulative, starting at 0 (M only)
  double max_unit_drift = 0.0;        // M only

  int size() const { return static_cast<int>(samples.size()); }
  double time(int i) const { return t0 + i * dt; }
  SpectralField at(double t) const;
};

/// Fixed data of one simulation: basis, convection tensor, constants, forcing
/// and the numerical choices shared by every solver.
struct Problem {
  VelocityBasis basis;
  GalerkinTensors tensors;
  ModelParams params;
  ExternalField hext;
  LlgForm llg_form = LlgForm::expanded;
  Dealiasing dealias{};

  const Domain& domain() const { return basis.domain(); }

  /// Expanded form in the normalized regime, cross form otherwise, unless forced.
  static Problem build(const Domain& d, int m, const ModelParams& p, const ExternalField& h,
                       std::optional<LlgForm> form = std::nullopt, Dealiasing dealias = {});
};

}  // namespace magel
