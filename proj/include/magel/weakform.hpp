// Residuals of the time-integrated weak formulations of the momentum,
// deformation-gradient and LLG equations against separable test functions
// phi(x, t) = phi1(t) phi2(x), evaluated on a sampled trajectory.
//
// Space integrals use grid quadrature on a 2n grid, exact for the products
// involved; time integrals use the trapezoid rule with phi1 piecewise linear
// and kinked only on samples, so d_t phi1 is exact.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "magel/state.hpp"

namespace magel {

enum class TimeProfile { ramp_down, hat, smoothed_step };

std::string to_string(TimeProfile p);

/// phi1 on `samples` uniformly spaced points; phi1 vanishes at the last one.
std::vector<double> profile_values(TimeProfile p, int samples);

enum class WeakEquation { momentum, deformation, magnetization };

std::string to_string(WeakEquation e);

struct TestFunction {
  std::vector<double> phi1;  // values on the trajectory samples
  SpectralField phi2;        // vec2 (divergence free), tensor2x2 or vec3

  static TestFunction separable(TimeProfile p, int samples, SpectralField space);
  double norm() const;  // ||phi2||_L2 * max |phi1|
};

/// Signed residual LHS - RHS; the weak form holds when it vanishes. The
/// trajectory must be uniformly spaced and start at the initial data.
double residual_momentum(const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb);
double residual_F(const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb);
double residual_M(const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb);

/// Seeded spatial parts: momentum tests are unit combinations of velocity
/// basis modes; F and M tests are unit band-limited fields with |k_a| <= 3.
struct TestBattery {
  std::uint64_t seed = 0;
  std::vector<SpectralField> momentum;
  std::vector<SpectralField> deformation;
  std::vector<SpectralField> magnetization;
};

TestBattery make_battery(const Problem& pb, int count = 20, std::uint64_t seed = 2024);

struct WeakResidual {
  WeakEquation equation = WeakEquation::momentum;
  int test = 0;
  TimeProfile profile = TimeProfile::ramp_down;
  double value = 0.0;  // |residual| / test-function norm
};

struct WeakFormReport {
  std::vector<WeakResidual> residuals;
  double max_momentum = 0.0;
  double max_deformation = 0.0;
  double max_magnetization = 0.0;
  int samples = 0;

  double max() const { return std::max(max_momentum, std::max(max_deformation, max_magnetization)); }
  double max_of(WeakEquation e) const;
  /// Sum of normalized residuals of one equation over the whole battery.
  double total_of(WeakEquation e) const;
};

/// Streams trajectory samples and accumulates the spatial pairings of every
/// battery member, so that trajectories need not be held in memory.
class WeakFormAccumulator {
 public:
  WeakFormAccumulator(const Problem& pb, TestBattery battery);

  /// Samples must be added in time order with uniform spacing.
  void add(const SimState& s);
  int samples() const { return static_cast<int>(times_.size()); }
  /// Residuals for the battery times the three temporal profiles.
  WeakFormReport finish() const;

 private:
  const Problem* pb_;
  TestBattery battery_;
  std::vector<double> times_;
  // [equation][test] -> per-sample pairings with phi2 (a) and the spatial operator (b)
  std::vector<std::vector<std::vector<double>>> a_, b_;
  std::vector<std::vector<RealGridField>> test_grids_, test_gradients_;
};

WeakFormReport certify(const std::vector<SimState>& traj, const Problem& pb, const TestBattery& battery);

/// Adds `amplitude` times a seeded unit perturbation to v, F and M of sample `index`.
void corrupt_sample(std::vector<SimState>& traj, int index, double amplitude, std::uint64_t seed = 99);

}  // namespace magel
