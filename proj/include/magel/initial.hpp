// Initial data presets and seeded random band-limited fields.
#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "magel/state.hpp"

namespace magel {

/// Real trigonometric polynomial with random modes |k_a| <= kmax (mean
/// included when `with_mean`), scaled to RMS `amplitude` per component.
SpectralField random_field(const Domain& d, Rank r, int kmax, std::mt19937_64& rng, double amplitude = 1.0,
                           bool with_mean = false);

/// Resolved modes of a function sampled on a 2n grid (Nyquist and above dropped).
SpectralField sample_field(const Domain& d, Rank r, const std::function<void(double x, double y, double* out)>& f);

/// Pointwise normalization of e3 + perturbation, sampled on a 2n grid.
SpectralField unit_field(const Domain& d, const SpectralField& perturbation, const Eigen::Vector3d& base);

/// Random unit magnetization: normalize(base + random band-limited perturbation).
SpectralField random_unit_field(const Domain& d, int kmax, std::mt19937_64& rng, double perturbation,
                                const Eigen::Vector3d& base = Eigen::Vector3d::UnitZ());

SpectralField constant_field(const Domain& d, Rank r, const Eigen::VectorXd& value);

/// v = 0, F = 0, M = e3.
SimState zero_state(const Problem& pb);

/// v0 = U (sin x cos y, -cos x sin y) (in units of the box wavenumber), F = 0, M = e3.
SimState taylor_green_state(const Problem& pb, double amplitude = 1.0);

struct GenericSmallOptions {
  double kinetic = 0.05;      // 1/2 |g|^2
  int velocity_modes = 8;     // leading basis modes carrying energy
  double m_perturbation = 0.1;
  double f_perturbation = 0.05;
  int m_kmax = 1;
  int f_kmax = 2;
};

/// Seeded small data: random low velocity modes, F = I + small smooth
/// perturbation, M = normalize(e3 + small smooth perturbation).
SimState generic_small_state(const Problem& pb, std::uint64_t seed, const GenericSmallOptions& opt = {});

}  // namespace magel
