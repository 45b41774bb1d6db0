// Discrete vector calculus on spectral fields: derivatives, Leray
// projection, L2 pairing and dealiasing masks. All operations are exact on
// trigonometric polynomials below the Nyquist mode.
#pragma once

#include "magel/spectral.hpp"

namespace magel {

/// kappa_axis per array index; zero on the Nyquist index so that odd
/// derivatives of real fields stay real.
template <typename Scalar>
Grid<Scalar> derivative_symbol(const BasicDomain<Scalar>& d, int axis) {
  Grid<Scalar> s(d.n, d.n);
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) {
      const int p = axis == 0 ? i : j;
      s(i, j) = (p == d.n / 2) ? Scalar(0) : d.kscale() * Scalar(d.wavenumber(p));
    }
  return s;
}

/// |kappa|^2 per array index (Nyquist included).
template <typename Scalar>
Grid<Scalar> laplace_symbol(const BasicDomain<Scalar>& d) {
  Grid<Scalar> s(d.n, d.n);
  const Scalar ks = d.kscale();
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) {
      const Scalar kx = ks * Scalar(d.wavenumber(i)), ky = ks * Scalar(d.wavenumber(j));
      s(i, j) = kx * kx + ky * ky;
    }
  return s;
}

/// Componentwise partial derivative along `axis` (0 = x, 1 = y).
template <typename Scalar>
BasicSpectralField<Scalar> partial(const BasicSpectralField<Scalar>& f, int axis) {
  const SpectralGrid<Scalar> sym = derivative_symbol(f.domain(), axis).template cast<std::complex<Scalar>>();
  const std::complex<Scalar> I(0, 1);
  BasicSpectralField<Scalar> out(f.domain(), f.rank());
  for (int c = 0; c < f.components(); ++c) out[c] = I * sym * f[c];
  return out;
}

template <typename Scalar>
BasicSpectralField<Scalar> gradient(const BasicSpectralField<Scalar>& f) {
  if (f.rank() != Rank::scalar) throw ShapeError("gradient: expects a scalar field");
  BasicSpectralField<Scalar> g(f.domain(), Rank::vec2);
  g[0] = partial(f, 0)[0];
  g[1] = partial(f, 1)[0];
  return g;
}

/// Divergence of a vec2 field (scalar result) or row divergence of a 2x2
/// tensor, (div T)_a = sum_b d_b T_ab (vec2 result).
template <typename Scalar>
BasicSpectralField<Scalar> divergence(const BasicSpectralField<Scalar>& u) {
  const SpectralGrid<Scalar> sx = derivative_symbol(u.domain(), 0).template cast<std::complex<Scalar>>();
  const SpectralGrid<Scalar> sy = derivative_symbol(u.domain(), 1).template cast<std::complex<Scalar>>();
  const std::complex<Scalar> I(0, 1);
  if (u.rank() == Rank::vec2) {
    BasicSpectralField<Scalar> d(u.domain(), Rank::scalar);
    d[0] = I * (sx * u[0] + sy * u[1]);
    return d;
  }
  if (u.rank() == Rank::tensor2x2) {
    BasicSpectralField<Scalar> d(u.domain(), Rank::vec2);
    d[0] = I * (sx * u[0] + sy * u[1]);
    d[1] = I * (sx * u[2] + sy * u[3]);
    return d;
  }
  throw ShapeError("divergence: expects vec2 or tensor2x2, got " + to_string(u.rank()));
}

template <typename Scalar>
BasicSpectralField<Scalar> laplacian(const BasicSpectralField<Scalar>& f) {
  const SpectralGrid<Scalar> sym = laplace_symbol(f.domain()).template cast<std::complex<Scalar>>();
  BasicSpectralField<Scalar> out(f.domain(), f.rank());
  for (int c = 0; c < f.components(); ++c) out[c] = -sym * f[c];
  return out;
}

/// Orthogonal projection onto divergence-free fields, mode by mode:
/// u(k) -> u(k) - k (k.u(k)) / |k|^2. The mean mode is left untouched and
/// Nyquist lines are removed.
template <typename Scalar>
BasicSpectralField<Scalar> leray_project(const BasicSpectralField<Scalar>& u) {
  if (u.rank() != Rank::vec2) throw ShapeError("leray_project: expects vec2");
  const auto& d = u.domain();
  BasicSpectralField<Scalar> out(d, Rank::vec2);
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i) {
      if (i == d.n / 2 || j == d.n / 2) continue;
      const Scalar kx = Scalar(d.wavenumber(i)), ky = Scalar(d.wavenumber(j));
      const Scalar k2 = kx * kx + ky * ky;
      if (k2 == 0) {
        out[0](i, j) = u[0](i, j);
        out[1](i, j) = u[1](i, j);
        continue;
      }
      const std::complex<Scalar> dot = kx * u[0](i, j) + ky * u[1](i, j);
      out[0](i, j) = u[0](i, j) - kx * dot / k2;
      out[1](i, j) = u[1](i, j) - ky * dot / k2;
    }
  return out;
}

/// L2 pairing via Parseval: |Omega| sum_c sum_k Re(a_c(k) conj(b_c(k))).
template <typename Scalar>
Scalar l2_inner(const BasicSpectralField<Scalar>& a, const BasicSpectralField<Scalar>& b) {
  if (a.rank() != b.rank()) throw ShapeError("l2_inner: rank mismatch " + to_string(a.rank()) + " vs " + to_string(b.rank()));
  if (!(a.domain() == b.domain())) throw ShapeError("l2_inner: domain mismatch");
  Scalar s = 0;
  for (int c = 0; c < a.components(); ++c) s += (a[c] * b[c].conjugate()).real().sum();
  return s * a.domain().area();
}

template <typename Scalar>
Scalar l2_norm_sq(const BasicSpectralField<Scalar>& a) {
  return l2_inner(a, a);
}

/// Grid quadrature of the L2 pairing (rectangle rule, spectrally accurate
/// on the torus).
template <typename Scalar>
Scalar l2_inner_grid(const GridField<Scalar>& a, const GridField<Scalar>& b, Scalar area) {
  if (a.size() != b.size()) throw ShapeError("l2_inner_grid: component mismatch");
  Scalar s = 0;
  for (size_t c = 0; c < a.size(); ++c) {
    if (a[c].rows() != b[c].rows() || a[c].cols() != b[c].cols()) throw ShapeError("l2_inner_grid: grid mismatch");
    s += (a[c] * b[c]).sum();
  }
  return a.empty() ? Scalar(0) : s * area / Scalar(a[0].size());
}

enum class DealiasRule { two_thirds, half };

/// Per-axis cutoff: modes with |k_a| >= n/3 (two-thirds) or n/4 (half) are zeroed.
template <typename Scalar>
BasicSpectralField<Scalar> dealias(const BasicSpectralField<Scalar>& f, DealiasRule rule) {
  const auto& d = f.domain();
  const double cut = rule == DealiasRule::two_thirds ? d.n / 3.0 : d.n / 4.0;
  BasicSpectralField<Scalar> out = f;
  for (int j = 0; j < d.n; ++j)
    for (int i = 0; i < d.n; ++i)
      if (std::abs(d.wavenumber(i)) >= cut || std::abs(d.wavenumber(j)) >= cut)
        for (int c = 0; c < out.components(); ++c) out[c](i, j) = 0;
  return out;
}

/// Spatial mean of each component (the zero-mode coefficient).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean(const BasicSpectralField<Scalar>& f) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m(f.components());
  for (int c = 0; c < f.components(); ++c) m(c) = f[c](0, 0).real();
  return m;
}

}  // namespace magel
