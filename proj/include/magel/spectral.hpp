// Periodic-box domain, spectral coefficient fields and 2D transforms.
//
// Coefficient convention: a real field f on the box [0,l)^2 sampled on an
// n x n grid is represented as f(x) = sum_k fhat(k) exp(i kappa.x) with
// kappa = (2 pi / l) k. Arrays are indexed (ix, iy); index p maps to the
// integer wavenumber p for p <= n/2 and p - n otherwise. Coefficients do not
// depend on the grid size, which is what makes zero-padding trivial.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "magel/error.hpp"

namespace magel {

template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SpectralGrid = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

enum class Rank { scalar, vec2, tensor2x2, vec3 };

constexpr int component_count(Rank r) {
  switch (r) {
    case Rank::scalar: return 1;
    case Rank::vec2: return 2;
    case Rank::tensor2x2: return 4;
    case Rank::vec3: return 3;
  }
  return 0;
}

inline std::string to_string(Rank r) {
  switch (r) {
    case Rank::scalar: return "scalar";
    case Rank::vec2: return "vec2";
    case Rank::tensor2x2: return "tensor2x2";
    case Rank::vec3: return "vec3";
  }
  return "?";
}

/// Flat 2D torus [0,l)^2 with n grid points per axis.
template <typename Scalar>
struct BasicDomain {
  int n = 32;
  Scalar l = Scalar(2) * std::numbers::pi_v<Scalar>;

  BasicDomain() = default;
  BasicDomain(int n_, Scalar l_ = Scalar(2) * std::numbers::pi_v<Scalar>) : n(n_), l(l_) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw ConfigError("domain: n must be a power of two >= 8, got " + std::to_string(n));
    if (!(l > 0)) throw ConfigError("domain: l must be positive");
  }

  Scalar kscale() const { return Scalar(2) * std::numbers::pi_v<Scalar> / l; }
  Scalar area() const { return l * l; }
  Scalar spacing() const { return l / Scalar(n); }
  /// Integer wavenumber of array index p on a grid of size `size`.
  static int wavenumber(int p, int size) { return p <= size / 2 ? p : p - size; }
  int wavenumber(int p) const { return wavenumber(p, n); }
  /// Array index of integer wavenumber k (|k| <= n/2).
  int index(int k) const { return k >= 0 ? k : k + n; }

  friend bool operator==(const BasicDomain& a, const BasicDomain& b) { return a.n == b.n && a.l == b.l; }
};

template <typename Scalar>
Grid<Scalar> coordinate_grid(const BasicDomain<Scalar>& d, int axis, int size) {
  Grid<Scalar> g(size, size);
  const Scalar h = d.l / Scalar(size);
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) g(i, j) = Scalar(axis == 0 ? i : j) * h;
  return g;
}

namespace detail {

template <typename Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine = [] {
    Eigen::FFT<Scalar> e;
    e.SetFlag(Eigen::FFT<Scalar>::Unscaled);
    return e;
  }();
  return engine;
}

inline bool within(Eigen::Index p, Eigen::Index size, int kmax) {
  if (kmax < 0) return true;
  return std::min(p, size - p) <= kmax;
}

/// 2D transform as 1D passes along x (per column) then y (per row). Columns
/// with |ky| > col_kmax are known to be zero and skipped; rows with
/// |kx| > row_kmax are not needed by the caller and left half-transformed.
template <typename Scalar>
void fft2_inplace(SpectralGrid<Scalar>& a, bool inverse, int col_kmax = -1, int row_kmax = -1) {
  auto& fft = fft_engine<Scalar>();
  const Eigen::Index nx = a.rows(), ny = a.cols();
  std::vector<std::complex<Scalar>> in(static_cast<size_t>(std::max(nx, ny))), out(in.size());
  for (Eigen::Index j = 0; j < ny; ++j) {
    if (!within(j, ny, col_kmax)) continue;
    std::complex<Scalar>* col = &a(0, j);
    if (inverse) fft.inv(out.data(), col, nx); else fft.fwd(out.data(), col, nx);
    std::copy_n(out.data(), nx, col);
  }
  for (Eigen::Index i = 0; i < nx; ++i) {
    if (!within(i, nx, row_kmax)) continue;
    for (Eigen::Index j = 0; j < ny; ++j) in[static_cast<size_t>(j)] = a(i, j);
    if (inverse) fft.inv(out.data(), in.data(), ny); else fft.fwd(out.data(), in.data(), ny);
    for (Eigen::Index j = 0; j < ny; ++j) a(i, j) = out[static_cast<size_t>(j)];
  }
}

/// Calls f(kx, ky) for every wavenumber shared by spectra of sizes `from` and
/// `to`: all of them when equal, otherwise |k| < min/2 (Nyquist dropped).
template <typename F>
void for_common_modes(int from, int to, F&& f) {
  const int lo = from == to ? -(from / 2) : -(std::min(from, to) / 2 - 1);
  const int hi = from == to ? from / 2 - 1 : std::min(from, to) / 2 - 1;
  for (int ky = lo; ky <= hi; ++ky)
    for (int kx = lo; kx <= hi; ++kx) f(kx, ky);
}

inline Eigen::Index slot(int k, int size) { return k >= 0 ? k : k + size; }

/// Spectrum on a size x size grid whose inverse transform is a + i b, where a
/// and b are the real fields of spectra ca and cb (cb may be null). Each input
/// contributes its Hermitian part (c(k) + conj c(-k)) / 2.
template <typename Scalar>
SpectralGrid<Scalar> pack_pair(const SpectralGrid<Scalar>& ca, const SpectralGrid<Scalar>* cb, int size) {
  const int n = static_cast<int>(ca.rows());
  SpectralGrid<Scalar> z = SpectralGrid<Scalar>::Zero(size, size);
  const std::complex<Scalar> half_i(0, Scalar(0.5));
  for_common_modes(n, size, [&](int kx, int ky) {
    const Eigen::Index px = slot(kx, n), py = slot(ky, n), mx = slot(-kx, n), my = slot(-ky, n);
    std::complex<Scalar> v = Scalar(0.5) * (ca(px, py) + std::conj(ca(mx, my)));
    if (cb) v += half_i * ((*cb)(px, py) + std::conj((*cb)(mx, my)));
    z(slot(kx, size), slot(ky, size)) = v;
  });
  return z;
}

/// Splits the transform z of a + i b (a, b real) into the spectra of a and b
/// on an n x n grid, multiplied by `scale`.
template <typename Scalar>
void unpack_pair(const SpectralGrid<Scalar>& z, Scalar scale, int n, SpectralGrid<Scalar>& a,
                 SpectralGrid<Scalar>* b) {
  const int size = static_cast<int>(z.rows());
  a = SpectralGrid<Scalar>::Zero(n, n);
  if (b) *b = SpectralGrid<Scalar>::Zero(n, n);
  const Scalar half = Scalar(0.5) * scale;
  const std::complex<Scalar> half_i(0, half);
  for_common_modes(size, n, [&](int kx, int ky) {
    const std::complex<Scalar> p = z(slot(kx, size), slot(ky, size)), q = std::conj(z(slot(-kx, size), slot(-ky, size)));
    a(slot(kx, n), slot(ky, n)) = half * (p + q);
    if (b) (*b)(slot(kx, n), slot(ky, n)) = -half_i * (p - q);
  });
}

template <typename Scalar>
int padding_kmax(int from, int to) {
  return from == to ? -1 : std::min(from, to) / 2 - 1;
}

}  // namespace detail

/// Copies modes |k_a| < min(from, to)/2 between spectra of different sizes.
/// Nyquist modes of the smaller grid are dropped.
template <typename Scalar>
SpectralGrid<Scalar> resize_spectrum(const SpectralGrid<Scalar>& c, int to) {
  const int from = static_cast<int>(c.rows());
  if (from == to) return c;
  const int kmax = std::min(from, to) / 2 - 1;
  SpectralGrid<Scalar> out = SpectralGrid<Scalar>::Zero(to, to);
  for (int ky = -kmax; ky <= kmax; ++ky)
    for (int kx = -kmax; kx <= kmax; ++kx)
      out(kx >= 0 ? kx : kx + to, ky >= 0 ? ky : ky + to) = c(kx >= 0 ? kx : kx + from, ky >= 0 ? ky : ky + from);
  return out;
}

/// Trigonometric coefficient array of a scalar, vector or tensor field.
template <typename Scalar>
class BasicSpectralField {
 public:
  using Domain = BasicDomain<Scalar>;
  using Coeffs = SpectralGrid<Scalar>;

  BasicSpectralField() = default;
  BasicSpectralField(const Domain& d, Rank r)
      : domain_(d), rank_(r), comps_(static_cast<size_t>(component_count(r)), Coeffs::Zero(d.n, d.n)) {}

  const Domain& domain() const { return domain_; }
  Rank rank() const { return rank_; }
  int components() const { return static_cast<int>(comps_.size()); }

  Coeffs& operator[](int c) { return comps_[static_cast<size_t>(c)]; }
  const Coeffs& operator[](int c) const { return comps_[static_cast<size_t>(c)]; }

  void set_zero() {
    for (auto& c : comps_) c.setZero();
  }

  BasicSpectralField& operator+=(const BasicSpectralField& o) {
    check_compatible(o);
    for (size_t c = 0; c < comps_.size(); ++c) comps_[c] += o.comps_[c];
    return *this;
  }
  BasicSpectralField& operator-=(const BasicSpectralField& o) {
    check_compatible(o);
    for (size_t c = 0; c < comps_.size(); ++c) comps_[c] -= o.comps_[c];
    return *this;
  }
  BasicSpectralField& operator*=(Scalar s) {
    for (auto& c : comps_) c *= s;
    return *this;
  }
  /// Mode-wise multiplication by a real n x n factor (integrating factors).
  BasicSpectralField& scale_modes(const Grid<Scalar>& factor) {
    for (auto& c : comps_) c *= factor.template cast<std::complex<Scalar>>();
    return *this;
  }

  friend BasicSpectralField operator+(BasicSpectralField a, const BasicSpectralField& b) { return a += b; }
  friend BasicSpectralField operator-(BasicSpectralField a, const BasicSpectralField& b) { return a -= b; }
  friend BasicSpectralField operator*(Scalar s, BasicSpectralField a) { return a *= s; }
  friend BasicSpectralField operator*(BasicSpectralField a, Scalar s) { return a *= s; }

  /// Largest coefficient magnitude; NaN-propagating.
  Scalar max_abs() const {
    Scalar m = 0;
    for (const auto& c : comps_) {
      if (!c.allFinite()) return std::numeric_limits<Scalar>::quiet_NaN();
      if (c.size() > 0) m = std::max(m, c.abs().maxCoeff());
    }
    return m;
  }

 private:
  void check_compatible(const BasicSpectralField& o) const {
    if (!(o.domain_ == domain_) || o.rank_ != rank_)
      throw ShapeError("spectral field mismatch: " + to_string(rank_) + " vs " + to_string(o.rank_));
  }

  Domain domain_{};
  Rank rank_ = Rank::scalar;
  std::vector<Coeffs> comps_;
};

/// Physical-space samples, one grid per component.
template <typename Scalar>
using GridField = std::vector<Grid<Scalar>>;

namespace detail {

/// Forward transforms of real grids of equal size, two per complex FFT,
/// keeping modes |k| < out_n / 2 (all modes if out_n equals the grid size).
template <typename Scalar>
std::vector<SpectralGrid<Scalar>> forward_many(std::span<const Grid<Scalar>> grids, int out_n) {
  std::vector<SpectralGrid<Scalar>> out(grids.size());
  if (grids.empty()) return out;
  const int size = static_cast<int>(grids[0].rows());
  const int kmax = padding_kmax<Scalar>(size, out_n);
  const Scalar norm = Scalar(size) * Scalar(size);
  for (size_t c = 0; c < grids.size(); c += 2) {
    const bool pair = c + 1 < grids.size();
    SpectralGrid<Scalar> z(size, size);
    z.real() = grids[c];
    if (pair) z.imag() = grids[c + 1]; else z.imag().setZero();
    fft2_inplace(z, false, -1, kmax);
    unpack_pair(z, Scalar(1) / norm, out_n, out[c], pair ? &out[c + 1] : nullptr);
  }
  return out;
}

template <typename Scalar>
void check_grids(std::span<const Grid<Scalar>> grids, int count, Rank r, int size, const char* what) {
  if (static_cast<int>(grids.size()) != count)
    throw ShapeError(std::string(what) + ": expected " + std::to_string(count) + " components for " + to_string(r) +
                     ", got " + std::to_string(grids.size()));
  for (const auto& g : grids)
    if (g.rows() != g.cols() || (size > 0 && g.rows() != size) || g.rows() != grids[0].rows())
      throw ShapeError(std::string(what) + ": grid shape " + std::to_string(g.rows()) + "x" +
                       std::to_string(g.cols()) + " does not match" +
                       (size > 0 ? " domain n=" + std::to_string(size) : std::string(" the other components")));
}

}  // namespace detail

/// Forward transform of real grid data on the domain grid.
template <typename Scalar>
BasicSpectralField<Scalar> forward(const BasicDomain<Scalar>& d, Rank r, std::span<const Grid<Scalar>> grids) {
  detail::check_grids(grids, component_count(r), r, d.n, "transform");
  BasicSpectralField<Scalar> f(d, r);
  auto coeffs = detail::forward_many(grids, d.n);
  for (int c = 0; c < f.components(); ++c) f[c] = std::move(coeffs[static_cast<size_t>(c)]);
  return f;
}

template <typename Scalar>
BasicSpectralField<Scalar> forward(const BasicDomain<Scalar>& d, Rank r, const GridField<Scalar>& grids) {
  return forward(d, r, std::span<const Grid<Scalar>>(grids));
}

/// Backward transform onto a grid of `size` points per axis (default: the
/// domain grid). Larger sizes zero-pad, which is how products are dealiased.
/// Components are transformed two per complex FFT.
template <typename Scalar>
GridField<Scalar> backward(const BasicSpectralField<Scalar>& f, int size = 0) {
  const int n = f.domain().n;
  if (size == 0) size = n;
  const int kmax = detail::padding_kmax<Scalar>(n, size);
  GridField<Scalar> out(static_cast<size_t>(f.components()));
  for (int c = 0; c < f.components(); c += 2) {
    const bool pair = c + 1 < f.components();
    SpectralGrid<Scalar> z = detail::pack_pair(f[c], pair ? &f[c + 1] : nullptr, size);
    detail::fft2_inplace(z, true, kmax, -1);
    out[static_cast<size_t>(c)] = z.real();
    if (pair) out[static_cast<size_t>(c + 1)] = z.imag();
  }
  return out;
}

/// Forward transform of grid data sampled on a (padded) grid of any size,
/// truncated to the domain's resolved modes.
template <typename Scalar>
BasicSpectralField<Scalar> forward_truncated(const BasicDomain<Scalar>& d, Rank r, const GridField<Scalar>& grids) {
  const std::span<const Grid<Scalar>> view(grids);
  detail::check_grids(view, component_count(r), r, 0, "forward_truncated");
  BasicSpectralField<Scalar> f(d, r);
  auto coeffs = detail::forward_many(view, d.n);
  for (int c = 0; c < f.components(); ++c) f[c] = std::move(coeffs[static_cast<size_t>(c)]);
  return f;
}

using Domain = BasicDomain<double>;
using SpectralField = BasicSpectralField<double>;
using RealGrid = Grid<double>;
using RealGridField = GridField<double>;

}  // namespace magel
