#include "magel/basis.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "magel/calculus.hpp"

namespace magel {

namespace {

struct Candidate {
  int kx, ky;
  Phase phase;
  int k2() const { return kx * kx + ky * ky; }
};

// Half-plane representatives below Nyquist, both phases, deterministic order.
std::vector<Candidate> half_plane(int n, bool with_mean) {
  const int kmax = n / 2 - 1;
  std::vector<Candidate> out;
  if (with_mean) out.push_back({0, 0, Phase::cosine});
  for (int kx = 0; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      out.push_back({kx, ky, Phase::cosine});
      out.push_back({kx, ky, Phase::sine});
    }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return std::make_tuple(a.k2(), a.kx, a.ky, static_cast<int>(a.phase)) <
           std::make_tuple(b.k2(), b.kx, b.ky, static_cast<int>(b.phase));
  });
  return out;
}

// Coefficient of cos (1/2) or sin (-i/2) at +k; the -k entry is its conjugate.
std::complex<double> phase_coefficient(Phase p) {
  return p == Phase::cosine ? std::complex<double>(0.5, 0.0) : std::complex<double>(0.0, -0.5);
}

}  // namespace

VelocityBasis::VelocityBasis(const Domain& d, int m) : domain_(d) {
  if (m < 1) throw ConfigError("velocity basis: mode count must be >= 1");
  if (m > capacity(d.n))
    throw ConfigError("velocity basis: " + std::to_string(m) + " modes exceed the " + std::to_string(capacity(d.n)) +
                      " modes resolvable below Nyquist at n=" + std::to_string(d.n));
  const auto cands = half_plane(d.n, false);
  const double ks = d.kscale();
  modes_.reserve(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto& c = cands[static_cast<size_t>(i)];
    const double norm = std::sqrt(static_cast<double>(c.k2()));
    VelocityMode mode;
    mode.k = {c.kx, c.ky};
    mode.phase = c.phase;
    mode.polarization = Eigen::Vector2d(-c.ky, c.kx) / norm;
    mode.eigenvalue = ks * ks * c.k2();
    modes_.push_back(mode);
  }
}

int VelocityBasis::capacity(int n) {
  const int kmax = n / 2 - 1;
  const int count = kmax * (2 * kmax + 1) + kmax;
  return 2 * count;
}

Eigen::VectorXd VelocityBasis::eigenvalues() const {
  Eigen::VectorXd ev(size());
  for (int i = 0; i < size(); ++i) ev(i) = modes_[static_cast<size_t>(i)].eigenvalue;
  return ev;
}

int VelocityBasis::max_wavenumber() const {
  int k = 0;
  for (const auto& m : modes_) k = std::max({k, std::abs(m.k.x()), std::abs(m.k.y())});
  return k;
}

SpectralField VelocityBasis::synthesize(const Eigen::VectorXd& g) const {
  if (g.size() != size()) throw ShapeError("velocity basis: coefficient vector length mismatch");
  SpectralField u(domain_, Rank::vec2);
  const double amp = std::sqrt(2.0 / domain_.area());
  for (int i = 0; i < size(); ++i) {
    const auto& m = modes_[static_cast<size_t>(i)];
    const std::complex<double> c = amp * g(i) * phase_coefficient(m.phase);
    const int ip = domain_.index(m.k.x()), jp = domain_.index(m.k.y());
    const int im = domain_.index(-m.k.x()), jm = domain_.index(-m.k.y());
    for (int a = 0; a < 2; ++a) {
      u[a](ip, jp) += c * m.polarization(a);
      u[a](im, jm) += std::conj(c) * m.polarization(a);
    }
  }
  return u;
}

Eigen::VectorXd VelocityBasis::project(const SpectralField& u) const {
  if (u.rank() != Rank::vec2) throw ShapeError("project_velocity: expects vec2");
  if (!(u.domain() == domain_)) throw ShapeError("project_velocity: basis built on a different domain");
  Eigen::VectorXd g(size());
  const double amp = std::sqrt(2.0 / domain_.area());
  for (int i = 0; i < size(); ++i) {
    const auto& m = modes_[static_cast<size_t>(i)];
    const std::complex<double> c = amp * phase_coefficient(m.phase);
    const int ip = domain_.index(m.k.x()), jp = domain_.index(m.k.y());
    std::complex<double> s = 0;
    for (int a = 0; a < 2; ++a) s += u[a](ip, jp) * std::conj(c) * m.polarization(a);
    // The -k entry contributes the complex conjugate.
    g(i) = 2.0 * domain_.area() * s.real();
  }
  return g;
}

RealGridField VelocityBasis::sample(int i, int size) const {
  const auto& m = mode(i);
  const double amp = std::sqrt(2.0 / domain_.area());
  const double ks = domain_.kscale(), h = domain_.l / size;
  RealGridField out(2, RealGrid(size, size));
  for (int jy = 0; jy < size; ++jy)
    for (int ix = 0; ix < size; ++ix) {
      const double arg = ks * (m.k.x() * ix * h + m.k.y() * jy * h);
      const double s = amp * (m.phase == Phase::cosine ? std::cos(arg) : std::sin(arg));
      out[0](ix, jy) = s * m.polarization(0);
      out[1](ix, jy) = s * m.polarization(1);
    }
  return out;
}

RealGridField VelocityBasis::sample_gradient(int i, int size) const {
  const auto& m = mode(i);
  const double amp = std::sqrt(2.0 / domain_.area());
  const double ks = domain_.kscale(), h = domain_.l / size;
  const double kap[2] = {ks * m.k.x(), ks * m.k.y()};
  RealGridField out(4, RealGrid(size, size));
  for (int jy = 0; jy < size; ++jy)
    for (int ix = 0; ix < size; ++ix) {
      const double arg = kap[0] * ix * h + kap[1] * jy * h;
      const double ds = amp * (m.phase == Phase::cosine ? -std::sin(arg) : std::cos(arg));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out[static_cast<size_t>(2 * a + b)](ix, jy) = ds * kap[b] * m.polarization(a);
    }
  return out;
}

SpectralField VelocityBasis::mode_field(int i) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size());
  e(i) = 1.0;
  return synthesize(e);
}

ScalarBasis::ScalarBasis(const Domain& d, ScalarBasisKind kind, int count) : domain_(d), kind_(kind) {
  auto cands = half_plane(d.n, true);
  if (count < 1 || count > static_cast<int>(cands.size()))
    throw ConfigError("scalar basis: mode count " + std::to_string(count) + " outside [1, " +
                      std::to_string(cands.size()) + "]");
  const double ks2 = d.kscale() * d.kscale();
  for (int i = 0; i < count; ++i) {
    const auto& c = cands[static_cast<size_t>(i)];
    const double lap = ks2 * c.k2();
    modes_.push_back({{c.kx, c.ky}, c.phase, kind == ScalarBasisKind::laplace ? lap : lap * lap + 1.0});
  }
}

SpectralField ScalarBasis::mode_field(int i) const {
  const auto& m = mode(i);
  SpectralField f(domain_, Rank::scalar);
  if (m.k.isZero()) {
    f[0](0, 0) = 1.0 / std::sqrt(domain_.area());
    return f;
  }
  const std::complex<double> c = std::sqrt(2.0 / domain_.area()) * phase_coefficient(m.phase);
  f[0](domain_.index(m.k.x()), domain_.index(m.k.y())) += c;
  f[0](domain_.index(-m.k.x()), domain_.index(-m.k.y())) += std::conj(c);
  return f;
}

RealGrid ScalarBasis::eigenvalue_grid() const {
  RealGrid lap = laplace_symbol(domain_);
  if (kind_ == ScalarBasisKind::laplace) return lap;
  return lap * lap + 1.0;
}

}  // namespace magel
