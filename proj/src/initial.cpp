#include "magel/initial.hpp"

#include <cmath>

namespace magel {

SpectralField random_field(const Domain& d, Rank r, int kmax, std::mt19937_64& rng, double amplitude,
                           bool with_mean) {
  if (kmax < 0 || kmax >= d.n / 2) throw ConfigError("random_field: kmax must lie in [0, n/2)");
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(d, r);
  const int half_plane = kmax * (2 * kmax + 1) + kmax;
  const double modes = half_plane + (with_mean ? 0.5 : 0.0);
  if (modes == 0) return f;
  const double scale = amplitude / std::sqrt(modes);
  for (int c = 0; c < f.components(); ++c) {
    if (with_mean) f[c](0, 0) = scale * normal(rng) / std::sqrt(2.0);
    for (int kx = 0; kx <= kmax; ++kx)
      for (int ky = -kmax; ky <= kmax; ++ky) {
        if (kx == 0 && ky <= 0) continue;
        const double a = normal(rng), b = normal(rng);
        const std::complex<double> z(0.5 * scale * a, -0.5 * scale * b);
        f[c](d.index(kx), d.index(ky)) = z;
        f[c](d.index(-kx), d.index(-ky)) = std::conj(z);
      }
  }
  return f;
}

SpectralField sample_field(const Domain& d, Rank r, const std::function<void(double, double, double*)>& f) {
  const int size = 2 * d.n;
  const int nc = component_count(r);
  RealGridField g(static_cast<size_t>(nc), RealGrid(size, size));
  const double h = d.l / size;
  std::vector<double> buf(static_cast<size_t>(nc));
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      f(i * h, j * h, buf.data());
      for (int c = 0; c < nc; ++c) g[static_cast<size_t>(c)](i, j) = buf[static_cast<size_t>(c)];
    }
  return forward_truncated(d, r, g);
}

SpectralField unit_field(const Domain& d, const SpectralField& perturbation, const Eigen::Vector3d& base) {
  if (perturbation.rank() != Rank::vec3) throw ShapeError("unit_field: perturbation must be vec3");
  const int size = 2 * d.n;
  auto g = backward(perturbation, size);
  for (int c = 0; c < 3; ++c) g[static_cast<size_t>(c)] += base(c);
  const RealGrid norm = (g[0].square() + g[1].square() + g[2].square()).sqrt();
  for (auto& c : g) c /= norm;
  return forward_truncated(d, Rank::vec3, g);
}

SpectralField random_unit_field(const Domain& d, int kmax, std::mt19937_64& rng, double perturbation,
                                const Eigen::Vector3d& base) {
  return unit_field(d, random_field(d, Rank::vec3, kmax, rng, perturbation), base);
}

SpectralField constant_field(const Domain& d, Rank r, const Eigen::VectorXd& value) {
  if (value.size() != component_count(r)) throw ShapeError("constant_field: value length does not match rank");
  SpectralField f(d, r);
  for (int c = 0; c < f.components(); ++c) f[c](0, 0) = value(c);
  return f;
}

SimState zero_state(const Problem& pb) {
  SimState s;
  s.v = Eigen::VectorXd::Zero(pb.basis.size());
  s.F = SpectralField(pb.domain(), Rank::tensor2x2);
  s.M = constant_field(pb.domain(), Rank::vec3, Eigen::Vector3d::UnitZ());
  return s;
}

SimState taylor_green_state(const Problem& pb, double amplitude) {
  SimState s = zero_state(pb);
  const double ks = pb.domain().kscale();
  const SpectralField v = sample_field(pb.domain(), Rank::vec2, [&](double x, double y, double* out) {
    out[0] = amplitude * std::sin(ks * x) * std::cos(ks * y);
    out[1] = -amplitude * std::cos(ks * x) * std::sin(ks * y);
  });
  s.v = pb.basis.project(v);
  return s;
}

SimState generic_small_state(const Problem& pb, std::uint64_t seed, const GenericSmallOptions& opt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Domain& d = pb.domain();
  SimState s;
  s.v = Eigen::VectorXd::Zero(pb.basis.size());
  const int active = std::min(opt.velocity_modes, pb.basis.size());
  for (int i = 0; i < active; ++i) s.v(i) = normal(rng);
  if (active > 0) s.v *= std::sqrt(2.0 * opt.kinetic) / s.v.norm();
  s.F = constant_field(d, Rank::tensor2x2, Eigen::Vector4d(1, 0, 0, 1)) +
        random_field(d, Rank::tensor2x2, opt.f_kmax, rng, opt.f_perturbation);
  s.M = random_unit_field(d, opt.m_kmax, rng, opt.m_perturbation);
  return s;
}

}  // namespace magel
