#include "magel/params.hpp"

#include <cmath>
#include <numbers>

namespace magel {

void ModelParams::validate() const {
  if (!(nu > 0)) throw ConfigError("nu must be > 0");
  if (!(kappa >= 0)) throw ConfigError("kappa must be >= 0");
  if (!(a_exch > 0)) throw ConfigError("a_exch must be > 0");
  if (!(mu0 > 0)) throw ConfigError("mu0 must be > 0");
  if (!(gamma_llg > 0)) throw ConfigError("gamma must be > 0");
  if (!(lambda_llg > 0)) throw ConfigError("lambda must be > 0");
  elastic.validate();
}

bool ModelParams::normalized_llg() const {
  return gamma_llg == 1.0 && lambda_llg == 1.0 && 2.0 * a_exch == 1.0;
}

HextPreset parse_hext_preset(const std::string& s) {
  if (s == "zero") return HextPreset::zero;
  if (s == "uniform_constant") return HextPreset::uniform_constant;
  if (s == "uniform_sinusoidal_in_time") return HextPreset::uniform_sinusoidal_in_time;
  if (s == "spatial_gradient") return HextPreset::spatial_gradient;
  throw ConfigError("unknown hext preset '" + s + "'");
}

std::string to_string(HextPreset p) {
  switch (p) {
    case HextPreset::zero: return "zero";
    case HextPreset::uniform_constant: return "uniform_constant";
    case HextPreset::uniform_sinusoidal_in_time: return "uniform_sinusoidal_in_time";
    case HextPreset::spatial_gradient: return "spatial_gradient";
  }
  return "?";
}

void ExternalField::validate() const {
  if (!std::isfinite(amplitude)) throw ConfigError("hext amplitude must be finite");
  if (!std::isfinite(omega)) throw ConfigError("hext omega must be finite");
  if (preset == HextPreset::spatial_gradient && wavevector.isZero())
    throw ConfigError("hext wavevector must be nonzero for spatial_gradient");
}

namespace {
double phase_arg(const ExternalField& h, const Eigen::Vector2d& x, double l) {
  const double ks = 2.0 * std::numbers::pi / l;
  return ks * (h.wavevector.x() * x.x() + h.wavevector.y() * x.y());
}
}  // namespace

Eigen::Vector3d ExternalField::value(const Eigen::Vector2d& x, double t, double l) const {
  switch (preset) {
    case HextPreset::zero: return Eigen::Vector3d::Zero();
    case HextPreset::uniform_constant: return amplitude * direction;
    case HextPreset::uniform_sinusoidal_in_time: return amplitude * std::sin(omega * t) * direction;
    case HextPreset::spatial_gradient: return amplitude * std::sin(phase_arg(*this, x, l)) * direction;
  }
  return Eigen::Vector3d::Zero();
}

Eigen::Vector3d ExternalField::time_derivative(const Eigen::Vector2d& /*x*/, double t, double /*l*/) const {
  if (preset == HextPreset::uniform_sinusoidal_in_time) return amplitude * omega * std::cos(omega * t) * direction;
  return Eigen::Vector3d::Zero();
}

Eigen::Matrix<double, 3, 2> ExternalField::gradient(const Eigen::Vector2d& x, double /*t*/, double l) const {
  Eigen::Matrix<double, 3, 2> g = Eigen::Matrix<double, 3, 2>::Zero();
  if (preset != HextPreset::spatial_gradient) return g;
  const double ks = 2.0 * std::numbers::pi / l;
  const double c = amplitude * std::cos(phase_arg(*this, x, l));
  g.col(0) = c * ks * wavevector.x() * direction;
  g.col(1) = c * ks * wavevector.y() * direction;
  return g;
}

RealGridField ExternalField::sample(const Domain& d, double t, int size) const {
  RealGridField out(3, RealGrid::Zero(size, size));
  if (is_zero()) return out;
  const double h = d.l / size;
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      const Eigen::Vector3d v = value({i * h, j * h}, t, d.l);
      for (int c = 0; c < 3; ++c) out[static_cast<size_t>(c)](i, j) = v(c);
    }
  return out;
}

RealGridField ExternalField::sample_time_derivative(const Domain& d, double t, int size) const {
  RealGridField out(3, RealGrid::Zero(size, size));
  if (preset != HextPreset::uniform_sinusoidal_in_time) return out;
  const Eigen::Vector3d v = time_derivative({0, 0}, t, d.l);
  for (int c = 0; c < 3; ++c) out[static_cast<size_t>(c)].setConstant(v(c));
  return out;
}

double ExternalField::l1_norm(const Domain& d, double t) const {
  const double dn = direction.norm();
  switch (preset) {
    case HextPreset::zero: return 0.0;
    case HextPreset::uniform_constant: return std::abs(amplitude) * dn * d.area();
    case HextPreset::uniform_sinusoidal_in_time: return std::abs(amplitude * std::sin(omega * t)) * dn * d.area();
    // mean of |sin| over whole periods is 2/pi
    case HextPreset::spatial_gradient: return std::abs(amplitude) * dn * d.area() * 2.0 / std::numbers::pi;
  }
  return 0.0;
}

double ExternalField::sup_l1_norm(const Domain& d, double T) const {
  if (preset != HextPreset::uniform_sinusoidal_in_time) return l1_norm(d, 0.0);
  const double theta = std::abs(omega) * T;
  const double s = theta >= std::numbers::pi / 2 ? 1.0 : std::sin(theta);
  return std::abs(amplitude) * direction.norm() * d.area() * s;
}

double ExternalField::dt_l1_l1_norm(const Domain& d, double T) const {
  if (preset != HextPreset::uniform_sinusoidal_in_time || omega == 0.0) return 0.0;
  // Total variation of sin on [0, theta]: sin is monotone on each quarter period.
  const double theta = std::abs(omega) * T;
  const double quarter = std::numbers::pi / 2;
  const double q = std::floor(theta / quarter);
  const double tv = q + std::abs(std::sin(theta) - std::sin(q * quarter));
  return std::abs(amplitude) * direction.norm() * d.area() * tv;
}

}  // namespace magel
