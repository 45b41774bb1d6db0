#include "magel/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "magel/subsolvers.hpp"

namespace magel {

void SimState::check_finite(double last_valid_time) const {
  magel::check_finite(v, last_valid_time, "velocity");
  magel::check_finite(F, last_valid_time, "deformation gradient");
  magel::check_finite(M, last_valid_time, "magnetization");
}

CoeffTrajectory::CoeffTrajectory(double t0, double dt, std::vector<Eigen::VectorXd> samples)
    : t0_(t0), dt_(dt), samples_(std::move(samples)) {
  if (!(dt_ > 0)) throw ShapeError("trajectory: sample spacing must be positive");
  if (samples_.empty()) throw ShapeError("trajectory: no samples");
  for (const auto& s : samples_)
    if (s.size() != samples_.front().size()) throw ShapeError("trajectory: inconsistent coefficient length");
}

CoeffTrajectory CoeffTrajectory::constant(double t0, double dt, int steps, const Eigen::VectorXd& g) {
  return CoeffTrajectory(t0, dt, std::vector<Eigen::VectorXd>(static_cast<size_t>(steps + 1), g));
}

namespace {
// Interval index and weight of t on a uniform grid with `count` samples.
std::pair<int, double> locate(double t, double t0, double dt, int count) {
  if (count < 2) return {0, 0.0};
  const double s = (t - t0) / dt;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, count - 2);
  return {i, std::clamp(s - i, 0.0, 1.0)};
}
}  // namespace

Eigen::VectorXd CoeffTrajectory::at(double t) const {
  const auto [i, w] = locate(t, t0_, dt_, size());
  if (w == 0.0) return (*this)[i];
  if (w == 1.0) return (*this)[i + 1];
  return (1.0 - w) * (*this)[i] + w * (*this)[i + 1];
}

double CoeffTrajectory::sup_sq_distance(const CoeffTrajectory& o) const {
  if (o.size() != size() || o.dimension() != dimension())
    throw ShapeError("trajectory distance: sample layouts differ");
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s = std::max(s, ((*this)[i] - o[i]).squaredNorm());
  return s;
}

double CoeffTrajectory::sup_norm() const {
  double s = 0.0;
  for (const auto& g : samples_) s = std::max(s, g.norm());
  return s;
}

SpectralField FieldTrajectory::at(double t) const {
  const auto [i, w] = locate(t, t0, dt, size());
  const auto& a = samples[static_cast<size_t>(i)];
  if (w == 0.0) return a;
  const auto& b = samples[static_cast<size_t>(i + 1)];
  if (w == 1.0) return b;
  return (1.0 - w) * a + w * b;
}

Problem Problem::build(const Domain& d, int m, const ModelParams& p, const ExternalField& h,
                       std::optional<LlgForm> form, Dealiasing dealias) {
  p.validate();
  h.validate();
  Problem pb;
  pb.basis = VelocityBasis(d, m);
  pb.tensors = assemble_convection_tensor(pb.basis);
  pb.params = p;
  pb.hext = h;
  pb.llg_form = form.value_or(p.normalized_llg() ? LlgForm::expanded : LlgForm::cross);
  if (pb.llg_form == LlgForm::expanded && !p.normalized_llg())
    throw UnsupportedParameters("expanded LLG form requires gamma = lambda = 1 and 2A = 1");
  pb.dealias = dealias;
  return pb;
}

}  // namespace magel
