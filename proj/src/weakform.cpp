#include "magel/weakform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "magel/initial.hpp"

namespace magel {

namespace {

constexpr int kEquations = 3;

int quad_size(const Domain& d) { return 2 * d.n; }

// Gradient grids ordered (d_x f_0, d_y f_0, d_x f_1, ...).
RealGridField gradient_grids(const SpectralField& f, int size) {
  const RealGridField gx = backward(partial(f, 0), size), gy = backward(partial(f, 1), size);
  RealGridField out;
  for (size_t c = 0; c < gx.size(); ++c) {
    out.push_back(gx[c]);
    out.push_back(gy[c]);
  }
  return out;
}

RealGrid cross_component(const RealGridField& a, const RealGridField& b, int c) {
  const int i = (c + 1) % 3, j = (c + 2) % 3;
  return a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)] - a[static_cast<size_t>(j)] * b[static_cast<size_t>(i)];
}

RealGrid dot3(const RealGridField& a, const RealGridField& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// Spatial integrands at one state, on the quadrature grid. Each equation
// pairs `value` with phi2 and `flux` with grad phi2.
struct Integrands {
  RealGridField field[kEquations];
  RealGridField value[kEquations];
  RealGridField flux[kEquations];
};

Integrands integrands(const SimState& s, const Problem& pb) {
  const Domain& d = s.domain();
  const ModelParams& p = pb.params;
  const int P = quad_size(d);
  const double l = d.l;
  Integrands out;

  const SpectralField vs = pb.basis.synthesize(s.v);
  const RealGridField v = backward(vs, P);
  const RealGridField gv = gradient_grids(vs, P);  // (dx v0, dy v0, dx v1, dy v1)
  const RealGridField F = backward(s.F, P);
  const RealGridField gF = gradient_grids(s.F, P);
  const RealGridField M = backward(s.M, P);
  const RealGridField gM = gradient_grids(s.M, P);  // (dx M0, dy M0, ...)
  const RealGridField lapM = backward(laplacian(s.M), P);

  RealGridField H(3, RealGrid::Zero(P, P));
  RealGridField gradH(6, RealGrid::Zero(P, P));  // (dx H0, dy H0, ...)
  if (!pb.hext.is_zero()) {
    H = pb.hext.sample(d, s.t, P);
    for (auto& c : H) c *= p.mu0;
    if (!pb.hext.is_uniform())
      for (int j = 0; j < P; ++j)
        for (int i = 0; i < P; ++i) {
          const Eigen::Matrix<double, 3, 2> g = pb.hext.gradient({i * l / P, j * l / P}, s.t, l);
          for (int k = 0; k < 3; ++k)
            for (int a = 0; a < 2; ++a) gradH[static_cast<size_t>(2 * k + a)](i, j) = p.mu0 * g(k, a);
        }
  }

  auto advect = [&](const RealGridField& grads, int c) {
    return RealGrid(v[0] * grads[static_cast<size_t>(2 * c)] + v[1] * grads[static_cast<size_t>(2 * c + 1)]);
  };

  // Momentum: (v.grad)v - (grad H)^T M against phi2; -(2A gradM (.) gradM - W'(F)F^T - nu grad v) against grad phi2.
  {
    RealGridField value(2), flux(4);
    for (int a = 0; a < 2; ++a) {
      value[static_cast<size_t>(a)] = advect(gv, a);
      for (int k = 0; k < 3; ++k)
        value[static_cast<size_t>(a)] -= gradH[static_cast<size_t>(2 * k + a)] * M[static_cast<size_t>(k)];
    }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        RealGrid odot = RealGrid::Zero(P, P);
        for (int k = 0; k < 3; ++k) odot += gM[static_cast<size_t>(2 * k + a)] * gM[static_cast<size_t>(2 * k + b)];
        // W'(F) F^T = 2 c_e F F^T
        const RealGrid ffT = F[static_cast<size_t>(2 * a)] * F[static_cast<size_t>(2 * b)] +
                             F[static_cast<size_t>(2 * a + 1)] * F[static_cast<size_t>(2 * b + 1)];
        flux[static_cast<size_t>(2 * a + b)] =
            -(2.0 * p.a_exch * odot - 2.0 * p.elastic.c_e * ffT - p.nu * gv[static_cast<size_t>(2 * a + b)]);
      }
    out.field[0] = v;
    out.value[0] = std::move(value);
    out.flux[0] = std::move(flux);
  }

  // Deformation gradient: (v.grad)F - grad v F against xi; kappa grad F against grad xi.
  {
    RealGridField value(4), flux(8);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int ab = 2 * a + b;
        RealGrid r = advect(gF, ab);
        for (int c = 0; c < 2; ++c) r -= gv[static_cast<size_t>(2 * a + c)] * F[static_cast<size_t>(2 * c + b)];
        value[static_cast<size_t>(ab)] = r;
      }
    for (size_t q = 0; q < 8; ++q) flux[q] = p.kappa * gF[q];
    out.field[1] = F;
    out.value[1] = std::move(value);
    out.flux[1] = std::move(flux);
  }

  // Magnetization, Laplacian kept undifferentiated.
  {
    RealGridField value(3);
    if (p.normalized_llg()) {
      // (v.grad)M + M x (Lap M + H) - |grad M|^2 M - Lap M + (M.H) M - H
      RealGridField lh(3);
      for (size_t k = 0; k < 3; ++k) lh[k] = lapM[k] + H[k];
      RealGrid g2 = RealGrid::Zero(P, P);
      for (const auto& g : gM) g2 += g.square();
      const RealGrid mh = dot3(M, H);
      for (int k = 0; k < 3; ++k) {
        const size_t q = static_cast<size_t>(k);
        value[q] = advect(gM, k) + cross_component(M, lh, k) - g2 * M[q] - lapM[q] + mh * M[q] - H[q];
      }
    } else {
      // (v.grad)M + gamma M x H_eff + lambda M x (M x H_eff)
      RealGridField heff(3);
      for (size_t k = 0; k < 3; ++k) heff[k] = 2.0 * p.a_exch * lapM[k] + H[k];
      RealGridField mxh(3);
      for (int k = 0; k < 3; ++k) mxh[static_cast<size_t>(k)] = cross_component(M, heff, k);
      for (int k = 0; k < 3; ++k)
        value[static_cast<size_t>(k)] =
            advect(gM, k) + p.gamma_llg * mxh[static_cast<size_t>(k)] + p.lambda_llg * cross_component(M, mxh, k);
    }
    out.field[2] = M;
    out.value[2] = std::move(value);
  }
  return out;
}

double pair(const RealGridField& a, const RealGridField& b, double area) {
  if (a.empty() || b.empty()) return 0.0;
  return l2_inner_grid(a, b, area);
}

// Trapezoid rule for int -phi1' a + phi1 b dt, minus the initial-data term.
double time_residual(const std::vector<double>& phi1, const std::vector<double>& a, const std::vector<double>& b,
                     double dt) {
  if (phi1.size() != a.size()) throw ShapeError("weak form: test profile and trajectory sample counts differ");
  double r = -phi1.front() * a.front();
  for (size_t i = 0; i + 1 < a.size(); ++i) {
    const double slope = (phi1[i + 1] - phi1[i]) / dt;
    r += 0.5 * dt * ((-slope * a[i] + phi1[i] * b[i]) + (-slope * a[i + 1] + phi1[i + 1] * b[i + 1]));
  }
  return r;
}

Rank rank_of(int eq) { return eq == 0 ? Rank::vec2 : eq == 1 ? Rank::tensor2x2 : Rank::vec3; }

double residual_of(int eq, const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb) {
  if (traj.size() < 2) throw ConfigError("weak form: trajectory needs at least two samples");
  if (tf.phi2.rank() != rank_of(eq))
    throw ShapeError("weak form: test field rank " + to_string(tf.phi2.rank()) + " does not match the equation");
  const Domain& d = traj.front().domain();
  const int P = quad_size(d);
  const RealGridField t = backward(tf.phi2, P), gt = gradient_grids(tf.phi2, P);
  std::vector<double> a, b;
  for (const auto& s : traj) {
    const Integrands in = integrands(s, pb);
    a.push_back(pair(in.field[eq], t, d.area()));
    b.push_back(pair(in.value[eq], t, d.area()) + pair(in.flux[eq], gt, d.area()));
  }
  return time_residual(tf.phi1, a, b, traj[1].t - traj[0].t);
}

SpectralField unit(SpectralField f) {
  const double n = std::sqrt(l2_norm_sq(f));
  if (n > 0) f *= 1.0 / n;
  return f;
}

}  // namespace

std::string to_string(TimeProfile p) {
  switch (p) {
    case TimeProfile::ramp_down: return "ramp_down";
    case TimeProfile::hat: return "hat";
    case TimeProfile::smoothed_step: return "smoothed_step";
  }
  return "?";
}

std::string to_string(WeakEquation e) {
  switch (e) {
    case WeakEquation::momentum: return "momentum";
    case WeakEquation::deformation: return "deformation";
    case WeakEquation::magnetization: return "magnetization";
  }
  return "?";
}

std::vector<double> profile_values(TimeProfile p, int samples) {
  if (samples < 2) throw ConfigError("profile_values: need at least two samples");
  const int last = samples - 1;
  std::vector<double> v(static_cast<size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) / last;
    double phi = 0.0;
    switch (p) {
      case TimeProfile::ramp_down: phi = 1.0 - s; break;
      case TimeProfile::hat: {
        const int mid = std::max(1, last / 2);
        phi = k <= mid ? static_cast<double>(k) / mid : static_cast<double>(last - k) / (last - mid);
        break;
      }
      case TimeProfile::smoothed_step: {
        const double u = std::clamp((s - 0.25) / 0.5, 0.0, 1.0);
        phi = 1.0 - u * u * (3.0 - 2.0 * u);
        break;
      }
    }
    v[static_cast<size_t>(k)] = phi;
  }
  v.back() = 0.0;
  return v;
}

TestFunction TestFunction::separable(TimeProfile p, int samples, SpectralField space) {
  return {profile_values(p, samples), std::move(space)};
}

double TestFunction::norm() const {
  double m = 0.0;
  for (double x : phi1) m = std::max(m, std::abs(x));
  return std::sqrt(l2_norm_sq(phi2)) * m;
}

double residual_momentum(const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb) {
  return residual_of(0, traj, tf, pb);
}

double residual_F(const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb) {
  return residual_of(1, traj, tf, pb);
}

double residual_M(const std::vector<SimState>& traj, const TestFunction& tf, const Problem& pb) {
  return residual_of(2, traj, tf, pb);
}

TestBattery make_battery(const Problem& pb, int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("make_battery: count must be >= 1");
  const Domain& d = pb.domain();
  const int kmax = std::min(3, d.n / 2 - 1);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TestBattery b;
  b.seed = seed;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd c(pb.basis.size());
    for (int j = 0; j < c.size(); ++j) c(j) = normal(rng);
    b.momentum.push_back(unit(pb.basis.synthesize(c)));
    b.deformation.push_back(unit(random_field(d, Rank::tensor2x2, kmax, rng, 1.0, true)));
    b.magnetization.push_back(unit(random_field(d, Rank::vec3, kmax, rng, 1.0, true)));
  }
  return b;
}

double WeakFormReport::max_of(WeakEquation e) const {
  switch (e) {
    case WeakEquation::momentum: return max_momentum;
    case WeakEquation::deformation: return max_deformation;
    case WeakEquation::magnetization: return max_magnetization;
  }
  return 0.0;
}

double WeakFormReport::total_of(WeakEquation e) const {
  double s = 0.0;
  for (const auto& r : residuals)
    if (r.equation == e) s += r.value;
  return s;
}

WeakFormAccumulator::WeakFormAccumulator(const Problem& pb, TestBattery battery)
    : pb_(&pb), battery_(std::move(battery)), a_(kEquations), b_(kEquations), test_grids_(kEquations),
      test_gradients_(kEquations) {
  const int P = quad_size(pb.domain());
  const std::vector<SpectralField>* sets[kEquations] = {&battery_.momentum, &battery_.deformation,
                                                        &battery_.magnetization};
  for (int e = 0; e < kEquations; ++e) {
    for (const auto& f : *sets[e]) {
      if (f.rank() != rank_of(e)) throw ShapeError("test battery: wrong rank for " + to_string(WeakEquation(e)));
      test_grids_[static_cast<size_t>(e)].push_back(backward(f, P));
      test_gradients_[static_cast<size_t>(e)].push_back(gradient_grids(f, P));
    }
    a_[static_cast<size_t>(e)].resize(sets[e]->size());
    b_[static_cast<size_t>(e)].resize(sets[e]->size());
  }
}

void WeakFormAccumulator::add(const SimState& s) {
  if (times_.size() >= 2) {
    const double dt = times_[1] - times_[0];
    if (std::abs(s.t - times_.back() - dt) > 1e-9 * std::max(1.0, dt))
      throw ConfigError("weak form: samples must be uniformly spaced");
  }
  times_.push_back(s.t);
  const Integrands in = integrands(s, *pb_);
  const double area = pb_->domain().area();
  for (size_t e = 0; e < static_cast<size_t>(kEquations); ++e)
    for (size_t i = 0; i < test_grids_[e].size(); ++i) {
      a_[e][i].push_back(pair(in.field[e], test_grids_[e][i], area));
      b_[e][i].push_back(pair(in.value[e], test_grids_[e][i], area) + pair(in.flux[e], test_gradients_[e][i], area));
    }
}

WeakFormReport WeakFormAccumulator::finish() const {
  if (times_.size() < 2) throw ConfigError("weak form: trajectory needs at least two samples");
  WeakFormReport rep;
  rep.samples = samples();
  const double dt = times_[1] - times_[0];
  const std::vector<SpectralField>* sets[kEquations] = {&battery_.momentum, &battery_.deformation,
                                                        &battery_.magnetization};
  double* maxima[kEquations] = {&rep.max_momentum, &rep.max_deformation, &rep.max_magnetization};
  for (TimeProfile prof : {TimeProfile::ramp_down, TimeProfile::hat, TimeProfile::smoothed_step}) {
    const std::vector<double> phi1 = profile_values(prof, samples());
    const double pmax = *std::max_element(phi1.begin(), phi1.end());
    for (int e = 0; e < kEquations; ++e)
      for (size_t i = 0; i < a_[static_cast<size_t>(e)].size(); ++i) {
        const double norm = std::sqrt(l2_norm_sq((*sets[e])[i])) * pmax;
        const double r = time_residual(phi1, a_[static_cast<size_t>(e)][i], b_[static_cast<size_t>(e)][i], dt);
        WeakResidual w{WeakEquation(e), static_cast<int>(i), prof, norm > 0 ? std::abs(r) / norm : 0.0};
        *maxima[e] = std::max(*maxima[e], w.value);
        rep.residuals.push_back(w);
      }
  }
  return rep;
}

WeakFormReport certify(const std::vector<SimState>& traj, const Problem& pb, const TestBattery& battery) {
  WeakFormAccumulator acc(pb, battery);
  for (const auto& s : traj) acc.add(s);
  return acc.finish();
}

void corrupt_sample(std::vector<SimState>& traj, int index, double amplitude, std::uint64_t seed) {
  if (index < 0 || index >= static_cast<int>(traj.size())) throw ConfigError("corrupt_sample: index out of range");
  SimState& s = traj[static_cast<size_t>(index)];
  const Domain& d = s.domain();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd dv(s.v.size());
  for (int i = 0; i < dv.size(); ++i) dv(i) = normal(rng);
  s.v += amplitude * dv / dv.norm();
  const int kmax = std::min(3, d.n / 2 - 1);
  s.F += amplitude * unit(random_field(d, Rank::tensor2x2, kmax, rng, 1.0, true));
  s.M += amplitude * unit(random_field(d, Rank::vec3, kmax, rng, 1.0, true));
}

}  // namespace magel
