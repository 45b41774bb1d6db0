#include "magel/physics.hpp"

#include <cmath>
#include <string>

namespace magel {

namespace {

RealGridField cross(const RealGridField& a, const RealGridField& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

RealGrid dot3(const RealGridField& a, const RealGridField& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double quadrature(const RealGrid& g, double area) { return g.sum() * area / static_cast<double>(g.size()); }

RealGridField scaled(RealGridField g, double s) {
  for (auto& c : g) c *= s;
  return g;
}

void require_rank(const SpectralField& f, Rank r, const char* what) {
  if (f.rank() != r) throw ShapeError(std::string(what) + ": expected " + to_string(r) + ", got " + to_string(f.rank()));
}

void require_same_domain(const SpectralField& a, const SpectralField& b, const char* what) {
  if (!(a.domain() == b.domain())) throw ShapeError(std::string(what) + ": fields live on different domains");
}

// (v . grad) of each component of f, sampled on a grid of `size`.
RealGridField advection(const RealGridField& v, const SpectralField& f, int size) {
  const auto fx = backward(partial(f, 0), size);
  const auto fy = backward(partial(f, 1), size);
  RealGridField out;
  out.reserve(fx.size());
  for (size_t c = 0; c < fx.size(); ++c) out.push_back(v[0] * fx[c] + v[1] * fy[c]);
  return out;
}

// d_a (H_ext)_k on a grid, ordered k-major: index 2k + a.
RealGridField hext_gradient(const Domain& d, const ExternalField& h, double t, int size) {
  RealGridField out(6, RealGrid::Zero(size, size));
  if (h.is_uniform() || h.is_zero()) return out;
  const double dx = d.l / size;
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      const auto g = h.gradient({i * dx, j * dx}, t, d.l);
      for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 2; ++a) out[static_cast<size_t>(2 * k + a)](i, j) = g(k, a);
    }
  return out;
}

double external_work_rate(const SpectralField& M, const ExternalField& h, double t, const ModelParams& p) {
  if (h.preset != HextPreset::uniform_sinusoidal_in_time || h.is_zero()) return 0.0;
  const Eigen::Vector3d dh = h.time_derivative({0, 0}, t, M.domain().l);
  const Eigen::VectorXd m = mean(M);
  return -p.mu0 * M.domain().area() * dh.dot(m);
}

}  // namespace

int Dealiasing::grid_size(int n, int order) const {
  if (mode == ProductDealiasing::truncation || order <= 1) return n;
  return order == 2 ? 3 * n / 2 : 2 * n;
}

SpectralField Dealiasing::finish(const Domain& d, Rank r, const RealGridField& grids, int order) const {
  SpectralField f = forward_truncated(d, r, grids);
  if (mode == ProductDealiasing::truncation && order >= 2)
    f = dealias(f, order >= 3 ? DealiasRule::half : DealiasRule::two_thirds);
  return f;
}

SpectralField SplitRhs::total(const SpectralField& field) const {
  if (stiff_coefficient == 0.0) return nonlinear;
  return nonlinear + stiff_coefficient * laplacian(field);
}

SpectralField effective_field(const SpectralField& M, const ExternalField& hext, double t, const ModelParams& p) {
  require_rank(M, Rank::vec3, "effective_field");
  SpectralField h = 2.0 * p.a_exch * laplacian(M);
  if (!hext.is_zero()) h += p.mu0 * forward(M.domain(), Rank::vec3, hext.sample(M.domain(), t, M.domain().n));
  return h;
}

SpectralField llg_rhs_cross(const SpectralField& v, const SpectralField& M, const SpectralField& h_eff,
                            const ModelParams& p, const Dealiasing& dealias) {
  require_rank(v, Rank::vec2, "llg_rhs_cross");
  require_rank(M, Rank::vec3, "llg_rhs_cross");
  require_rank(h_eff, Rank::vec3, "llg_rhs_cross");
  require_same_domain(v, M, "llg_rhs_cross");
  require_same_domain(M, h_eff, "llg_rhs_cross");
  const int P = dealias.grid_size(M.domain().n, 3);
  const auto vg = backward(v, P);
  const auto mg = backward(M, P);
  const auto hg = backward(h_eff, P);
  const auto adv = advection(vg, M, P);
  const auto mxh = cross(mg, hg);
  const auto mxmxh = cross(mg, mxh);
  RealGridField out(3);
  for (size_t c = 0; c < 3; ++c) out[c] = -adv[c] - p.gamma_llg * mxh[c] - p.lambda_llg * mxmxh[c];
  return dealias.finish(M.domain(), Rank::vec3, out, 3);
}

SplitRhs llg_rhs_expanded(const SpectralField& v, const SpectralField& M, const ExternalField& hext, double t,
                          const ModelParams& p, const Dealiasing& dealias, std::optional<double> unit_tolerance) {
  require_rank(v, Rank::vec2, "llg_rhs_expanded");
  require_rank(M, Rank::vec3, "llg_rhs_expanded");
  require_same_domain(v, M, "llg_rhs_expanded");
  if (!p.normalized_llg())
    throw UnsupportedParameters("expanded LLG form requires gamma = lambda = 1 and 2A = 1 (got gamma=" +
                                std::to_string(p.gamma_llg) + ", lambda=" + std::to_string(p.lambda_llg) +
                                ", A=" + std::to_string(p.a_exch) + "); use the cross form");
  if (unit_tolerance) {
    const double drift = unit_norm_drift(M);
    if (drift > *unit_tolerance)
      throw ConstraintViolation("expanded LLG form: max||M|-1| = " + format_number(drift) + " exceeds tolerance",
                                t, drift);
  }
  const Domain& d = M.domain();
  const int P = dealias.grid_size(d.n, 3);
  const auto vg = backward(v, P);
  const auto mg = backward(M, P);
  const auto mx = backward(partial(M, 0), P);
  const auto my = backward(partial(M, 1), P);
  const auto lap = backward(laplacian(M), P);
  const auto hg = scaled(hext.sample(d, t, P), p.mu0);

  RealGrid grad_sq = RealGrid::Zero(P, P);
  for (size_t c = 0; c < 3; ++c) grad_sq += mx[c] * mx[c] + my[c] * my[c];
  const RealGrid m_dot_h = dot3(mg, hg);
  RealGridField heff(3), damping(3), out(3);
  for (size_t c = 0; c < 3; ++c) {
    heff[c] = lap[c] + hg[c];
    damping[c] = grad_sq * mg[c] + lap[c] - mg[c] * m_dot_h + hg[c];
  }
  const auto gyro = cross(mg, heff);
  for (size_t c = 0; c < 3; ++c) {
    const RealGrid adv = vg[0] * mx[c] + vg[1] * my[c];
    out[c] = -adv - gyro[c] + damping[c] - lap[c];
  }

  SplitRhs r;
  r.nonlinear = dealias.finish(d, Rank::vec3, out, 3);
  r.stiff_coefficient = 1.0;
  r.dissipation_rate = quadrature(dot3(heff, damping), d.area());
  r.external_work_rate = external_work_rate(M, hext, t, p);
  return r;
}

SplitRhs llg_rhs_split(const SpectralField& v, const SpectralField& M, const ExternalField& hext, double t,
                       const ModelParams& p, LlgForm form, const Dealiasing& dealias) {
  if (form == LlgForm::expanded) return llg_rhs_expanded(v, M, hext, t, p, dealias);
  require_rank(v, Rank::vec2, "llg_rhs_split");
  require_rank(M, Rank::vec3, "llg_rhs_split");
  const Domain& d = M.domain();
  const int P = dealias.grid_size(d.n, 3);
  const double two_a = 2.0 * p.a_exch;
  const auto vg = backward(v, P);
  const auto mg = backward(M, P);
  const auto lap = backward(laplacian(M), P);
  const auto hg = scaled(hext.sample(d, t, P), p.mu0);
  RealGridField heff(3);
  for (size_t c = 0; c < 3; ++c) heff[c] = two_a * lap[c] + hg[c];
  const auto adv = advection(vg, M, P);
  const auto mxh = cross(mg, heff);
  const auto mxmxh = cross(mg, mxh);
  RealGridField out(3);
  const double stiff = p.lambda_llg * two_a;
  for (size_t c = 0; c < 3; ++c)
    out[c] = -adv[c] - p.gamma_llg * mxh[c] - p.lambda_llg * mxmxh[c] - stiff * lap[c];

  SplitRhs r;
  r.nonlinear = dealias.finish(d, Rank::vec3, out, 3);
  r.stiff_coefficient = stiff;
  // -H_eff . (-lambda M x (M x H_eff)) = lambda (|M|^2 |H_eff|^2 - (M.H_eff)^2)
  const RealGrid mh = dot3(mg, heff);
  r.dissipation_rate = p.lambda_llg * quadrature(dot3(mg, mg) * dot3(heff, heff) - mh * mh, d.area());
  r.external_work_rate = external_work_rate(M, hext, t, p);
  return r;
}

SpectralField exchange_product(const SpectralField& M, const Dealiasing& dealias) {
  require_rank(M, Rank::vec3, "exchange_product");
  const int P = dealias.grid_size(M.domain().n, 2);
  const auto mx = backward(partial(M, 0), P);
  const auto my = backward(partial(M, 1), P);
  const RealGrid xx = dot3(mx, mx), xy = dot3(mx, my), yy = dot3(my, my);
  return dealias.finish(M.domain(), Rank::tensor2x2, {xx, xy, xy, yy}, 2);
}

SpectralField elastic_stress(const SpectralField& F, const ModelParams& p, const Dealiasing& dealias) {
  require_rank(F, Rank::tensor2x2, "elastic_stress");
  const int P = dealias.grid_size(F.domain().n, 2);
  const auto f = backward(F, P);
  const double s = 2.0 * p.elastic.c_e;
  // W'(F) F^T = 2 c_e F F^T
  RealGrid xx = s * (f[0] * f[0] + f[1] * f[1]);
  RealGrid xy = s * (f[0] * f[2] + f[1] * f[3]);
  RealGrid yy = s * (f[2] * f[2] + f[3] * f[3]);
  return dealias.finish(F.domain(), Rank::tensor2x2, {xx, xy, xy, yy}, 2);
}

SpectralField magnetoelastic_stress(const SpectralField& M, const SpectralField& F, const ModelParams& p,
                                    const Dealiasing& dealias) {
  require_same_domain(M, F, "magnetoelastic_stress");
  return elastic_stress(F, p, dealias) - 2.0 * p.a_exch * exchange_product(M, dealias);
}

SpectralField body_force(const SpectralField& M, const ExternalField& hext, double t, const ModelParams& p,
                         const Dealiasing& dealias) {
  require_rank(M, Rank::vec3, "body_force");
  const Domain& d = M.domain();
  if (hext.is_uniform() || hext.is_zero()) return SpectralField(d, Rank::vec2);
  const int P = dealias.grid_size(d.n, 2);
  const auto mg = backward(M, P);
  const auto gh = hext_gradient(d, hext, t, P);
  RealGridField out(2, RealGrid::Zero(P, P));
  for (size_t a = 0; a < 2; ++a)
    for (size_t k = 0; k < 3; ++k) out[a] += p.mu0 * gh[2 * k + a] * mg[k];
  return dealias.finish(d, Rank::vec2, out, 2);
}

SplitRhs transport_rhs_F(const SpectralField& v, const SpectralField& F, const ModelParams& p,
                         const Dealiasing& dealias) {
  require_rank(v, Rank::vec2, "transport_rhs_F");
  require_rank(F, Rank::tensor2x2, "transport_rhs_F");
  require_same_domain(v, F, "transport_rhs_F");
  const int P = dealias.grid_size(F.domain().n, 2);
  const auto vg = backward(v, P);
  const auto fg = backward(F, P);
  const auto adv = advection(vg, F, P);
  // grad v ordered (d_x v_x, d_y v_x, d_x v_y, d_y v_y) = (grad v)_ab at 2a + b
  const auto vx = backward(partial(v, 0), P);
  const auto vy = backward(partial(v, 1), P);
  const RealGrid* gv[4] = {&vx[0], &vy[0], &vx[1], &vy[1]};
  RealGridField out(4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const size_t ab = static_cast<size_t>(2 * a + b);
      out[ab] = -adv[ab] + *gv[2 * a] * fg[static_cast<size_t>(b)] + *gv[2 * a + 1] * fg[static_cast<size_t>(2 + b)];
    }
  SplitRhs r;
  r.nonlinear = dealias.finish(F.domain(), Rank::tensor2x2, out, 2);
  r.stiff_coefficient = p.kappa;
  return r;
}

Eigen::VectorXd GalerkinTensors::contract(const Eigen::VectorXd& g) const {
  if (g.size() != size()) throw ShapeError("GalerkinTensors::contract: coefficient length mismatch");
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) out(i) = g.dot(slices_[static_cast<size_t>(i)] * g);
  return out;
}

GalerkinTensors assemble_convection_tensor(const VelocityBasis& basis, std::size_t memory_budget_bytes) {
  const int m = basis.size();
  const std::size_t bytes = static_cast<std::size_t>(m) * m * m * sizeof(double);
  if (bytes > memory_budget_bytes)
    throw CapacityError("convection tensor for m=" + std::to_string(m) + " needs " + std::to_string(bytes) +
                        " bytes, budget is " + std::to_string(memory_budget_bytes));
  // Triple products of modes with |k_a| <= kmax are resolved exactly on any grid finer than 3 kmax.
  const int q = std::max(4, 3 * basis.max_wavenumber() + 2);
  const Eigen::Index pts = static_cast<Eigen::Index>(q) * q;
  const double w = basis.domain().area() / static_cast<double>(pts);

  Eigen::MatrixXd xi[2] = {Eigen::MatrixXd(pts, m), Eigen::MatrixXd(pts, m)};
  std::vector<RealGridField> grads(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto s = basis.sample(i, q);
    for (int a = 0; a < 2; ++a) xi[a].col(i) = s[static_cast<size_t>(a)].reshaped();
    grads[static_cast<size_t>(i)] = basis.sample_gradient(i, q);
  }

  std::vector<Eigen::MatrixXd> slices(static_cast<size_t>(m), Eigen::MatrixXd(m, m));
  Eigen::MatrixXd y[2] = {Eigen::MatrixXd(pts, m), Eigen::MatrixXd(pts, m)};
  for (int j = 0; j < m; ++j) {
    // y_a(:, k) = sum_b xi_j,b d_b xi_k,a
    for (int k = 0; k < m; ++k) {
      const auto& gk = grads[static_cast<size_t>(k)];
      for (int a = 0; a < 2; ++a)
        y[a].col(k) = xi[0].col(j).array() * gk[static_cast<size_t>(2 * a)].reshaped().array() +
                      xi[1].col(j).array() * gk[static_cast<size_t>(2 * a + 1)].reshaped().array();
    }
    const Eigen::MatrixXd ik = -w * (xi[0].transpose() * y[0] + xi[1].transpose() * y[1]);
    for (int i = 0; i < m; ++i) slices[static_cast<size_t>(i)].row(j) = ik.row(i);
  }
  return GalerkinTensors(std::move(slices));
}

Eigen::VectorXd stress_forcing(const SpectralField& F, const SpectralField& M, const ExternalField& hext, double t,
                               const VelocityBasis& basis, const ModelParams& p, const Dealiasing& dealias) {
  if (!(basis.domain() == F.domain())) throw ShapeError("stress_forcing: basis built on a different domain");
  // <-T_rev, grad xi> = <div T_rev, xi>
  SpectralField rhs = divergence(magnetoelastic_stress(M, F, p, dealias));
  if (!hext.is_uniform() && !hext.is_zero()) rhs += body_force(M, hext, t, p, dealias);
  return basis.project(rhs);
}

double unit_norm_drift(const SpectralField& M) {
  require_rank(M, Rank::vec3, "unit_norm_drift");
  const auto g = backward(M);
  return (dot3(g, g).sqrt() - 1.0).abs().maxCoeff();
}

}  // namespace magel
