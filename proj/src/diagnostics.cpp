#include "magel/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magel/initial.hpp"

namespace magel {

namespace {

double gradient_sq(const SpectralField& f) { return l2_norm_sq(partial(f, 0)) + l2_norm_sq(partial(f, 1)); }

// int (sum_c g_c^2)^{p/2} on a grid of any size.
double lp_integral(const RealGridField& g, double p, double area) {
  RealGrid sq = RealGrid::Zero(g[0].rows(), g[0].cols());
  for (const auto& c : g) sq += c.square();
  return sq.pow(0.5 * p).sum() * area / static_cast<double>(sq.size());
}

double lp_norm(const RealGridField& g, double p, double area) { return std::pow(lp_integral(g, p, area), 1.0 / p); }

RealGridField concat(std::initializer_list<RealGridField> parts) {
  RealGridField out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// Nonzero modes of a set of fields, evaluated pointwise in closed form.
struct PointEvaluator {
  struct Mode {
    double kx, ky;
    Eigen::VectorXcd c;
  };
  std::vector<Mode> modes;
  int comps = 0;

  explicit PointEvaluator(const std::vector<SpectralField>& parts) {
    for (const auto& f : parts) comps += f.components();
    const Domain& d = parts.front().domain();
    for (int j = 0; j < d.n; ++j)
      for (int i = 0; i < d.n; ++i) {
        if (i == d.n / 2 || j == d.n / 2) continue;
        Eigen::VectorXcd c(comps);
        int k = 0;
        for (const auto& f : parts)
          for (int q = 0; q < f.components(); ++q) c(k++) = f[q](i, j);
        if (c.cwiseAbs().maxCoeff() == 0.0) continue;
        modes.push_back({d.kscale() * d.wavenumber(i), d.kscale() * d.wavenumber(j), c});
      }
  }

  double norm_sq(double x, double y) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(comps);
    for (const auto& m : modes) {
      const std::complex<double> e = std::polar(1.0, m.kx * x + m.ky * y);
      v += (m.c * e).real();
    }
    return v.squaredNorm();
  }
};

}  // namespace

EnergyRow energy_components(const SimState& s, const Problem& pb) {
  const ModelParams& p = pb.params;
  const Domain& d = s.domain();
  EnergyRow r;
  r.t = s.t;
  r.kinetic = 0.5 * s.v.squaredNorm();
  r.grad_m_sq = gradient_sq(s.M);
  r.lap_m_sq = l2_norm_sq(laplacian(s.M));
  r.exchange = p.a_exch * r.grad_m_sq;
  if (!pb.hext.is_zero()) {
    const int size = 2 * d.n;
    r.zeeman = -p.mu0 * l2_inner_grid(backward(s.M, size), pb.hext.sample(d, s.t, size), d.area());
  }
  r.elastic = p.elastic.c_e * l2_norm_sq(s.F);
  r.total = r.kinetic + r.exchange + r.zeeman + r.elastic;
  r.viscous = s.acc.viscous;
  r.regularization = s.acc.regularization;
  r.llg = s.acc.llg;
  r.external_work = s.acc.external_work;
  const ConstraintReport c = constraint_report(s, pb.basis);
  r.m_drift = c.unit_drift;
  r.div_norm = c.div_norm;
  return r;
}

std::string IedReport::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << "IED = " << total << " (kinetic " << kinetic << ", exchange " << exchange << ", elastic " << elastic
     << ", field " << field << ", field rate " << field_rate << ")";
  return os.str();
}

IedReport ied(const SimState& s0, const Problem& pb, double horizon) {
  if (!(horizon >= 0)) throw ConfigError("ied: horizon must be >= 0");
  IedReport r;
  r.kinetic = 0.5 * s0.v.squaredNorm();
  r.exchange = 0.5 * gradient_sq(s0.M);
  r.elastic = pb.params.elastic.c_e * l2_norm_sq(s0.F);
  r.field = 2.0 * pb.hext.sup_l1_norm(s0.domain(), horizon);
  r.field_rate = pb.hext.dt_l1_l1_norm(s0.domain(), horizon);
  r.total = r.kinetic + r.exchange + r.elastic + r.field + r.field_rate;
  return r;
}

double energy_balance_residual(std::vector<EnergyRow>& rows) {
  const size_t n = rows.size();
  if (n < 2) {
    for (auto& r : rows) r.balance_residual = 0.0;
    return 0.0;
  }
  double worst = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const size_t a = i == 0 ? 0 : i - 1;
    const size_t b = i + 1 == n ? n - 1 : i + 1;
    const double dt = rows[b].t - rows[a].t;
    rows[i].balance_residual = dt > 0 ? (rows[b].conserved() - rows[a].conserved()) / dt : 0.0;
    worst = std::max(worst, std::abs(rows[i].balance_residual));
  }
  return worst;
}

ConstraintReport constraint_report(const SimState& s, const VelocityBasis& basis) {
  ConstraintReport c;
  c.unit_drift = s.unit_norm_drift();
  const SpectralField v = basis.synthesize(s.v);
  c.div_norm = backward(divergence(v))[0].abs().maxCoeff();
  c.mean_norm = mean(v).norm();
  return c;
}

AprioriReport apriori_report(const std::vector<EnergyRow>& rows, double ied_value, double tolerance,
                             double measured_constant) {
  AprioriReport rep;
  rep.ied = ied_value;
  rep.measured_constant = measured_constant;
  rep.smallness = measured_constant * ied_value;
  double integral = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const EnergyRow& r = rows[i];
    if (i > 0) integral += 0.5 * (r.t - rows[i - 1].t) * (r.lap_m_sq + rows[i - 1].lap_m_sq);
    AprioriRow a;
    a.t = r.t;
    a.lhs = r.kinetic + 0.5 * r.grad_m_sq + r.elastic + r.regularization + r.viscous;
    a.exceeds = a.lhs > ied_value + tolerance;
    a.lap_m = std::sqrt(r.lap_m_sq);
    a.lap_m_sq_integral = integral;
    rep.max_lhs = std::max(rep.max_lhs, a.lhs);
    rep.any_exceeds = rep.any_exceeds || a.exceeds;
    rep.rows.push_back(a);
  }
  return rep;
}

std::string to_string(Inequality q) {
  switch (q) {
    case Inequality::ladyzhenskaya: return "ladyzhenskaya";
    case Inequality::gradient_l4: return "gradient_l4";
    case Inequality::w22_bound: return "w22_bound";
    case Inequality::gradient_l4_root: return "gradient_l4_root";
    case Inequality::gradient_l6: return "gradient_l6";
    case Inequality::agmon: return "agmon";
    case Inequality::laplacian_l4: return "laplacian_l4";
  }
  return "?";
}

double sup_norm(const std::vector<SpectralField>& parts) {
  if (parts.empty()) return 0.0;
  const Domain& d = parts.front().domain();
  const int size = std::max(64, 4 * d.n);
  RealGrid sq = RealGrid::Zero(size, size);
  for (const auto& f : parts)
    for (const auto& g : backward(f, size)) sq += g.square();
  const PointEvaluator eval(parts);
  if (eval.modes.empty()) return 0.0;

  // Grid local maxima, best first; a few are refined in case two peaks are close.
  std::vector<std::pair<double, std::pair<int, int>>> peaks;
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      const double v = sq(i, j);
      bool is_max = true;
      for (int dj = -1; dj <= 1 && is_max; ++dj)
        for (int di = -1; di <= 1; ++di)
          if ((di || dj) && sq((i + di + size) % size, (j + dj + size) % size) > v) {
            is_max = false;
            break;
          }
      if (is_max) peaks.push_back({v, {i, j}});
    }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double h0 = d.l / size;
  double best = sq.maxCoeff();
  for (size_t p = 0; p < std::min<size_t>(peaks.size(), 4); ++p) {
    double cx = peaks[p].second.first * h0, cy = peaks[p].second.second * h0;
    double value = eval.norm_sq(cx, cy);
    double h = h0;
    for (int zoom = 0; zoom < 8; ++zoom) {
      double bx = cx, by = cy;
      for (int b = -5; b <= 5; ++b)
        for (int a = -5; a <= 5; ++a) {
          const double x = cx + a * h / 5.0, y = cy + b * h / 5.0;
          const double v = eval.norm_sq(x, y);
          if (v > value) {
            value = v;
            bx = x;
            by = y;
          }
        }
      cx = bx;
      cy = by;
      h /= 5.0;
    }
    best = std::max(best, value);
  }
  return std::sqrt(best);
}

double sup_norm(const SpectralField& f) { return sup_norm(std::vector<SpectralField>{f}); }

std::array<std::optional<double>, kInequalityCount> inequality_ratios(const SpectralField& f) {
  const Domain& d = f.domain();
  const double area = d.area();
  const int size = 4 * d.n;
  const SpectralField fx = partial(f, 0), fy = partial(f, 1);
  const SpectralField lap = laplacian(f);
  const double nf = std::sqrt(l2_norm_sq(f));
  const double ng = std::sqrt(l2_norm_sq(fx) + l2_norm_sq(fy));
  const double n2 = std::sqrt(l2_norm_sq(partial(fx, 0)) + l2_norm_sq(partial(fx, 1)) + l2_norm_sq(partial(fy, 0)) +
                              l2_norm_sq(partial(fy, 1)));
  const double nl = std::sqrt(l2_norm_sq(lap));
  const SpectralField lx = partial(lap, 0), ly = partial(lap, 1);
  const double ngl = std::sqrt(l2_norm_sq(lx) + l2_norm_sq(ly));

  const RealGridField grad = concat({backward(fx, size), backward(fy, size)});

  std::array<std::optional<double>, kInequalityCount> r;
  auto put = [&](Inequality q, double lhs, double rhs) {
    if (rhs > 0 && std::isfinite(rhs)) r[static_cast<size_t>(q)] = lhs / rhs;
  };
  // Without a gradient part the left-hand sides of the gradient forms vanish too.
  put(Inequality::ladyzhenskaya, lp_norm(backward(f, size), 4, area), ng > 0 ? nf + std::sqrt(ng * nf) : 0.0);
  if (ng > 0) {
    const double g4 = lp_norm(grad, 4, area);
    put(Inequality::gradient_l4, std::pow(g4, 4), std::pow(ng, 4) + n2 * n2 * ng * ng);
    put(Inequality::gradient_l4_root, g4, std::sqrt(ng) * std::pow(ng * ng + nl * nl, 0.25));
    put(Inequality::gradient_l6, lp_norm(grad, 6, area), std::cbrt(ng) * std::cbrt(ng * ng + nl * nl));
    put(Inequality::agmon, sup_norm(std::vector<SpectralField>{fx, fy}),
        std::sqrt(ng) * std::pow(ng * ng + nl * nl + ngl * ngl, 0.25));
  }
  put(Inequality::w22_bound, std::sqrt(nf * nf + ng * ng + n2 * n2), std::sqrt(nf * nf + nl * nl));
  if (nl > 0)
    put(Inequality::laplacian_l4, lp_norm(backward(lap, size), 4, area),
        std::sqrt(nl) * std::pow(nl * nl + ngl * ngl, 0.25));
  return r;
}

RatioReport inequality_ratio_report(const std::vector<SpectralField>& fields) {
  RatioReport rep;
  for (const auto& f : fields) {
    const auto r = inequality_ratios(f);
    for (int q = 0; q < kInequalityCount; ++q) {
      const auto& v = r[static_cast<size_t>(q)];
      if (!v) continue;
      rep.max_ratio[static_cast<size_t>(q)] = std::max(rep.max_ratio[static_cast<size_t>(q)], *v);
      ++rep.evaluated[static_cast<size_t>(q)];
    }
  }
  return rep;
}

std::vector<SpectralField> inequality_sample(const Domain& d, int count, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::vector<SpectralField> out;
  out.reserve(static_cast<size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) out.push_back(random_field(d, Rank::vec3, kmax, rng, 1.0, true));
  return out;
}

}  // namespace magel
