// SPDX-License-Identifier: MIT
#include "aclab/residual.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace aclab {

namespace {

// sigma-only data of one grid column.
struct ColumnData {
  double sigma = 0, h = 0, hp = 0, hpp = 0, k = 0, dk = 0;
};

ColumnData column_data(const LayerProblem& lp, double s) {
  ColumnData c;
  c.sigma = lp.eps * s;
  c.h = lp.disp->h(c.sigma);
  c.hp = lp.disp->dh(c.sigma);
  c.hpp = lp.disp->d2h(c.sigma);
  c.k = lp.chart->curve.curvature(c.sigma);
  c.dk = lp.chart->curve.curvature_ds(c.sigma);
  return c;
}

OperatorCoeffs exact_from_column(const LayerProblem& lp, const ColumnData& c,
                                 double t) {
  const double eps = lp.eps;
  const double tb = t + c.h;
  const double z = eps * tb;
  const double J = 1.0 + z * c.k;
  if (J < 0.05)
    throw std::runtime_error("exact_coeffs: chart jacobian degenerate");
  const double J2 = J * J;
  const double a = lp.pb->at(c.sigma, z);
  const double Sa = lp.pb->dsigma(c.sigma, z) / a;
  const double Ta = lp.pb->dz(c.sigma, z) / a;

  OperatorCoeffs o;
  o.c_tt = 1.0 + eps * eps * c.hp * c.hp / J2;
  o.c_st = -2.0 * eps * c.hp / J2;
  o.c_ss = 1.0 / J2;
  // the two first-order pieces that ride D1 = d_s - eps h' d_t
  const double drift_s = -eps * eps * tb * c.dk / (J2 * J) + eps * Sa / J2;
  o.c_s = drift_s;
  o.c_t = -eps * eps * c.hpp / J2 + eps * c.k / J + eps * Ta -
          eps * c.hp * drift_s;
  return o;
}

OperatorCoeffs expanded_from_data(const CurveFieldData& d, double eps,
                                  double t, const ColumnData& c, int order) {
  if (order != 2 && order != 3)
    throw std::invalid_argument("expanded_coeffs: order must be 2 or 3");
  const double tb = t + c.h;
  OperatorCoeffs o;
  o.c_tt = 1.0 + eps * eps * c.hp * c.hp;
  o.c_st = -2.0 * eps * c.hp;
  o.c_ss = 1.0;
  o.c_s = eps * d.b;
  o.c_t = -eps * eps * c.hpp - eps * c.hp * (eps * d.b) +
          eps * eps * tb * d.Q;
  if (order == 3) {
    const double ea = eps * tb * d.A0;
    o.c_ss += ea;
    o.c_st += ea * (-2.0 * eps * c.hp);
    o.c_tt += ea * (eps * eps * c.hp * c.hp);
    o.c_t += ea * (-eps * eps * c.hpp);
    const double eb = eps * eps * tb * d.B0hat;
    o.c_s += eb;
    o.c_t += -eps * c.hp * eb;
    o.c_t += eps * eps * eps * tb * tb * d.C0hat;
  }
  return o;
}

void require_caches(const GridField& v, const char* who) {
  if (v.d_tt.size() != v.values.size() || v.values.empty())
    throw std::invalid_argument(std::string(who) +
                                ": call fill_differences(v) first");
}

double stencil_apply(const OperatorCoeffs& o, const GridField& v,
                     std::size_t m) {
  return o.c_tt * v.d_tt[m] + o.c_st * v.d_st[m] + o.c_ss * v.d_ss[m] +
         o.c_t * v.d_t[m] + o.c_s * v.d_s[m];
}

// One node of the chart-free operator; derivatives in dilated variables.
double oracle_node(const LayerProblem& lp, const DilatedChart& dc,
                   const std::function<double(Vec2)>& v, double s, double t,
                   double step, bool with_fprime) {
  const PotentialField& f = lp.pb->field();
  const Vec2 x0 = dc.forward(s, t);
  const double dx = lp.eps * step;
  const double vc = v(x0);
  const double ve = v({x0.x + dx, x0.y});
  const double vw = v({x0.x - dx, x0.y});
  const double vn = v({x0.x, x0.y + dx});
  const double vs = v({x0.x, x0.y - dx});
  const double lap_x = (ve + vw + vn + vs - 4.0 * vc) / (dx * dx);
  const Vec2 grad_x = {(ve - vw) / (2.0 * dx), (vn - vs) / (2.0 * dx)};
  const Vec2 ga = f.grad(x0);
  const double e2 = lp.eps * lp.eps;
  double r = e2 * (lap_x + dot(ga, grad_x) / f.a(x0));
  if (with_fprime) r -= lp.well->dF(vc);
  return r;
}

struct Band {
  std::size_t i_lo = 0, i_hi = 0, j_lo = 0, j_hi = 0;  // half-open
};

Band interior_band(const GridField& g, std::size_t band) {
  const std::size_t bi = std::min(band, g.ns > 1 ? (g.ns - 1) / 2 : 0);
  const std::size_t bj = std::min(band, g.nt > 1 ? (g.nt - 1) / 2 : 0);
  return {bi, g.ns - bi, bj, g.nt - bj};
}

}  // namespace

OperatorCoeffs exact_coeffs(const LayerProblem& lp, double s, double t) {
  return exact_from_column(lp, column_data(lp, s), t);
}

OperatorCoeffs expanded_coeffs(const LayerProblem& lp, double s, double t,
                               int order) {
  const ColumnData c = column_data(lp, s);
  return expanded_from_data(lp.pb->on_curve(c.sigma), lp.eps, t, c, order);
}

GridField apply_fermi_exact(const LayerProblem& lp, const GridField& v,
                            bool with_fprime) {
  require_caches(v, "apply_fermi_exact");
  GridField out = v;
  out.d_s.clear(); out.d_t.clear(); out.d_ss.clear(); out.d_st.clear();
  out.d_tt.clear();
  for (std::size_t i = 0; i < v.ns; ++i) {
    const ColumnData c = column_data(lp, v.s_of(i));
    for (std::size_t j = 0; j < v.nt; ++j) {
      const std::size_t m = i * v.nt + j;
      const OperatorCoeffs o = exact_from_column(lp, c, v.t_of(j));
      double r = stencil_apply(o, v, m);
      if (with_fprime) r -= lp.well->dF(v.values[m]);
      out.values[m] = r;
    }
  }
  return out;
}

GridField apply_fermi_expanded(const LayerProblem& lp, const GridField& v,
                               int order, bool with_fprime) {
  require_caches(v, "apply_fermi_expanded");
  GridField out = v;
  out.d_s.clear(); out.d_t.clear(); out.d_ss.clear(); out.d_st.clear();
  out.d_tt.clear();
  for (std::size_t i = 0; i < v.ns; ++i) {
    const ColumnData c = column_data(lp, v.s_of(i));
    const CurveFieldData d = lp.pb->on_curve(c.sigma);
    for (std::size_t j = 0; j < v.nt; ++j) {
      const std::size_t m = i * v.nt + j;
      const OperatorCoeffs o =
          expanded_from_data(d, lp.eps, v.t_of(j), c, order);
      double r = stencil_apply(o, v, m);
      if (with_fprime) r -= lp.well->dF(v.values[m]);
      out.values[m] = r;
    }
  }
  return out;
}

GridField euclidean_oracle(const LayerProblem& lp,
                           const std::function<double(Vec2)>& v,
                           const GridField& layout, double step,
                           bool with_fprime) {
  if (step <= 0.0)
    throw std::invalid_argument("euclidean_oracle: step must be positive");
  const DilatedChart dc = dilated_chart(*lp.chart, *lp.disp, lp.eps);
  GridField out = layout;
  out.d_s.clear(); out.d_t.clear(); out.d_ss.clear(); out.d_st.clear();
  out.d_tt.clear();
  for (std::size_t i = 0; i < layout.ns; ++i) {
    const double s = layout.s_of(i);
    for (std::size_t j = 0; j < layout.nt; ++j)
      out.values[i * layout.nt + j] =
          oracle_node(lp, dc, v, s, layout.t_of(j), step, with_fprime);
  }
  return out;
}

ProjectionPi projection_pi(const GridField& sv,
                           const HeteroclinicProfile& prof, double eps) {
  ProjectionPi r;
  const std::vector<double> sw = simpson_weights(sv.nt, sv.dt);
  std::vector<double> wp(sv.nt);
  for (std::size_t j = 0; j < sv.nt; ++j) wp[j] = prof.dw_at(sv.t_of(j));
  // outermost decile on each end, for the truncation report
  const std::size_t tail_n = std::max<std::size_t>(1, sv.nt / 10);
  r.s.resize(sv.ns);
  r.sigma.resize(sv.ns);
  r.value.resize(sv.ns);
  double sup = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < sv.ns; ++i) {
    double acc = 0.0, tacc = 0.0;
    for (std::size_t j = 0; j < sv.nt; ++j) {
      const double c = sw[j] * sv.values[i * sv.nt + j] * wp[j];
      acc += c;
      if (j < tail_n || j >= sv.nt - tail_n) tacc += c;
    }
    r.s[i] = sv.s_of(i);
    r.sigma[i] = eps * sv.s_of(i);
    r.value[i] = acc;
    sup = std::max(sup, std::abs(acc));
    tail = std::max(tail, std::abs(tacc));
  }
  r.tail_fraction = tail / std::max(sup, 1e-300);
  r.tail_ok = tail <= 1e-12 || r.tail_fraction <= 1e-3;
  return r;
}

double jacobi_bracket(const LayerProblem& lp, double sigma) {
  const CurveFieldData d = lp.pb->on_curve(sigma);
  return lp.disp->d2h(sigma) + d.b * lp.disp->dh(sigma) -
         d.Qjac * lp.disp->h(sigma);
}

GridField predicted_sv0_main(const LayerProblem& lp,
                             const HeteroclinicProfile& prof,
                             const GridField& layout) {
  GridField out = layout;
  const double e2 = lp.eps * lp.eps;
  for (std::size_t i = 0; i < layout.ns; ++i) {
    const double sigma = lp.eps * layout.s_of(i);
    const CurveFieldData d = lp.pb->on_curve(sigma);
    const double jb = jacobi_bracket(lp, sigma);
    const double hp = lp.disp->dh(sigma);
    for (std::size_t j = 0; j < layout.nt; ++j) {
      const double t = layout.t_of(j);
      out.values[i * layout.nt + j] =
          e2 * ((-jb + d.Qjac * t) * prof.dw_at(t) +
                hp * hp * prof.d2w_at(t));
    }
  }
  return out;
}

GridField predicted_sv1_main(const LayerProblem& lp,
                             const HeteroclinicProfile& prof,
                             const Corrector& psi0, const GridField& layout) {
  GridField out = layout;
  const double eps = lp.eps;
  for (std::size_t i = 0; i < layout.ns; ++i) {
    const double sigma = eps * layout.s_of(i);
    const CurveFieldData d = lp.pb->on_curve(sigma);
    const double jb = jacobi_bracket(lp, sigma);
    const double h = lp.disp->h(sigma);
    const double hpp = lp.disp->d2h(sigma);
    for (std::size_t j = 0; j < layout.nt; ++j) {
      const double t = layout.t_of(j);
      const double wp = prof.dw_at(t);
      out.values[i * layout.nt + j] =
          eps * eps * (-jb) * wp +
          eps * eps * eps *
              (d.C0hat * kChat * wp - (t + h) * d.A0 * hpp * wp) +
          eps * eps * eps * eps * d.Qjac * psi0.d1_at(t) * hpp;
    }
  }
  return out;
}

GridField residual_r0(const LayerProblem& lp, const HeteroclinicProfile& prof,
                      const Corrector& psi0, const GridField& sv0,
                      const GridField& sv1) {
  GridField out = sv1;
  const double eps = lp.eps;
  for (std::size_t i = 0; i < sv1.ns; ++i) {
    const double sigma = eps * sv1.s_of(i);
    const CurveFieldData d = lp.pb->on_curve(sigma);
    const double hpp = lp.disp->d2h(sigma);
    for (std::size_t j = 0; j < sv1.nt; ++j) {
      const std::size_t m = i * sv1.nt + j;
      const double t = sv1.t_of(j);
      const double wp = prof.dw_at(t);
      out.values[m] = sv1.values[m] - sv0.values[m] +
                      eps * eps * d.Qjac * t * wp +
                      eps * eps * eps * d.C0hat * (t * t - kChat) * wp -
                      eps * eps * eps * eps * d.Qjac * psi0.d1_at(t) * hpp;
    }
  }
  return out;
}

GridField residual_r1(const LayerProblem& lp, const HeteroclinicProfile& prof,
                      const Corrector& psi0, const GridField& sv1) {
  const GridField main = predicted_sv1_main(lp, prof, psi0, sv1);
  GridField out = sv1;
  for (std::size_t m = 0; m < out.values.size(); ++m)
    out.values[m] = sv1.values[m] - main.values[m];
  return out;
}

double interior_sup(const GridField& g, std::size_t band) {
  const Band b = interior_band(g, band);
  double sup = 0.0;
  for (std::size_t i = b.i_lo; i < b.i_hi; ++i)
    for (std::size_t j = b.j_lo; j < b.j_hi; ++j)
      sup = std::max(sup, std::abs(g.values[i * g.nt + j]));
  return sup;
}

double weighted_interior_sup(const GridField& g, double sigma_t,
                             std::size_t band) {
  const Band b = interior_band(g, band);
  double sup = 0.0;
  for (std::size_t j = b.j_lo; j < b.j_hi; ++j) {
    const double w = std::exp(sigma_t * std::abs(g.t_of(j)));
    for (std::size_t i = b.i_lo; i < b.i_hi; ++i)
      sup = std::max(sup, w * std::abs(g.values[i * g.nt + j]));
  }
  return sup;
}

double fitted_t_decay(const GridField& g, std::size_t band) {
  const Band b = interior_band(g, band);
  // least squares of log(column max) against |t| on 2 <= |t| <= t_max - 1
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (std::size_t j = b.j_lo; j < b.j_hi; ++j) {
    const double at = std::abs(g.t_of(j));
    if (at < 2.0 || at > g.t_max - 1.0) continue;
    double m = 0.0;
    for (std::size_t i = b.i_lo; i < b.i_hi; ++i)
      m = std::max(m, std::abs(g.values[i * g.nt + j]));
    if (m < 1e-290) continue;
    const double y = std::log(m);
    sx += at; sy += y; sxx += at * at; sxy += at * y; n += 1.0;
  }
  if (n < 3.0) return 0.0;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return -(n * sxy - sx * sy) / denom;
}

std::vector<ScalingRow> scaling_study(
    const std::vector<ScalingQuantity>& quantities,
    const std::vector<double>& eps_list) {
  std::vector<double> eps = eps_list;
  std::sort(eps.begin(), eps.end(), std::greater<double>());
  std::vector<ScalingRow> rows;
  rows.reserve(quantities.size());
  for (const auto& q : quantities) {
    ScalingRow r;
    r.name = q.name;
    r.eps = eps;
    r.sup.reserve(eps.size());
    for (double e : eps) r.sup.push_back(q.measure(e));
    r.all_zero = std::all_of(r.sup.begin(), r.sup.end(),
                             [](double v) { return std::abs(v) < 1e-299; });
    r.fit = fit_loglog(r.eps, r.sup);
    r.monotone = r.fit.monotone;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_scaling_csv(const std::vector<ScalingRow>& rows,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_scaling_csv: cannot open " + path);
  os.precision(17);
  os << "quantity,eps,sup,slope,monotone\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.eps.size(); ++k) {
      os << r.name << ',' << r.eps[k] << ',' << r.sup[k] << ',';
      if (r.all_zero)
        os << "exact-zero";
      else if (!r.monotone)
        os << "unordered";
      else
        os << r.fit.slope;
      os << ',' << (r.monotone ? 1 : 0) << '\n';
    }
  }
}

SeamError seam_error(const LayerProblem& lp, const GlobalApproximation& glob,
                     const GridField& sv1, const CutoffFamily& cuts,
                     double step) {
  SeamError se;
  se.scale = std::exp(-kSqrt2 * (cuts.rho(0.0) - 2.0));
  const DilatedChart dc = dilated_chart(*lp.chart, *lp.disp, lp.eps);
  const std::function<double(Vec2)> ev = [&glob](Vec2 p) {
    return glob(p).value;
  };
  const std::size_t stride = std::max<std::size_t>(1, sv1.ns / 64);
  for (std::size_t i = 1; i + 1 < sv1.ns; i += stride) {
    const double s = sv1.s_of(i);
    const double h = lp.disp->h(lp.eps * s);
    const double rho = cuts.rho(s);
    for (std::size_t j = 0; j < sv1.nt; ++j) {
      const double tb = sv1.t_of(j) + h;
      if (std::abs(tb) < rho - 2.0 || std::abs(tb) > rho - 1.0) continue;
      const double z3 = cuts.zeta(3, s, sv1.t_of(j));
      const double e =
          oracle_node(lp, dc, ev, s, sv1.t_of(j), step, true) -
          z3 * sv1.values[i * sv1.nt + j];
      se.sup = std::max(se.sup, std::abs(e));
      ++se.samples;
    }
  }
  return se;
}

}  // namespace aclab
