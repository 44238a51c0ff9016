// SPDX-License-Identifier: MIT
#include "aclab/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "aclab/numerics.hpp"

namespace aclab {

namespace {

long clampl(long v, long lo, long hi) { return std::max(lo, std::min(hi, v)); }

}  // namespace

double GridField::sup() const { return sup_abs(values); }

GridField make_grid_field(double s_min, double s_max, double ds, double t_min,
                          double t_max, double dt) {
  if (!(ds > 0.0) || !(dt > 0.0) || !(s_max > s_min) || !(t_max > t_min))
    throw std::invalid_argument("make_grid_field: bad rectangle");
  GridField g;
  g.s_min = s_min;
  g.t_min = t_min;
  g.ds = ds;
  g.dt = dt;
  g.ns = static_cast<std::size_t>(std::llround((s_max - s_min) / ds)) + 1;
  g.nt = static_cast<std::size_t>(std::llround((t_max - t_min) / dt)) + 1;
  g.s_max = g.s_of(g.ns - 1);
  g.t_max = g.t_of(g.nt - 1);
  g.values.assign(g.ns * g.nt, 0.0);
  return g;
}

GridField experiment_layout(double eps, double delta, double sigma_span,
                            double dsig, double dt, double t_cap) {
  if (!(eps > 0.0)) throw std::invalid_argument("experiment_layout: eps must be positive");
  const double t_span =
      dt * static_cast<double>(std::llround(std::min(delta / eps + 4.0, t_cap) / dt));
  return make_grid_field(-sigma_span / eps, sigma_span / eps, dsig / eps, -t_span,
                         t_span, dt);
}

double gf_interp(const GridField& g, double s, double t) {
  const long ns = static_cast<long>(g.ns), nt = static_cast<long>(g.nt);
  double ps = (s - g.s_min) / g.ds;
  double pt = (t - g.t_min) / g.dt;
  ps = std::min(std::max(ps, 0.0), static_cast<double>(ns - 1));
  pt = std::min(std::max(pt, 0.0), static_cast<double>(nt - 1));
  const bool snap_s = std::abs(ps - std::round(ps)) < 1e-9;
  const bool snap_t = std::abs(pt - std::round(pt)) < 1e-9;
  const auto vat = [&](long i, long j) {
    return g.values[static_cast<std::size_t>(clampl(i, 0, ns - 1)) * g.nt +
                    static_cast<std::size_t>(clampl(j, 0, nt - 1))];
  };
  const auto row_val = [&](long i) {
    if (snap_t) return vat(i, std::lround(pt));
    const long j0 = static_cast<long>(std::floor(pt));
    const double u = pt - static_cast<double>(j0);
    return catmull_rom(vat(i, j0 - 1), vat(i, j0), vat(i, j0 + 1), vat(i, j0 + 2), u);
  };
  if (snap_s) return row_val(std::lround(ps));
  const long i0 = static_cast<long>(std::floor(ps));
  const double u = ps - static_cast<double>(i0);
  return catmull_rom(row_val(i0 - 1), row_val(i0), row_val(i0 + 1), row_val(i0 + 2), u);
}

void fill_differences(GridField& g) {
  if (g.ns < 5 || g.nt < 5)
    throw std::invalid_argument("fill_differences: needs a 5x5 stencil");
  const std::size_t ns = g.ns, nt = g.nt, n = ns * nt;
  g.d_s.assign(n, 0.0);
  g.d_t.assign(n, 0.0);
  g.d_ss.assign(n, 0.0);
  g.d_st.assign(n, 0.0);
  g.d_tt.assign(n, 0.0);
  std::vector<double> line(nt);
  for (std::size_t i = 0; i < ns; ++i) {
    const auto base = static_cast<std::ptrdiff_t>(i * nt);
    std::copy(g.values.begin() + base, g.values.begin() + base + static_cast<std::ptrdiff_t>(nt),
              line.begin());
    const auto d1 = fd_d1(line, g.dt);
    const auto d2 = fd_d2(line, g.dt);
    std::copy(d1.begin(), d1.end(), g.d_t.begin() + base);
    std::copy(d2.begin(), d2.end(), g.d_tt.begin() + base);
  }
  std::vector<double> col(ns);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < ns; ++i) col[i] = g.values[i * nt + j];
    const auto d1 = fd_d1(col, g.ds);
    const auto d2 = fd_d2(col, g.ds);
    for (std::size_t i = 0; i < ns; ++i) {
      g.d_s[i * nt + j] = d1[i];
      g.d_ss[i * nt + j] = d2[i];
    }
    for (std::size_t i = 0; i < ns; ++i) col[i] = g.d_t[i * nt + j];
    const auto dm = fd_d1(col, g.ds);
    for (std::size_t i = 0; i < ns; ++i) g.d_st[i * nt + j] = dm[i];
  }
}

void write_grid_field(const GridField& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_grid_field: cannot open " + path);
  const char magic[4] = {'A', 'C', 'G', 'F'};
  const std::uint32_t version = 1;
  const std::uint64_t ns = g.ns, nt = g.nt;
  const double ext[6] = {g.s_min, g.s_max, g.t_min, g.t_max, g.ds, g.dt};
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&ns), sizeof ns);
  out.write(reinterpret_cast<const char*>(&nt), sizeof nt);
  out.write(reinterpret_cast<const char*>(ext), sizeof ext);
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write_grid_field: short write to " + path);
}

GridField read_grid_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_grid_field: cannot open " + path);
  char magic[4] = {0, 0, 0, 0};
  std::uint32_t version = 0;
  std::uint64_t ns = 0, nt = 0;
  double ext[6] = {0, 0, 0, 0, 0, 0};
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&ns), sizeof ns);
  in.read(reinterpret_cast<char*>(&nt), sizeof nt);
  in.read(reinterpret_cast<char*>(ext), sizeof ext);
  if (!in || std::memcmp(magic, "ACGF", 4) != 0 || version != 1)
    throw std::runtime_error("read_grid_field: bad header in " + path);
  if (ns == 0 || nt == 0 || ns * nt > (1ull << 31))
    throw std::runtime_error("read_grid_field: implausible extent in " + path);
  GridField g;
  g.s_min = ext[0];
  g.s_max = ext[1];
  g.t_min = ext[2];
  g.t_max = ext[3];
  g.ds = ext[4];
  g.dt = ext[5];
  g.ns = static_cast<std::size_t>(ns);
  g.nt = static_cast<std::size_t>(nt);
  g.values.resize(g.ns * g.nt);
  in.read(reinterpret_cast<char*>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_grid_field: truncated payload in " + path);
  return g;
}

double CutoffFamily::rho(double s) const { return delta / eps + c0 * std::abs(s); }

double CutoffFamily::zeta(int n, double s, double t) const {
  const double hh = disp ? disp->h(eps * s) : 0.0;
  return eta_step(std::abs(t + hh) - rho(s) + static_cast<double>(n));
}

CutoffFamily make_cutoffs(const FermiChart& chart, const Displacement& disp,
                          double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("make_cutoffs: eps must be positive");
  // the step must close at the tube edge and fall monotonically, so that a
  // larger offset n nests the support strictly deeper inside the tube
  if (eta_step(1.0) != 1.0 || eta_step(2.0) != 0.0 || eta_step(1.25) <= eta_step(1.75))
    throw std::logic_error("make_cutoffs: cutoff step direction violated");
  CutoffFamily c;
  c.eps = eps;
  c.delta = chart.delta;
  c.c0 = chart.c0;
  c.disp = &disp;
  return c;
}

GridField build_v0(const HeteroclinicProfile& p, const GridField& layout) {
  GridField g = layout;
  std::vector<double> col(g.nt);
  for (std::size_t j = 0; j < g.nt; ++j) col[j] = p.w_at(g.t_of(j));
  for (std::size_t i = 0; i < g.ns; ++i)
    std::copy(col.begin(), col.end(),
              g.values.begin() + static_cast<std::ptrdiff_t>(i * g.nt));
  return g;
}

GridField build_phi1(const Corrector& psi0, const Corrector& psi1,
                     const PulledBackPotential& pb, double eps,
                     const GridField& layout) {
  GridField g = layout;
  const double e2 = eps * eps, e3 = e2 * eps;
  std::vector<double> p0(g.nt), p1(g.nt);
  for (std::size_t j = 0; j < g.nt; ++j) {
    p0[j] = psi0.at(g.t_of(j));
    p1[j] = psi1.at(g.t_of(j));
  }
  for (std::size_t i = 0; i < g.ns; ++i) {
    const CurveFieldData d = pb.on_curve(eps * g.s_of(i));
    const double c2 = -e2 * d.Qjac;  // eps^2 [2k^2 - d_zz a/a]
    const double c3 = e3 * d.C0hat;  // eps^3 [k^3 + r2/2]
    double* row = g.values.data() + i * g.nt;
    for (std::size_t j = 0; j < g.nt; ++j) row[j] = c2 * p0[j] - c3 * p1[j];
  }
  return g;
}

GridField gf_add(const GridField& a, const GridField& b) {
  if (a.ns != b.ns || a.nt != b.nt || std::abs(a.ds - b.ds) > 1e-12 ||
      std::abs(a.dt - b.dt) > 1e-12 || std::abs(a.s_min - b.s_min) > 1e-12 ||
      std::abs(a.t_min - b.t_min) > 1e-12)
    throw std::invalid_argument("gf_add: incompatible rectangles");
  GridField g = a;
  g.d_s.clear();
  g.d_t.clear();
  g.d_ss.clear();
  g.d_st.clear();
  g.d_tt.clear();
  for (std::size_t m = 0; m < g.values.size(); ++m) g.values[m] += b.values[m];
  return g;
}

double GlobalApproximation::side_sign(Vec2 p) const {
  const PlanarCurve& c = chart->chart->curve;
  const double x = std::clamp(p.x, -c.x_max(), c.x_max());
  const double sg = c.arclength_of_x(x);
  const Vec2 d = p - c.gamma(sg);
  return dot(d, c.normal(sg)) >= 0.0 ? 1.0 : -1.0;
}

GlobalApproximation::Eval GlobalApproximation::operator()(Vec2 p) const {
  Eval e;
  const auto inv = chart->inverse(p);
  if (inv.converged && inv.inside) {
    e.in_chart = true;
    e.s = inv.s;
    e.t = inv.t;
    const double hh = chart->disp->h(chart->eps * inv.s);
    const double side = (inv.t + hh >= 0.0) ? 1.0 : -1.0;
    const double z3 = cutoffs.zeta(3, inv.s, inv.t);
    double v1v = side;
    if (z3 > 0.0) {
      const bool in_rect = inv.s >= v1->s_min && inv.s <= v1->s_max &&
                           inv.t >= v1->t_min && inv.t <= v1->t_max;
      // past the sampled rectangle only the profile tail survives; the
      // corrector part is below the seam tolerance there
      v1v = in_rect ? gf_interp(*v1, inv.s, inv.t) : profile->w_at(inv.t);
    }
    e.value = z3 * v1v + (1.0 - z3) * side;
  } else {
    e.value = side_sign(p);
  }
  return e;
}

GlobalApproximation build_global(const GridField& v1, const DilatedChart& chart,
                                 const CutoffFamily& cutoffs,
                                 const HeteroclinicProfile& profile) {
  GlobalApproximation g;
  g.chart = &chart;
  g.profile = &profile;
  g.v1 = &v1;
  g.cutoffs = cutoffs;
  return g;
}

double WeightK::operator()(Vec2 x) const {
  const double far = std::exp(b1 * std::abs(x.x) + b2 * std::abs(x.y));
  const auto inv = chart->inverse(x);
  if (!(inv.converged && inv.inside)) return far;
  const double z2 = cutoffs.zeta(2, inv.s, inv.t);
  if (z2 == 0.0) return far;
  const double core = std::exp(0.5 * sigma * std::abs(inv.t)) *
                      std::pow(1.0 + std::abs(chart->eps * inv.s), mu);
  return z2 * core + (1.0 - z2) * far;
}

WeightK make_weight(const DilatedChart& chart, const CutoffFamily& cutoffs,
                    double sigma, double mu, double b1, double b2) {
  if (!(b1 > 0.0) || !(b2 > 0.0) || b1 * b1 + b2 * b2 >= 0.5 * (kSqrt2 - 0.1))
    throw std::invalid_argument("make_weight: plane rates violate b1^2+b2^2 < (sqrt2-tau)/2");
  if (!(sigma > 0.0) || sigma >= kSqrt2 || mu < 0.0)
    throw std::invalid_argument("make_weight: interface rates out of range");
  WeightK k;
  k.sigma = sigma;
  k.mu = mu;
  k.b1 = b1;
  k.b2 = b2;
  k.chart = &chart;
  k.cutoffs = cutoffs;
  return k;
}

namespace {

// max over the rectangle window [i-hws,i+hws] x [j-hwt,j+hwt], two
// separable passes
std::vector<double> window_max_2d(const std::vector<double>& v, std::size_t ns,
                                  std::size_t nt, std::size_t hws, std::size_t hwt) {
  std::vector<double> tmp(ns * nt), out(ns * nt);
  std::vector<double> line(nt);
  for (std::size_t i = 0; i < ns; ++i) {
    const auto base = static_cast<std::ptrdiff_t>(i * nt);
    std::copy(v.begin() + base, v.begin() + base + static_cast<std::ptrdiff_t>(nt),
              line.begin());
    const auto wm = window_max(line, hwt);
    std::copy(wm.begin(), wm.end(), tmp.begin() + base);
  }
  std::vector<double> col(ns);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < ns; ++i) col[i] = tmp[i * nt + j];
    const auto wm = window_max(col, hws);
    for (std::size_t i = 0; i < ns; ++i) out[i * nt + j] = wm[i];
  }
  return out;
}

// Hoelder quotients anchored at each node, over dyadic axis separations up
// to twice the window; separations in physical units nest across grid
// refinement, which keeps the surrogate stable
std::vector<double> dyadic_quotients(const WeightedNorm2D& n, const GridField& g,
                                     std::size_t hws, std::size_t hwt) {
  struct Sep {
    std::size_t d;
    double inv;
  };
  std::vector<Sep> in_t, in_s;
  for (std::size_t d = 1; d <= 2 * hwt; d *= 2)
    in_t.push_back({d, 1.0 / std::pow(static_cast<double>(d) * g.dt, n.lambda)});
  for (std::size_t d = 1; d <= 2 * hws; d *= 2)
    in_s.push_back({d, 1.0 / std::pow(static_cast<double>(d) * g.ds, n.lambda)});
  std::vector<double> q(g.ns * g.nt, 0.0);
  for (std::size_t i = 0; i < g.ns; ++i) {
    for (std::size_t j = 0; j < g.nt; ++j) {
      const double v = g.at(i, j);
      double m = 0.0;
      for (const auto& sp : in_t)
        if (j + sp.d < g.nt) m = std::max(m, std::abs(g.at(i, j + sp.d) - v) * sp.inv);
      for (const auto& sp : in_s)
        if (i + sp.d < g.ns) m = std::max(m, std::abs(g.at(i + sp.d, j) - v) * sp.inv);
      q[i * g.nt + j] = m;
    }
  }
  return q;
}

struct WeightTables {
  std::vector<double> ws, wt;
};

WeightTables weight_tables(const WeightedNorm2D& n, const GridField& g) {
  WeightTables w;
  w.ws.resize(g.ns);
  w.wt.resize(g.nt);
  for (std::size_t i = 0; i < g.ns; ++i)
    w.ws[i] = std::pow(1.0 + std::abs(n.eps * g.s_of(i)), n.mu);
  for (std::size_t j = 0; j < g.nt; ++j)
    w.wt[j] = std::exp(n.sigma * std::abs(g.t_of(j)));
  return w;
}

GridField with_values(const GridField& like, const std::vector<double>& vals) {
  GridField f;
  f.s_min = like.s_min;
  f.s_max = like.s_max;
  f.t_min = like.t_min;
  f.t_max = like.t_max;
  f.ds = like.ds;
  f.dt = like.dt;
  f.ns = like.ns;
  f.nt = like.nt;
  f.values = vals;
  return f;
}

}  // namespace

double weighted_sup_norm_2d(const WeightedNorm2D& n, const GridField& g) {
  const auto w = weight_tables(n, g);
  double p = 0.0;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nt; ++j)
      p = std::max(p, w.ws[i] * w.wt[j] * std::abs(g.at(i, j)));
  return p;
}

double weighted_c0l_norm_2d(const WeightedNorm2D& n, const GridField& g) {
  const auto hwt = static_cast<std::size_t>(std::lround(n.window / g.dt));
  const auto hws = static_cast<std::size_t>(std::lround(n.window / g.ds));
  std::vector<double> absg(g.values.size());
  for (std::size_t m = 0; m < absg.size(); ++m) absg[m] = std::abs(g.values[m]);
  const auto wsup = window_max_2d(absg, g.ns, g.nt, hws, hwt);
  const auto wq =
      window_max_2d(dyadic_quotients(n, g, hws, hwt), g.ns, g.nt, hws, hwt);
  const auto w = weight_tables(n, g);
  double p = 0.0;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nt; ++j)
      p = std::max(p, w.ws[i] * w.wt[j] * (wsup[i * g.nt + j] + wq[i * g.nt + j]));
  return p;
}

double weighted_c2l_norm_2d(const WeightedNorm2D& n, const GridField& g) {
  GridField tmp = g;
  fill_differences(tmp);
  const double second =
      std::max({weighted_c0l_norm_2d(n, with_values(g, tmp.d_ss)),
                weighted_c0l_norm_2d(n, with_values(g, tmp.d_st)),
                weighted_c0l_norm_2d(n, with_values(g, tmp.d_tt))});
  const double first = std::max(weighted_sup_norm_2d(n, with_values(g, tmp.d_s)),
                                weighted_sup_norm_2d(n, with_values(g, tmp.d_t)));
  return second + first + weighted_sup_norm_2d(n, g);
}

}  // namespace aclab
