// SPDX-License-Identifier: MIT
#include "aclab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace aclab {

DoubleWell make_twin_pit() {
  DoubleWell w;
  w.F = [](double u) { double q = 1.0 - u * u; return 0.25 * q * q; };
  w.dF = [](double u) { return u * u * u - u; };
  w.d2F = [](double u) { return 3.0 * u * u - 1.0; };
  w.d3F = [](double u) { return 6.0 * u; };
  w.quartic_twin_pit = true;
  return w;
}

namespace {

void fill_closed_form(HeteroclinicProfile& p, const std::vector<double>& grid,
                      std::vector<double>& w, std::vector<double>& dw,
                      std::vector<double>& d2w) {
  (void)p;
  const std::size_t n = grid.size();
  w.resize(n);
  dw.resize(n);
  d2w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::tanh(grid[i] / kSqrt2);
    w[i] = v;
    dw[i] = (1.0 - v * v) / kSqrt2;
    d2w[i] = v * v * v - v;
  }
}

void fill_by_ode(const DoubleWell& well, const std::vector<double>& grid,
                 std::vector<double>& w, std::vector<double>& dw,
                 std::vector<double>& d2w) {
  const double mid = 0.5 * (well.u_minus + well.u_plus);
  OdeRhs rhs = [&well](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy[0] = std::sqrt(std::max(2.0 * well.F(y[0]), 0.0));
  };
  // grid is symmetric around 0; split there and integrate outward so the
  // saturating tails never feed error back toward the core
  const std::size_t n = grid.size();
  const std::size_t midi = n / 2;
  std::vector<double> right(grid.begin() + static_cast<long>(midi), grid.end());
  std::vector<double> left(grid.begin(), grid.begin() + static_cast<long>(midi) + 1);
  std::reverse(left.begin(), left.end());
  OdeOptions opt;
  opt.max_step = 0.1;
  auto pr = ode45_path(rhs, {mid}, right, opt);
  auto pl = ode45_path(rhs, {mid}, left, opt);
  w.assign(n, 0.0);
  for (std::size_t i = 0; i < pr.size(); ++i) w[midi + i] = pr[i][0];
  for (std::size_t i = 0; i < pl.size(); ++i) w[midi - i] = pl[i][0];
  dw.resize(n);
  d2w.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::clamp(w[i], well.u_minus, well.u_plus);
    dw[i] = std::sqrt(std::max(2.0 * well.F(w[i]), 0.0));
    d2w[i] = well.dF(w[i]);
  }
}

}  // namespace

HeteroclinicProfile solve_heteroclinic(const DoubleWell& well, const ProfileOptions& opt) {
  if (std::abs(well.F(well.u_minus)) > 1e-12 || std::abs(well.F(well.u_plus)) > 1e-12 ||
      std::abs(well.F(well.u_minus) - well.F(well.u_plus)) > 1e-12) {
    throw std::invalid_argument("solve_heteroclinic: wells are not balanced at zero level");
  }
  HeteroclinicProfile p;
  p.dt = opt.dt;
  p.t = make_grid(-opt.t_max, opt.t_max, opt.dt);
  p.tp = make_grid(-opt.t_pad, opt.t_pad, opt.dt);
  p.u_minus = well.u_minus;
  p.u_plus = well.u_plus;
  p.sigma_minus = std::sqrt(std::max(well.d2F(well.u_minus), 0.0));
  p.sigma_plus = std::sqrt(std::max(well.d2F(well.u_plus), 0.0));
  p.closed_form = well.quartic_twin_pit && !opt.force_ode;
  if (p.closed_form) {
    fill_closed_form(p, p.t, p.w, p.dw, p.d2w);
    fill_closed_form(p, p.tp, p.wp, p.dwp, p.d2wp);
  } else {
    fill_by_ode(well, p.t, p.w, p.dw, p.d2w);
    fill_by_ode(well, p.tp, p.wp, p.dwp, p.d2wp);
  }
  return p;
}

double HeteroclinicProfile::w_at(double x) const {
  if (closed_form) return std::tanh(x / kSqrt2);
  if (x <= tp.front()) return u_minus;
  if (x >= tp.back()) return u_plus;
  return interp_cubic(wp, tp.front(), dt, x);
}

double HeteroclinicProfile::dw_at(double x) const {
  if (closed_form) {
    const double v = std::tanh(x / kSqrt2);
    return (1.0 - v * v) / kSqrt2;
  }
  if (x <= tp.front() || x >= tp.back()) return 0.0;
  return interp_cubic(dwp, tp.front(), dt, x);
}

double HeteroclinicProfile::d2w_at(double x) const {
  if (closed_form) {
    const double v = std::tanh(x / kSqrt2);
    return v * v * v - v;
  }
  if (x <= tp.front() || x >= tp.back()) return 0.0;
  return interp_cubic(d2wp, tp.front(), dt, x);
}

namespace {

// Shared variation-of-parameters machinery. Solves L0[psi] = src with
// psi = w'(t) G(t), G(t) = int_0^t J(tau)/w'(tau)^2, J(tau) = int src w'
// taken one-sidedly from the nearest infinity so the tails of J stay
// relatively accurate where w'^2 underflows toward zero.
Corrector build_corrector(const HeteroclinicProfile& p, const DoubleWell& well,
                          std::vector<double> src, bool odd) {
  const std::size_t n = p.tp.size();
  const std::size_t mid = n / 2;
  const double dt = p.dt;

  std::vector<double> srcw(n);
  for (std::size_t i = 0; i < n; ++i) srcw[i] = src[i] * p.dwp[i];
  const auto cells = cell_integrals(srcw, dt);

  // J from the left for t <= 0, from the right (negated) for t > 0
  std::vector<double> J(n, 0.0);
  for (std::size_t i = 1; i <= mid; ++i) J[i] = J[i - 1] + cells[i - 1];
  J[n - 1] = 0.0;
  for (std::size_t i = n - 2; i > mid; --i) J[i] = J[i + 1] - cells[i];
  // J[mid] from both sides differs by the full integral of src w', which is
  // zero by solvability; keep the left value.

  std::vector<double> gp(n);
  for (std::size_t i = 0; i < n; ++i) gp[i] = J[i] / (p.dwp[i] * p.dwp[i]);
  const auto G = cumulative_from_index(gp, dt, mid);

  Corrector c;
  c.t = p.tp;
  c.source = std::move(src);
  c.psi.resize(n);
  c.dpsi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.psi[i] = p.dwp[i] * G[i];
    // psi' = w'' G + w' g', both factors tabulated without differencing
    c.dpsi[i] = p.d2wp[i] * G[i] + p.dwp[i] * gp[i];
  }

  // exact symmetrization; the construction is symmetric up to roundoff
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    if (j < i) break;
    const double s = odd ? -1.0 : 1.0;
    const double a = 0.5 * (c.psi[i] + s * c.psi[j]);
    c.psi[i] = a;
    c.psi[j] = s * a;
    const double b = 0.5 * (c.dpsi[i] - s * c.dpsi[j]);  // dpsi has opposite parity
    c.dpsi[i] = b;
    c.dpsi[j] = -s * b;
  }

  const auto sw = simpson_weights(n, dt);
  auto pair_wprime = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sw[i] * f[i] * p.dwp[i];
    return s;
  };
  if (!odd) {
    // remove the kernel component so <psi1, w'> vanishes in this pairing
    double c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) c2 += sw[i] * p.dwp[i] * p.dwp[i];
    const double coeff = pair_wprime(c.psi) / c2;
    for (std::size_t i = 0; i < n; ++i) {
      c.psi[i] -= coeff * p.dwp[i];
      c.dpsi[i] -= coeff * p.d2wp[i];
    }
  }
  c.orth_wprime = pair_wprime(c.psi);

  const auto d2 = fd_d2(c.psi, dt);
  double rs = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    rs = std::max(rs, std::abs(d2[i] - well.d2F(p.wp[i]) * c.psi[i] - c.source[i]));
  }
  c.residual_sup = rs;
  return c;
}

}  // namespace

Corrector corrector_psi0(const HeteroclinicProfile& p, const DoubleWell& well) {
  std::vector<double> src(p.tp.size());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] = p.tp[i] * p.dwp[i];
  return build_corrector(p, well, std::move(src), /*odd=*/true);
}

Corrector corrector_psi1(const HeteroclinicProfile& p, const DoubleWell& well) {
  const std::size_t n = p.tp.size();
  const auto sw = simpson_weights(n, p.dt);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w2 = p.dwp[i] * p.dwp[i];
    num += sw[i] * p.tp[i] * p.tp[i] * w2;
    den += sw[i] * w2;
  }
  const double chat = num / den;  // discrete twin of kChat
  std::vector<double> src(n);
  for (std::size_t i = 0; i < n; ++i)
    src[i] = (p.tp[i] * p.tp[i] - chat) * p.dwp[i];
  return build_corrector(p, well, std::move(src), /*odd=*/false);
}

double Corrector::at(double x) const {
  if (t.empty() || x <= t.front() || x >= t.back()) return 0.0;
  return interp_cubic(psi, t.front(), t[1] - t[0], x);
}

double Corrector::d1_at(double x) const {
  if (t.empty() || x <= t.front() || x >= t.back()) return 0.0;
  return interp_cubic(dpsi, t.front(), t[1] - t[0], x);
}

ProjectionResult project_onto_wprime(const std::vector<double>& f,
                                     const HeteroclinicProfile& p) {
  if (f.size() != p.tp.size())
    throw std::invalid_argument("project_onto_wprime: sample f on the padded grid");
  const auto sw = simpson_weights(f.size(), p.dt);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += sw[i] * f[i] * p.dwp[i];
    den += sw[i] * p.dwp[i] * p.dwp[i];
  }
  ProjectionResult r;
  r.coeff = num / den;
  r.remainder.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) r.remainder[i] = f[i] - r.coeff * p.dwp[i];
  double chk = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) chk += sw[i] * r.remainder[i] * p.dwp[i];
  r.orth_check = chk;
  return r;
}

void write_profile_csv(const HeteroclinicProfile& p, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_profile_csv: cannot open " + path);
  os.precision(17);
  os << "t,w,dw,d2w\n";
  for (std::size_t i = 0; i < p.t.size(); ++i)
    os << p.t[i] << ',' << p.w[i] << ',' << p.dw[i] << ',' << p.d2w[i] << '\n';
}

}  // namespace aclab
