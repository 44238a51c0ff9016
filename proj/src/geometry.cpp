// SPDX-License-Identifier: MIT
#include "aclab/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace aclab {

PlanarCurve PlanarCurve::from_graph(CurveKind kind, double param, double x_max) {
  GraphData d;
  switch (kind) {
    case CurveKind::Line:
      d.f = [](double) { return 0.0; };
      d.f1 = [](double) { return 0.0; };
      d.f2 = [](double) { return 0.0; };
      d.f3 = [](double) { return 0.0; };
      d.f4 = [](double) { return 0.0; };
      break;
    case CurveKind::Hyperbola: {
      const double w2 = param * param;
      d.f = [w2](double x) { return std::sqrt(1.0 + w2 * x * x); };
      d.f1 = [w2](double x) { return w2 * x / std::sqrt(1.0 + w2 * x * x); };
      d.f2 = [w2](double x) {
        const double f = std::sqrt(1.0 + w2 * x * x);
        return w2 / (f * f * f);
      };
      d.f3 = [w2](double x) {
        const double f = std::sqrt(1.0 + w2 * x * x);
        return -3.0 * w2 * w2 * x / std::pow(f, 5);
      };
      d.f4 = [w2](double x) {
        const double f2 = 1.0 + w2 * x * x;
        return -3.0 * w2 * w2 * (1.0 - 4.0 * w2 * x * x) / std::pow(f2, 3.5);
      };
      break;
    }
    case CurveKind::TanhGraph:
      d.f = [](double x) { return std::tanh(x); };
      d.f1 = [](double x) { const double v = std::tanh(x); return 1.0 - v * v; };
      d.f2 = [](double x) {
        const double v = std::tanh(x);
        return -2.0 * v * (1.0 - v * v);
      };
      d.f3 = [](double x) {
        const double v = std::tanh(x);
        return -2.0 * (1.0 - v * v) * (1.0 - 3.0 * v * v);
      };
      d.f4 = [](double x) {
        const double v = std::tanh(x);
        return 8.0 * v * (1.0 - v * v) * (2.0 - 3.0 * v * v);
      };
      break;
    case CurveKind::Catenary:
      d.f = [](double x) { return std::cosh(x); };
      d.f1 = [](double x) { return std::sinh(x); };
      d.f2 = [](double x) { return std::cosh(x); };
      d.f3 = [](double x) { return std::sinh(x); };
      d.f4 = [](double x) { return std::cosh(x); };
      break;
    case CurveKind::Custom:
      throw std::invalid_argument("from_graph: Custom needs explicit GraphData");
  }
  PlanarCurve c = from_graph(std::move(d), x_max);
  c.kind_ = kind;
  c.param_ = param;
  return c;
}

PlanarCurve PlanarCurve::from_graph(GraphData data, double x_max) {
  PlanarCurve c;
  c.kind_ = CurveKind::Custom;
  c.d_ = std::move(data);
  c.xmax_ = x_max;
  c.build_arclength_table();
  return c;
}

void PlanarCurve::build_arclength_table() {
  const auto xs = make_grid(-xmax_, xmax_, dx_);
  auto q = [this](double x) {
    const double g = d_.f1(x);
    return std::sqrt(1.0 + g * g);
  };
  const std::size_t n = xs.size();
  std::vector<double> cells(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) cells[i] = gauss5(q, xs[i], xs[i + 1]);
  sacc_.assign(n, 0.0);
  const std::size_t mid = n / 2;  // x = 0
  for (std::size_t i = mid; i + 1 < n; ++i) sacc_[i + 1] = sacc_[i] + cells[i];
  for (std::size_t i = mid; i > 0; --i) sacc_[i - 1] = sacc_[i] - cells[i - 1];
}

double PlanarCurve::arclength_of_x(double x) const {
  x = std::clamp(x, -xmax_, xmax_);
  const double pos = (x + xmax_) / dx_;
  auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                               static_cast<double>(sacc_.size() - 1)));
  const double xi = -xmax_ + static_cast<double>(i) * dx_;
  auto q = [this](double u) {
    const double g = d_.f1(u);
    return std::sqrt(1.0 + g * g);
  };
  return sacc_[i] + ((x == xi) ? 0.0 : gauss5(q, xi, x));
}

double PlanarCurve::x_of_arclength(double s) const {
  s = std::clamp(s, sacc_.front(), sacc_.back());
  const auto it = std::lower_bound(sacc_.begin(), sacc_.end(), s);
  std::size_t i = (it == sacc_.begin()) ? 0 : static_cast<std::size_t>(it - sacc_.begin() - 1);
  double x = -xmax_ + static_cast<double>(i) * dx_;
  for (int iter = 0; iter < 40; ++iter) {
    const double g = d_.f1(x);
    const double q = std::sqrt(1.0 + g * g);
    const double err = arclength_of_x(x) - s;
    if (std::abs(err) < 1e-13 * (1.0 + std::abs(s))) break;
    x -= err / q;
    x = std::clamp(x, -xmax_, xmax_);
  }
  return x;
}

double PlanarCurve::s_max() const { return sacc_.back(); }

Vec2 PlanarCurve::gamma(double s) const {
  const double x = x_of_arclength(s);
  return {x, d_.f(x)};
}

Vec2 PlanarCurve::gamma_dot(double s) const {
  const double x = x_of_arclength(s);
  const double g = d_.f1(x);
  const double q = std::sqrt(1.0 + g * g);
  return {1.0 / q, g / q};
}

Vec2 PlanarCurve::normal(double s) const {
  const double x = x_of_arclength(s);
  const double g = d_.f1(x);
  const double q = std::sqrt(1.0 + g * g);
  const double sgn = flip_ ? -1.0 : 1.0;
  return {sgn * g / q, -sgn / q};
}

double PlanarCurve::curvature(double s) const {
  const double x = x_of_arclength(s);
  const double g = d_.f1(x);
  const double q = std::sqrt(1.0 + g * g);
  const double sgn = flip_ ? -1.0 : 1.0;
  return sgn * d_.f2(x) / (q * q * q);
}

double PlanarCurve::kx_at(double x) const {
  const double g = d_.f1(x), g2 = d_.f2(x), g3 = d_.f3(x);
  const double q2 = 1.0 + g * g;
  const double q = std::sqrt(q2);
  return g3 / (q2 * q) - 3.0 * g * g2 * g2 / (q2 * q2 * q);
}

double PlanarCurve::kxx_at(double x) const {
  const double g = d_.f1(x), g2 = d_.f2(x), g3 = d_.f3(x), g4 = d_.f4(x);
  const double q2 = 1.0 + g * g;
  const double q3 = q2 * std::sqrt(q2);
  const double q5 = q2 * q3, q7 = q2 * q5;
  return g4 / q3 - (9.0 * g * g2 * g3 + 3.0 * g2 * g2 * g2) / q5 +
         15.0 * g * g * g2 * g2 * g2 / q7;
}

double PlanarCurve::curvature_ds(double s) const {
  const double x = x_of_arclength(s);
  const double g = d_.f1(x);
  const double q = std::sqrt(1.0 + g * g);
  const double sgn = flip_ ? -1.0 : 1.0;
  return sgn * kx_at(x) / q;
}

double PlanarCurve::curvature_ds2(double s) const {
  const double x = x_of_arclength(s);
  const double g = d_.f1(x), g2 = d_.f2(x);
  const double q2 = 1.0 + g * g;
  const double sgn = flip_ ? -1.0 : 1.0;
  return sgn * (kxx_at(x) / q2 - kx_at(x) * g * g2 / (q2 * q2));
}

bool PlanarCurve::is_straight() const {
  for (double x = -xmax_; x <= xmax_; x += xmax_ / 64.0)
    if (std::abs(d_.f2(x)) > 1e-12) return false;
  return true;
}

double PlanarCurve::tangent_dot_asymptotic() const {
  const double gp = d_.f1(xmax_), gm = d_.f1(-xmax_);
  const double qp = std::sqrt(1.0 + gp * gp), qm = std::sqrt(1.0 + gm * gm);
  return (1.0 + gp * gm) / (qp * qm);
}

PlanarCurve PlanarCurve::flipped() const {
  PlanarCurve c = *this;
  c.flip_ = !flip_;
  return c;
}

Vec2 FermiChart::forward(double s, double z) const {
  return curve.gamma(s) + z * curve.normal(s);
}

bool FermiChart::in_neighborhood(double s, double z) const {
  return std::abs(z) < delta + c0 * std::abs(s);
}

double FermiChart::metric_ss(double s, double z) const {
  const double j = 1.0 + z * curve.curvature(s);
  return j * j;
}

FermiChart::InverseResult FermiChart::inverse(Vec2 p) const {
  InverseResult r;
  double s = std::clamp(curve.arclength_of_x(p.x), -curve.s_max() + 1.0,
                        curve.s_max() - 1.0);
  for (int iter = 0; iter < 60; ++iter) {
    const Vec2 g = curve.gamma(s);
    const Vec2 td = curve.gamma_dot(s);
    const Vec2 rvec = p - g;
    const double phi = dot(rvec, td);
    if (std::abs(phi) < 1e-12 * (1.0 + std::abs(s))) {
      r.converged = true;
      break;
    }
    const double z = dot(rvec, curve.normal(s));
    double denom = 1.0 + z * curve.curvature(s);
    if (std::abs(denom) < 0.2) denom = (denom < 0 ? -0.2 : 0.2);
    s = std::clamp(s + phi / denom, -curve.s_max() + 1.0, curve.s_max() - 1.0);
  }
  r.s = s;
  r.z = dot(p - curve.gamma(s), curve.normal(s));
  r.inside = r.converged && in_neighborhood(r.s, r.z);
  return r;
}

FermiChart make_chart(const PlanarCurve& c, double delta) {
  const double d = std::clamp(c.tangent_dot_asymptotic(), -1.0, 1.0);
  // 0.1 sin of the half angle between incoming and outgoing asymptotic rays
  return FermiChart{c, delta, 0.1 * std::sqrt(0.5 * (1.0 + d))};
}

GridDisplacement::GridDisplacement(std::vector<double> sigma, std::vector<double> values)
    : sigma_(std::move(sigma)), h_(std::move(values)) {
  if (sigma_.size() < 6 || sigma_.size() != h_.size())
    throw std::invalid_argument("GridDisplacement: bad table");
  ds_ = sigma_[1] - sigma_[0];
  dh_ = fd_d1(h_, ds_);
  d2h_ = fd_d2(h_, ds_);
}

double GridDisplacement::h(double s) const {
  if (s <= sigma_.front() || s >= sigma_.back()) return 0.0;
  return interp_cubic(h_, sigma_.front(), ds_, s);
}

double GridDisplacement::dh(double s) const {
  if (s <= sigma_.front() || s >= sigma_.back()) return 0.0;
  return interp_cubic(dh_, sigma_.front(), ds_, s);
}

double GridDisplacement::d2h(double s) const {
  if (s <= sigma_.front() || s >= sigma_.back()) return 0.0;
  return interp_cubic(d2h_, sigma_.front(), ds_, s);
}

TableDisplacement::TableDisplacement(std::vector<double> sigma, std::vector<double> h,
                                     std::vector<double> dh, std::vector<double> d2h)
    : sigma_(std::move(sigma)), h_(std::move(h)), dh_(std::move(dh)), d2h_(std::move(d2h)) {
  if (sigma_.size() < 6 || sigma_.size() != h_.size() || h_.size() != dh_.size() ||
      dh_.size() != d2h_.size())
    throw std::invalid_argument("TableDisplacement: bad tables");
  ds_ = sigma_[1] - sigma_[0];
}

double TableDisplacement::h(double s) const {
  if (s <= sigma_.front() || s >= sigma_.back()) return 0.0;
  return interp_cubic(h_, sigma_.front(), ds_, s);
}

double TableDisplacement::dh(double s) const {
  if (s <= sigma_.front() || s >= sigma_.back()) return 0.0;
  return interp_cubic(dh_, sigma_.front(), ds_, s);
}

double TableDisplacement::d2h(double s) const {
  if (s <= sigma_.front() || s >= sigma_.back()) return 0.0;
  return interp_cubic(d2h_, sigma_.front(), ds_, s);
}

Vec2 DilatedChart::forward(double s, double t) const {
  const double sig = eps * s;
  return chart->forward(sig, eps * (t + disp->h(sig)));
}

DilatedChart::InverseResult DilatedChart::inverse(Vec2 p) const {
  const auto r = chart->inverse(p);
  InverseResult out;
  out.converged = r.converged;
  out.inside = r.inside;
  out.s = r.s / eps;
  out.t = r.z / eps - disp->h(r.s);
  return out;
}

DilatedChart dilated_chart(const FermiChart& chart, const Displacement& disp, double eps) {
  DilatedChart d;
  d.chart = &chart;
  d.disp = &disp;
  d.eps = eps;
  return d;
}

}  // namespace aclab
