// SPDX-License-Identifier: MIT
#include "aclab/field.hpp"

#include <cmath>
#include <stdexcept>

namespace aclab {

namespace {

struct Poly1 {  // value with three derivatives
  double v = 0, d1 = 0, d2 = 0, d3 = 0;
};

Poly1 eval_p(double x, double m, double eta) {
  const double r = std::sqrt(x * x + eta * eta);
  const double mu = r - eta;
  const double mu1 = x / r;
  const double mu2 = eta * eta / (r * r * r);
  const double mu3 = -3.0 * eta * eta * x / std::pow(r, 5);
  const double u = 1.0 + mu;
  const double pm = std::pow(u, -m);
  Poly1 p;
  p.v = pm;
  p.d1 = -m * pm / u * mu1;
  p.d2 = m * (m + 1.0) * pm / (u * u) * mu1 * mu1 - m * pm / u * mu2;
  p.d3 = -m * (m + 1.0) * (m + 2.0) * pm / (u * u * u) * mu1 * mu1 * mu1 +
         3.0 * m * (m + 1.0) * pm / (u * u) * mu1 * mu2 - m * pm / u * mu3;
  return p;
}

Poly1 eval_q(double y, double beta) {
  const double S = 1.0 / std::cosh(y);
  const double T = std::tanh(y);
  Poly1 q;
  q.v = y * y * S;
  q.d1 = S * (2.0 * y - y * y * T);
  q.d2 = S * (2.0 - 4.0 * y * T - y * y + 2.0 * y * y * T * T);
  q.d3 = S * (-6.0 * T - 6.0 * y + 12.0 * y * T * T + 5.0 * y * y * T -
              6.0 * y * y * T * T * T);
  if (beta != 0.0) {
    const double e = std::exp(-y * y);
    const double y2 = y * y, y3 = y2 * y, y4 = y2 * y2, y5 = y4 * y, y6 = y4 * y2;
    q.v += beta * y3 * e;
    q.d1 += beta * (3.0 * y2 - 2.0 * y4) * e;
    q.d2 += beta * (6.0 * y - 14.0 * y3 + 4.0 * y5) * e;
    q.d3 += beta * (6.0 - 54.0 * y2 + 48.0 * y4 - 8.0 * y6) * e;
  }
  return q;
}

}  // namespace

PotentialField example1_potential(double alpha, double beta, double eta) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::domain_error("example1_potential: alpha must lie in (0,1]");
  const double m = 2.0 + alpha;
  PotentialField f;
  f.name = beta == 0.0 ? "example1" : "example1-tilted";
  f.a = [m, eta, beta](Vec2 v) {
    return 1.0 + eval_p(v.x, m, eta).v * eval_q(v.y, beta).v;
  };
  f.grad = [m, eta, beta](Vec2 v) -> Vec2 {
    const auto p = eval_p(v.x, m, eta);
    const auto q = eval_q(v.y, beta);
    return {p.d1 * q.v, p.v * q.d1};
  };
  f.hess = [m, eta, beta](Vec2 v) -> std::array<double, 3> {
    const auto p = eval_p(v.x, m, eta);
    const auto q = eval_q(v.y, beta);
    return {p.d2 * q.v, p.d1 * q.d1, p.v * q.d2};
  };
  f.third = [m, eta, beta](Vec2 v) -> std::array<double, 4> {
    const auto p = eval_p(v.x, m, eta);
    const auto q = eval_q(v.y, beta);
    return {p.d3 * q.v, p.d2 * q.d1, p.d1 * q.d2, p.v * q.d3};
  };
  return f;
}

namespace {

// branch above the blend window
Poly1 eval_A(double y, double w2) {
  const double g = 1.0 + w2;
  const double sg = std::sqrt(g);
  const double D = g * y * y - w2;
  const double Dm = 1.0 / std::sqrt(D);
  const double Dm3 = Dm / D, Dm5 = Dm3 / D, Dm7 = Dm5 / D;
  Poly1 A;
  A.v = sg * y * Dm;
  A.d1 = -w2 * sg * Dm3;
  A.d2 = 3.0 * w2 * g * sg * y * Dm5;
  A.d3 = 3.0 * w2 * g * sg * (-4.0 * g * y * y - w2) * Dm7;
  return A;
}

Poly1 eval_blend(double y, double w2, double yb, double bw) {
  const double ylo = yb - bw;
  if (y >= yb) return eval_A(y, w2);
  const double c0 = eval_A(ylo, w2).v;
  if (y <= ylo) return Poly1{c0, 0, 0, 0};
  const auto A = eval_A(y, w2);
  const double u = (y - ylo) / bw;
  const double th = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  const double th1 = 30.0 * u * u * (u - 1.0) * (u - 1.0);
  const double th2 = 60.0 * u * (1.0 - 3.0 * u + 2.0 * u * u);
  const double th3 = 60.0 * (1.0 - 6.0 * u + 6.0 * u * u);
  const double iw = 1.0 / bw, iw2 = iw * iw, iw3 = iw2 * iw;
  Poly1 B;
  const double dA = A.v - c0;
  B.v = c0 + th * dA;
  B.d1 = th1 * iw * dA + th * A.d1;
  B.d2 = th2 * iw2 * dA + 2.0 * th1 * iw * A.d1 + th * A.d2;
  B.d3 = th3 * iw3 * dA + 3.0 * th2 * iw2 * A.d1 + 3.0 * th1 * iw * A.d2 + th * A.d3;
  return B;
}

}  // namespace

PotentialField example2_potential(double omega, double y_blend, double blend_width) {
  if (!(omega > 0.0) || omega > 1.0 / kSqrt2)
    throw std::domain_error("example2_potential: omega must lie in (0, 1/sqrt(2)]");
  const double w2 = omega * omega;
  // the blend must stay above the branch singularity y* = omega/sqrt(1+w^2)
  const double ystar = omega / std::sqrt(1.0 + w2);
  if (y_blend - blend_width <= ystar)
    throw std::domain_error("example2_potential: blend window touches the branch point");
  PotentialField f;
  f.name = "example2";
  f.a = [w2, y_blend, blend_width](Vec2 v) {
    return eval_blend(v.y, w2, y_blend, blend_width).v;
  };
  f.grad = [w2, y_blend, blend_width](Vec2 v) -> Vec2 {
    return {0.0, eval_blend(v.y, w2, y_blend, blend_width).d1};
  };
  f.hess = [w2, y_blend, blend_width](Vec2 v) -> std::array<double, 3> {
    return {0.0, 0.0, eval_blend(v.y, w2, y_blend, blend_width).d2};
  };
  f.third = [w2, y_blend, blend_width](Vec2 v) -> std::array<double, 4> {
    return {0.0, 0.0, 0.0, eval_blend(v.y, w2, y_blend, blend_width).d3};
  };
  return f;
}

PotentialField constant_potential(double value) {
  PotentialField f;
  f.name = "constant";
  f.a = [value](Vec2) { return value; };
  f.grad = [](Vec2) -> Vec2 { return {0.0, 0.0}; };
  f.hess = [](Vec2) -> std::array<double, 3> { return {0, 0, 0}; };
  f.third = [](Vec2) -> std::array<double, 4> { return {0, 0, 0, 0}; };
  return f;
}

double PulledBackPotential::at(double s, double z) const {
  return f_->a(c_->gamma(s) + z * c_->normal(s));
}

double PulledBackPotential::dsigma(double s, double z) const {
  const Vec2 p = c_->gamma(s) + z * c_->normal(s);
  const double j = 1.0 + z * c_->curvature(s);
  return j * dot(f_->grad(p), c_->gamma_dot(s));
}

double PulledBackPotential::dz(double s, double z) const {
  const Vec2 p = c_->gamma(s) + z * c_->normal(s);
  return dot(f_->grad(p), c_->normal(s));
}

double PulledBackPotential::dzz(double s, double z) const {
  const Vec2 p = c_->gamma(s) + z * c_->normal(s);
  const Vec2 n = c_->normal(s);
  const auto H = f_->hess(p);
  return H[0] * n.x * n.x + 2.0 * H[1] * n.x * n.y + H[2] * n.y * n.y;
}

double PulledBackPotential::dzzz(double s, double z) const {
  const Vec2 p = c_->gamma(s) + z * c_->normal(s);
  const Vec2 n = c_->normal(s);
  const auto T = f_->third(p);
  return T[0] * n.x * n.x * n.x + 3.0 * T[1] * n.x * n.x * n.y +
         3.0 * T[2] * n.x * n.y * n.y + T[3] * n.y * n.y * n.y;
}

CurveFieldData PulledBackPotential::on_curve(double s) const {
  CurveFieldData d;
  const Vec2 p = c_->gamma(s);
  const Vec2 td = c_->gamma_dot(s);
  const Vec2 n = c_->normal(s);
  d.k = c_->curvature(s);
  d.dk = c_->curvature_ds(s);
  d.d2k = c_->curvature_ds2(s);

  const double a = f_->a(p);
  const Vec2 g = f_->grad(p);
  const auto H = f_->hess(p);
  const auto T = f_->third(p);

  d.a0 = a;
  d.da0 = dot(g, td);
  // d/ds [grad a . gamma_dot] = td' H td + grad a . (-k nu)
  const double tdHtd = H[0] * td.x * td.x + 2.0 * H[1] * td.x * td.y + H[2] * td.y * td.y;
  d.d2a0 = tdHtd - d.k * dot(g, n);

  const double az = dot(g, n);
  const double azz = H[0] * n.x * n.x + 2.0 * H[1] * n.x * n.y + H[2] * n.y * n.y;
  const double azzz = T[0] * n.x * n.x * n.x + 3.0 * T[1] * n.x * n.x * n.y +
                      3.0 * T[2] * n.x * n.y * n.y + T[3] * n.y * n.y * n.y;
  d.r0 = az / a;
  d.r1 = azz / a - d.r0 * d.r0;
  d.r2 = azzz / a - 3.0 * (azz / a) * d.r0 + 2.0 * d.r0 * d.r0 * d.r0;
  d.b = d.da0 / a;
  // d_sz a~(s,0) = td' H nu + k grad a . td
  const double asz = H[0] * td.x * n.x + H[1] * (td.x * n.y + td.y * n.x) +
                     H[2] * td.y * n.y + d.k * d.da0;
  d.b1 = asz / a - d.b * d.r0;
  d.Q = d.r1 - d.k * d.k;
  d.Qjac = azz / a - 2.0 * d.k * d.k;
  d.A0 = -2.0 * d.k;
  d.B0hat = -d.dk + d.b1 + d.A0 * d.b;
  d.C0hat = d.k * d.k * d.k + 0.5 * d.r2;
  d.crit = d.r0 - d.k;
  return d;
}

PulledBackPotential pull_back(const PotentialField& f, const PlanarCurve& c) {
  return PulledBackPotential(f, c);
}

CriticalityResult criticality_residual(const PotentialField& f, const PlanarCurve& c,
                                       double s_max, double ds) {
  const PulledBackPotential pb(f, c);
  CriticalityResult r;
  for (double s = -s_max; s <= s_max + 0.5 * ds; s += ds) {
    const auto d = pb.on_curve(s);
    r.sigma.push_back(s);
    r.residual.push_back(d.crit);
    r.sup = std::max(r.sup, std::abs(d.crit));
  }
  return r;
}

HypothesisReport hypothesis_report(const PotentialField& f, const PlanarCurve& c,
                                   double s_max) {
  HypothesisReport rep;
  const PulledBackPotential pb(f, c);
  const FermiChart ch = make_chart(c);

  rep.a_min = 1e300;
  rep.a_max = -1e300;
  for (double s = -s_max; s <= s_max; s += 1.0) {
    const double zlim = ch.delta + ch.c0 * std::abs(s);
    for (double fr : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const double v = pb.at(s, fr * zlim * 0.999);
      rep.a_min = std::min(rep.a_min, v);
      rep.a_max = std::max(rep.a_max, v);
    }
  }
  rep.positive = rep.a_min > 0.0;

  rep.criticality_sup = criticality_residual(f, c, s_max, 0.5).sup;
  rep.critical = rep.criticality_sup < 1e-8;

  rep.tangent_dot = c.tangent_dot_asymptotic();
  rep.straight = c.is_straight();
  // a straight interface carries a global chart; the angle condition only
  // constrains genuinely curved ends
  rep.nonparallel = rep.straight || rep.tangent_dot < 1.0 - 1e-6;

  rep.q_min = 1e300;
  std::vector<double> ss, qq;
  for (double s = 0.0; s <= s_max; s += 1.0) {
    const double Q = pb.on_curve(s).Qjac;
    const double Qm = pb.on_curve(-s).Qjac;
    rep.q_min = std::min({rep.q_min, Q, Qm});
    if (s >= 20.0) {
      ss.push_back(1.0 + s);
      qq.push_back(std::max(std::abs(Q), std::abs(Qm)));
    }
  }
  const auto fit = fit_loglog(ss, qq);
  rep.decay_exponent = -fit.slope;
  rep.alpha_est = rep.decay_exponent - 2.0;
  rep.decay_ok = rep.decay_exponent > 2.0;
  rep.all_pass = rep.positive && rep.critical && rep.nonparallel && rep.decay_ok;
  return rep;
}

}  // namespace aclab
