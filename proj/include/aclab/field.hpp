// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "aclab/geometry.hpp"

namespace aclab {

// Positive coefficient a(x,y) with closed-form derivatives through third
// order. hess = (a_xx, a_xy, a_yy), third = (a_xxx, a_xxy, a_xyy, a_yyy).
struct PotentialField {
  std::function<double(Vec2)> a;
  std::function<Vec2(Vec2)> grad;
  std::function<std::array<double, 3>(Vec2)> hess;
  std::function<std::array<double, 4>(Vec2)> third;
  std::string name;
};

// a = 1 + p(x) q(y) with p = (1+mu)^(-2-alpha), mu = sqrt(x^2+eta^2)-eta
// (smoothed |x|), q = y^2 sech(y) + beta y^3 exp(-y^2). beta = 0 is the
// symmetric variant; beta != 0 breaks the t -> -t parity of the pullback
// on the x-axis at third order only.
PotentialField example1_potential(double alpha = 1.0, double beta = 0.0,
                                  double eta = 0.01);

// Radial-well potential depending on y alone:
//   A(y) = sqrt(1+w^2) y / sqrt((1+w^2) y^2 - w^2),   y above the blend,
// joined C^2-monotonically to the constant A(y_blend - blend_width) below.
// Requires 0 < w <= 1/sqrt(2); throws std::domain_error otherwise.
PotentialField example2_potential(double omega, double y_blend = 0.7,
                                  double blend_width = 0.2);

PotentialField constant_potential(double value = 1.0);

// On-curve data entering the interface operators, all at one sigma.
struct CurveFieldData {
  double a0 = 0, da0 = 0, d2a0 = 0;  // a(gamma(s)) and arclength derivatives
  double r0 = 0, r1 = 0, r2 = 0;     // normal log-derivative combinations
  double b = 0;                      // da0/a0
  double b1 = 0;                     // d_sz a~/a - b r0
  double k = 0, dk = 0, d2k = 0;
  double Q = 0;                      // r1 - k^2
  double Qjac = 0;                   // d_zz a~/a - 2 k^2
  double A0 = 0;                     // -2k
  double B0hat = 0;                  // -dk + b1 + A0 b
  double C0hat = 0;                  // k^3 + r2/2
  double crit = 0;                   // r0 - k
};

// Pullback of the potential through the Fermi chart of a curve.
class PulledBackPotential {
 public:
  PulledBackPotential(const PotentialField& f, const PlanarCurve& c)
      : f_(&f), c_(&c) {}

  double at(double s, double z) const;
  double dsigma(double s, double z) const;  // (1+zk) grad a . gamma_dot
  double dz(double s, double z) const;
  double dzz(double s, double z) const;
  double dzzz(double s, double z) const;

  CurveFieldData on_curve(double s) const;

  const PotentialField& field() const { return *f_; }
  const PlanarCurve& curve() const { return *c_; }

 private:
  const PotentialField* f_;
  const PlanarCurve* c_;
};

PulledBackPotential pull_back(const PotentialField& f, const PlanarCurve& c);

// sup_s |d_z a~/a - k| over the sample set: zero when the curve is a
// steepest-descent interface of the weighted length.
struct CriticalityResult {
  double sup = 0.0;
  std::vector<double> sigma, residual;
};
CriticalityResult criticality_residual(const PotentialField& f, const PlanarCurve& c,
                                       double s_max = 200.0, double ds = 0.5);

struct HypothesisReport {
  double a_min = 0, a_max = 0;          // over tube samples
  bool positive = false;
  double criticality_sup = 0;
  bool critical = false;                // sup < 1e-8
  double tangent_dot = 0;               // asymptotic tangent pairing
  bool straight = false;
  bool nonparallel = false;             // straight curves are exempt
  double q_min = 0;                     // min of Q on |s| <= s_max
  double decay_exponent = 0;            // |Q| ~ (1+|s|)^(-decay_exponent)
  double alpha_est = 0;                 // decay_exponent - 2
  bool decay_ok = false;                // exponent > 2
  bool all_pass = false;
};
HypothesisReport hypothesis_report(const PotentialField& f, const PlanarCurve& c,
                                   double s_max = 200.0);

}  // namespace aclab
