// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aclab/field.hpp"
#include "aclab/geometry.hpp"
#include "aclab/profile.hpp"

namespace aclab {

// Uniformly sampled scalar function on a truncated (s,t) rectangle,
// row-major with t contiguous: value(i,j) = values[i*nt + j] at
// s = s_min + i ds, t = t_min + j dt. The common currency of the
// assembly, residual and projected solver stages. The difference
// caches stay empty until fill_differences runs.
struct GridField {
  double s_min = 0, s_max = 0;
  double t_min = 0, t_max = 0;
  double ds = 0, dt = 0;
  std::size_t ns = 0, nt = 0;
  std::vector<double> values;
  std::vector<double> d_s, d_t, d_ss, d_st, d_tt;

  double s_of(std::size_t i) const { return s_min + static_cast<double>(i) * ds; }
  double t_of(std::size_t j) const { return t_min + static_cast<double>(j) * dt; }
  double& at(std::size_t i, std::size_t j) { return values[i * nt + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * nt + j]; }
  double sup() const;
};

GridField make_grid_field(double s_min, double s_max, double ds, double t_min,
                          double t_max, double dt);

// Rectangle shared by the experiments: sigma in [-sigma_span, sigma_span]
// at spacing dsig, mapped to s = sigma/eps, and t spanning
// min(delta/eps + 4, t_cap) on the 0.01 lattice of the profile tables so
// corrector lookups land on knots.
GridField experiment_layout(double eps, double delta = 0.25,
                            double sigma_span = 24.0, double dsig = 0.02,
                            double dt = 0.01, double t_cap = 14.0);

// Bicubic lookup with knot snapping; clamped replication outside.
double gf_interp(const GridField& g, double s, double t);

// 4th-order interior differences, 2nd-order one-sided at the edges.
void fill_differences(GridField& g);

// Bit-exact binary round trip: "ACGF" magic, version, extents, raw doubles.
void write_grid_field(const GridField& g, const std::string& path);
GridField read_grid_field(const std::string& path);

// Transition-layer cutoffs zeta_n(s,t) = eta(|t + h(eps s)| - rho(s) + n)
// with rho(s) = delta/eps + c0|s| and eta the quintic step that is 1 below
// 1 and 0 above 2. Larger n pushes the support deeper into the tube, so
// zeta_m zeta_n = zeta_n holds pointwise for m < n; the members with
// n >= 2 vanish at the tube edge.
struct CutoffFamily {
  double eps = 0.1;
  double delta = 0.25;
  double c0 = 0.1;
  const Displacement* disp = nullptr;

  double rho(double s) const;
  double zeta(int n, double s, double t) const;
};

CutoffFamily make_cutoffs(const FermiChart& chart, const Displacement& disp,
                          double eps);

// v0(s,t) = w(t) sampled on the layout rectangle.
GridField build_v0(const HeteroclinicProfile& p, const GridField& layout);

// First interface corrector
//   phi1(s,t) = eps^2 [2k^2 - d_zz a/a](eps s) psi0(t)
//             - eps^3 [k^3 + r2/2](eps s) psi1(t);
// the first bracket equals -Qjac on the curve, and under criticality it
// also equals -Q. Corrector lookups hit table knots on the 0.01 lattice.
GridField build_phi1(const Corrector& psi0, const Corrector& psi1,
                     const PulledBackPotential& pb, double eps,
                     const GridField& layout);

GridField gf_add(const GridField& a, const GridField& b);

// Everywhere-defined evaluator of the glued approximation
//   w_glob = zeta3 v1 + (1 - zeta3) Hside,
// where Hside = +1 on the side the normal points into (t + h > 0) and -1
// on the other. Inside the tube the value comes from Fermi coordinates;
// past the sampled rectangle the profile tail stands in for v1; out of
// chart the side classification alone decides.
struct GlobalApproximation {
  const DilatedChart* chart = nullptr;
  const HeteroclinicProfile* profile = nullptr;
  const GridField* v1 = nullptr;
  CutoffFamily cutoffs;

  struct Eval {
    double value = 0.0;
    bool in_chart = false;
    double s = 0.0, t = 0.0;
  };
  Eval operator()(Vec2 p) const;
  double side_sign(Vec2 p) const;
};

GlobalApproximation build_global(const GridField& v1, const DilatedChart& chart,
                                 const CutoffFamily& cutoffs,
                                 const HeteroclinicProfile& profile);

// Weight blending the interface factor into a plane-wide exponential:
//   K(x) = zeta2(x) e^{sigma|t|/2} (1 + |eps s|)^mu
//        + (1 - zeta2(x)) e^{b1|x1| + b2|x2|}.
// Requires b1^2 + b2^2 < (sqrt(2) - tau)/2 with tau = 0.1; K >= 1
// everywhere since both branches are.
struct WeightK {
  double sigma = 1.2;
  double mu = 0.0;
  double b1 = 0.4, b2 = 0.4;
  const DilatedChart* chart = nullptr;
  CutoffFamily cutoffs;

  double operator()(Vec2 x) const;
};

WeightK make_weight(const DilatedChart& chart, const CutoffFamily& cutoffs,
                    double sigma = 1.2, double mu = 0.0, double b1 = 0.4,
                    double b2 = 0.4);

// Discrete surrogates of the anisotropically weighted Hoelder norms on the
// (s,t) rectangle. The weight is (1 + |eps s|)^mu e^{sigma|t|}; the ball of
// the continuum definition becomes a window of half-width `window` in both
// axes, and Hoelder quotients are taken over dyadic axis separations up to
// twice the window, which keeps the value grid-stable.
struct WeightedNorm2D {
  double mu = 0.0;
  double sigma = 0.0;
  double eps = 0.1;
  double lambda = 0.5;
  double window = 1.0;
};

// sup of weight * |g| pointwise.
double weighted_sup_norm_2d(const WeightedNorm2D& n, const GridField& g);
// sup of weight * (window sup + windowed Hoelder quotient).
double weighted_c0l_norm_2d(const WeightedNorm2D& n, const GridField& g);
// Hoelder norm of the second differences plus sup norms of first
// differences and of the field itself.
double weighted_c2l_norm_2d(const WeightedNorm2D& n, const GridField& g);

}  // namespace aclab
