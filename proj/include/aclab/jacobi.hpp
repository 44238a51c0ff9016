// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <vector>

#include "aclab/field.hpp"
#include "aclab/geometry.hpp"

namespace aclab {

// One-dimensional stability operator of the weighted interface,
//   J[h] = h'' + b h' - Q h,   b = a0'/a0,   Q = d_zz a~/a - 2k^2,
// tabulated on a uniform sigma grid.
struct JacobiSystem {
  std::vector<double> sigma;
  std::vector<double> a0, b, Q, qtilde;
  double ds = 0.02;
  // fitted decay exponent alpha of (1+|s|)^{-(2+alpha)} ~ |Q|; zero when
  // Q vanishes identically or the window is too short to fit
  double alpha_decay = 0.0;
  // exact normal-form potential, used by the kernel integrator when the
  // grid under-resolves a feature; valid while the assembled field and
  // curve are alive (same contract as PulledBackPotential)
  std::function<double(double)> qtilde_exact;

  double qtilde_at(double s) const;
  double a0_at(double s) const;
  double b_at(double s) const;
  double Q_at(double s) const;
};

JacobiSystem assemble(const PulledBackPotential& pb, double s_max = 200.0,
                      double ds = 0.02);

// Liouville normal form u'' = qtilde u reached through h = a0^{-1/2} u,
//   qtilde = Q + a0''/(2 a0) - b^2/4.
// Returns qtilde on the system grid (same values JacobiSystem tabulates).
std::vector<double> liouville_transform(const JacobiSystem& sys);

// Pair of J-kernel elements: h1 bounded toward +infinity and linearly
// growing toward -infinity, h2 the mirror. h1 carries the 1/alpha3
// rescale so that W(s) = a0 (h1 h2' - h1' h2) = 1. Degenerate systems
// (a globally bounded kernel, e.g. constant coefficients) keep the
// labels and fall back to the explicit pair {1, int ds/a0}.
struct KernelPair {
  std::vector<double> sigma;
  std::vector<double> h1, dh1, h2, dh2;
  std::vector<double> W;  // weighted Wronskian per node, 1 after rescale
  double ds = 0.02;
  int bounded_side_h1 = +1;
  int bounded_side_h2 = -1;
  double alpha3 = 0.0;           // a0 W of the unit-seed pair; the rescale record
  double wronskian_drift = 0.0;  // max |W - 1| after normalization
  bool degenerate = false;

  double h1_at(double s) const;
  double h2_at(double s) const;
  double dh1_at(double s) const;
  double dh2_at(double s) const;
};

KernelPair construct_kernel(const JacobiSystem& sys, double s_max = 200.0);

struct NondegeneracyCert {
  double q_min = 0.0, q_max = 0.0;
  bool pass_by_corollary = false;  // Q >= -1e-12 everywhere and max Q > 1e-10
  double alpha3 = 0.0;
  bool pass_by_kernel = false;     // |alpha3| > 1e-6
  double tail_exponent = 0.0;      // fitted decay of u_bounded - limit
  bool nondegenerate = false;
};
NondegeneracyCert nondegeneracy_check(const JacobiSystem& sys, const KernelPair& kp);

// Bounded solution of J[h] = f through variation of parameters,
//   h = -h1 int_{-S}^{s} h2 a0 f - h2 int_{s}^{S} h1 a0 f,
// valid under the W = 1 normalization above. f is sampled on the kernel
// grid kp.sigma. d2h comes from the equation itself; the reported
// residual_sup re-differentiates h numerically instead.
struct JacobiSolution {
  std::vector<double> sigma, h, dh, d2h;
  double residual_sup = 0.0;
};
JacobiSolution solve_linear(const JacobiSystem& sys, const KernelPair& kp,
                            const std::vector<double>& f);

// Interface norm surrogate: sup|h| + sup (1+|s|)^{1+alpha} |h'| plus a
// weighted window Hoelder piece for h''.
struct WeightedNorm1D {
  double alpha = 1.0;
  double lambda = 0.5;
  double window = 1.0;
};
double weighted_norm_1d(const WeightedNorm1D& n, const std::vector<double>& sigma,
                        const std::vector<double>& h, const std::vector<double>& dh,
                        const std::vector<double>& d2h);

// Source-side norm: the same (2+alpha)-weighted window/Hoelder piece
// applied to f itself. The inverse estimate pairs weighted_norm_1d(h)
// against this.
double weighted_source_norm_1d(const WeightedNorm1D& n,
                               const std::vector<double>& sigma,
                               const std::vector<double>& f);

}  // namespace aclab
