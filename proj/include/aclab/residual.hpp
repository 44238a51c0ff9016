// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "aclab/ansatz.hpp"
#include "aclab/field.hpp"
#include "aclab/geometry.hpp"
#include "aclab/numerics.hpp"
#include "aclab/profile.hpp"

namespace aclab {

// One interface problem: chart, pulled-back coefficient, displacement of
// the interface, the double well, and the dilation scale. Non-owning; the
// referenced objects must outlive the bundle.
struct LayerProblem {
  const FermiChart* chart = nullptr;
  const PulledBackPotential* pb = nullptr;
  const Displacement* disp = nullptr;
  const DoubleWell* well = nullptr;
  double eps = 0.1;
};

// Coefficients of the interface operator in stencil form,
//   S(v) = c_tt v_tt + c_st v_st + c_ss v_ss + c_t v_t + c_s v_s - F'(v),
// at a single dilated node (s,t).
struct OperatorCoeffs {
  double c_tt = 0, c_st = 0, c_ss = 0, c_t = 0, c_s = 0;
};

// Exact chart coefficients. With sigma = eps s, tb = t + h(sigma),
// J = 1 + eps tb k(sigma) and the log-derivatives Sa = d_sigma a~/a~,
// Ta = d_z a~/a~ of the pulled-back coefficient at (sigma, eps tb):
//   S(v) = v_tt + J^-2 [v_ss - 2 eps h' v_st + eps^2 h'^2 v_tt
//                       - eps^2 h'' v_t]
//          + (eps k / J) v_t - (eps^2 tb k' / J^3)(v_s - eps h' v_t)
//          + eps Ta v_t + (eps Sa / J^2)(v_s - eps h' v_t) - F'(v).
// Throws std::runtime_error when J falls under 0.05 (chart degenerate).
OperatorCoeffs exact_coeffs(const LayerProblem& lp, double s, double t);

// Truncated coefficients built from the on-curve data alone. order 2
// keeps the plane part, the tangential drift eps b and the normal drift
// eps^2 (t+h) Q; order 3 adds the (t+h) A0 second-order block, the
// eps^2 (t+h) B0hat tangential correction and the eps^3 (t+h)^2 C0hat
// normal drift. The truncation drops the first-order normal term
// eps (k + r0) v_t outright, so it approximates the exact operator to
// the stated order only on curves where that term cancels.
OperatorCoeffs expanded_coeffs(const LayerProblem& lp, double s, double t,
                               int order);

// Evaluator pair for coefficient-level comparisons.
struct OperatorExpansion {
  LayerProblem lp;

  OperatorCoeffs exact(double s, double t) const {
    return exact_coeffs(lp, s, t);
  }
  OperatorCoeffs truncated(double s, double t, int order = 3) const {
    return expanded_coeffs(lp, s, t, order);
  }
};

// Apply the exact operator to a sampled field. Requires the difference
// caches of v (fill_differences); throws std::invalid_argument otherwise.
// The outermost stencil rows use one-sided differences, so sup norms
// should exclude an edge band (interior_sup below).
GridField apply_fermi_exact(const LayerProblem& lp, const GridField& v,
                            bool with_fprime = true);

// Same contract for the truncated operator, order 2 or 3.
GridField apply_fermi_expanded(const LayerProblem& lp, const GridField& v,
                               int order, bool with_fprime = true);

// Chart-free check operator. v is an everywhere-defined evaluator on the
// undilated plane (GlobalApproximation::operator() composes with .value);
// derivatives are taken with respect to the dilated variables by central
// second-order differences with the given dilated step, and the result
//   lap v + eps (grad a / a) . grad v - F'(v)
// is sampled at the nodes of `layout` through the chart of lp. The
// coefficient and its gradient are evaluated in closed form, so the only
// discretization error is the O(step^2) stencil error.
GridField euclidean_oracle(const LayerProblem& lp,
                           const std::function<double(Vec2)>& v,
                           const GridField& layout, double step,
                           bool with_fprime = true);

// Row-wise projection Pi(s_i) = int S(i,.) w'(t) dt by Simpson weights.
// tail_fraction is the outermost-decile contribution relative to the sup;
// tail_ok accepts when that stays within 1e-3 (or is negligible outright),
// flagging t-windows too narrow to trust the values.
struct ProjectionPi {
  std::vector<double> s, sigma, value;
  double tail_fraction = 0.0;
  bool tail_ok = true;
};
ProjectionPi projection_pi(const GridField& sv,
                           const HeteroclinicProfile& prof, double eps);

// h'' + b h' - Qjac h at sigma; the load the interface stability operator
// assigns to the displacement of lp.
double jacobi_bracket(const LayerProblem& lp, double sigma);

// Displayed leading part of the residual of v0 = w(t):
//   -eps^2 Jb(sigma) w' + eps^2 Qjac(sigma) t w' + eps^2 h'^2 w''
// with Jb the jacobi_bracket.
GridField predicted_sv0_main(const LayerProblem& lp,
                             const HeteroclinicProfile& prof,
                             const GridField& layout);

// Displayed leading part of the residual of v1 = v0 + phi1:
//   -eps^2 Jb w' + eps^3 C0hat chat w' + eps^4 Qjac psi0' h''
//   - eps^3 (t+h) A0 h'' w'.
GridField predicted_sv1_main(const LayerProblem& lp,
                             const HeteroclinicProfile& prof,
                             const Corrector& psi0, const GridField& layout);

// Remainder after peeling the corrector equation out of S(v1):
//   R0 = S(v1) - S(v0) + eps^2 Qjac t w' + eps^3 C0hat (t^2 - chat) w'
//        - eps^4 Qjac psi0' h''.
GridField residual_r0(const LayerProblem& lp, const HeteroclinicProfile& prof,
                      const Corrector& psi0, const GridField& sv0,
                      const GridField& sv1);

// R1 = S(v1) - predicted_sv1_main; collects the h'^2, cutoff-free
// remainder terms in one computed field.
GridField residual_r1(const LayerProblem& lp, const HeteroclinicProfile& prof,
                      const Corrector& psi0, const GridField& sv1);

// sup |g| with `band` rows and columns stripped on every side (one-sided
// stencil region); the band shrinks automatically on small grids.
double interior_sup(const GridField& g, std::size_t band = 3);
// sup e^{sigma_t |t|} |g| over the same interior.
double weighted_interior_sup(const GridField& g, double sigma_t,
                             std::size_t band = 3);
// Exponential decay rate of the column maxima of |g| fitted on
// 2 <= |t| <= t_max - 1; positive means decay.
double fitted_t_decay(const GridField& g, std::size_t band = 3);

// One measured quantity per eps, with a log-log slope over the list.
struct ScalingQuantity {
  std::string name;
  std::function<double(double)> measure;
};
struct ScalingRow {
  std::string name;
  std::vector<double> eps, sup;
  SlopeFit fit;
  bool monotone = true;  // sup shrinks with eps
  bool all_zero = false;
};
std::vector<ScalingRow> scaling_study(
    const std::vector<ScalingQuantity>& quantities,
    const std::vector<double>& eps_list);
// quantity,eps,sup,slope,monotone per line; the slope column carries
// "exact-zero" for identically vanishing data and "unordered" when the
// values do not decrease, instead of forcing a fit.
void write_scaling_csv(const std::vector<ScalingRow>& rows,
                       const std::string& path);

// Mismatch between the chart operator applied to v1 and the chart-free
// operator applied to the glued approximation, sampled on the band
// rho(s) - 2 <= |t + h| <= rho(s) - 1 where the gluing lives. scale is
// the matching-order magnitude e^{-sqrt2 (rho(0) - 2)} of the profile
// tails the cutoff exposes there.
struct SeamError {
  double sup = 0.0;
  double scale = 0.0;
  std::size_t samples = 0;
};
SeamError seam_error(const LayerProblem& lp, const GlobalApproximation& glob,
                     const GridField& sv1, const CutoffFamily& cuts,
                     double step);

}  // namespace aclab
