// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aclab/ansatz.hpp"
#include "aclab/geometry.hpp"
#include "aclab/jacobi.hpp"
#include "aclab/profile.hpp"
#include "aclab/residual.hpp"

namespace aclab {

// Assembled ingredients of the reduced interface equation J[h] = G(h).
// The quadrature rectangle, the ansatz v1 and the stability system share
// one sigma grid (position i of sys.sigma is column i of the rectangle),
// so one iterate costs a single operator application plus row sums. v1
// itself never moves with h: the profile rides t and the corrector
// weights live on the curve, so only the operator coefficients see the
// displacement. Non-owning; the referenced objects must stay alive.
struct ReducedContext {
  const FermiChart* chart = nullptr;
  const PulledBackPotential* pb = nullptr;
  const DoubleWell* well = nullptr;
  const HeteroclinicProfile* prof = nullptr;
  const Corrector* psi0 = nullptr;
  const Corrector* psi1 = nullptr;
  double eps = 0.1;

  JacobiSystem sys;        // stability operator on the reduction window
  KernelPair kernel;
  NondegeneracyCert cert;  // from the wide default window, eps independent
  GridField layout;        // rectangle geometry; values stay zero
  GridField v1;            // v0 + phi1 with difference caches filled
  double m_psi0 = 0.0;     // <psi0', w'> on the padded profile grid
};

// sigma_span picks the window [-sigma_span, sigma_span] for both the
// rectangle and the solves; t_cap trims the rectangle height (tests
// shrink it to exercise the quadrature guard).
ReducedContext make_reduced_context(const FermiChart& chart,
                                    const PulledBackPotential& pb,
                                    const DoubleWell& well,
                                    const HeteroclinicProfile& prof,
                                    const Corrector& psi0,
                                    const Corrector& psi1, double eps,
                                    double sigma_span = 6.0,
                                    double t_cap = 14.0);

// Optional coupling hook: given the current displacement, return the
// projected 2D contribution on the context sigma grid. Left empty the
// iteration runs the zero surrogate, an order eps^2 correction below the
// leading balance.
using G2Supplier = std::function<std::vector<double>(const Displacement&)>;

// Right-hand side of the reduced equation, split into its pieces:
//   G = eps C0hat chat
//     - eps A0 h'' int zeta0 (t+h) w'^2 dt / c*
//     + eps^2 Qjac h'' <psi0', w'> / c*
//     + eps^-2 int zeta0 R1 w' dt / c*
// with R1 the computed remainder field of the ansatz residual. The
// pieces are exactly the w'-projection of that residual rearranged
// around the stability load, so -eps^2 c* (J[h] - G(h)) reproduces the
// row projection of S(v1) up to cutoff and window tails; a converged
// iterate therefore zeroes the projection to that tail level.
// tail_fraction tracks the outermost decile of the R1 rows as in
// projection_pi.
struct ReducedRhs {
  std::vector<double> sigma;
  std::vector<double> total;
  std::vector<double> chat_term, a0_term, psi0_term, r1_term, g2_term;
  double tail_fraction = 0.0;
  bool tail_ok = true;
  bool g2_included = false;
};

// ball_radius > 0 enforces the iterate bound ||h|| <= ball_radius in the
// weighted interface norm (std::invalid_argument beyond it, as for a
// context whose grids disagree). A quadrature window too short for the
// row sums (tail beyond a percent of the sup) throws std::runtime_error.
ReducedRhs reduced_rhs(const ReducedContext& ctx, const Displacement& disp,
                       double ball_radius = 0.0, const G2Supplier& g2 = {});

struct ReducedConfig {
  double ball_multiplier = 20.0;  // iterates stay within this times eps
  int max_iterations = 50;
  double tolerance = 1e-10;       // absolute, weighted norm of the update
  G2Supplier g2;
};

struct ReducedState {
  double eps = 0.1;
  std::vector<double> sigma, h, dh, d2h;
  std::vector<double> update_norms;  // weighted norm per accepted iterate
  std::vector<double> ratios;        // consecutive update quotients
  std::vector<double> h_sups;        // sup|h_k| per accepted iterate
  int iterations = 0;
  bool converged = false;
  double contraction_ratio = 0.0;     // largest recorded quotient
  double h_norm = 0.0;                // weighted norm of the final iterate
  double h_sup = 0.0;
  double ball_radius = 0.0;
  double fixed_point_residual = 0.0;  // ||J[h*] - G(h*)||, source weighted
  double solver_residual = 0.0;       // re-differencing sup of the last solve
};

// Picard iteration h <- solve_linear(G(h)) from h = 0. The solver hands
// back h'' through the equation, so J[h_{k+1}] equals the source G(h_k)
// node by node and the fixed point defect reduces to the source change
// G(h_{K-1}) - G(h_K) over the last step; re-differencing h* would only
// re-measure the stencil error kept in solver_residual. Aborts with
// std::runtime_error when the update norm grows twice in a row or an
// iterate leaves the ball. A degenerate kernel (the constant-coefficient
// line) keeps the solve defined through the explicit fallback pair; the
// nondegeneracy certificate travels in the context for callers that
// enforce it up front.
ReducedState solve_reduced(const ReducedContext& ctx,
                           const ReducedConfig& cfg = {});

// k, update norm, ratio, sup|h|/eps per accepted iterate.
void write_reduction_log(const ReducedState& st, const std::string& path);

// Z(sigma_i) = <Theta(s_i, .), w'> per row, judged in the weighted norms
// of both sides: the s -> eps s variable change costs one power of eps,
// which shows up as ratio * eps staying bounded over halvings.
struct ProjectionSizeReport {
  std::vector<double> sigma, z;
  double z_norm = 0.0;      // weighted source norm on the sigma grid
  double theta_norm = 0.0;  // C0 window surrogate on the rectangle
  double ratio = 0.0;       // z_norm / theta_norm, 0 for vanishing Theta
};
ProjectionSizeReport projection_size_check(const GridField& theta,
                                           const HeteroclinicProfile& prof,
                                           double eps);

}  // namespace aclab
