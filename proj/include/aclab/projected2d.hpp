// SPDX-License-Identifier: MIT
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aclab/ansatz.hpp"
#include "aclab/field.hpp"
#include "aclab/geometry.hpp"
#include "aclab/profile.hpp"

namespace aclab {

// Boundary handling on the short edges of the rectangle. The layer data
// decays in eps*s, so homogeneous Neumann keeps truncation boundary
// layers small; periodic is available for closed interfaces.
enum class SEdge { Neumann, Periodic };

struct ProjectedConfig {
  SEdge s_edge = SEdge::Neumann;
  double solver_tolerance = 1e-10;  // absolute residual target of a solve
  int max_refinements = 2;          // correction passes if above target
  int max_iterations = 25;          // outer fixed point bound
  double tolerance = 1e-10;         // absolute sup-norm update cutoff
  double rel_tolerance = 1e-6;      // update cutoff relative to the iterate
  double ball_multiplier = 20.0;    // admissible displacement norm per eps
};

// One constrained linear solve. phi vanishes on the t-edges; c is the
// per-column multiplier that makes the constrained problem solvable,
// recovered from the factorization itself. c_formula is the quadrature
// formula -<g,w'>/<w',w'> on the same interior nodes; the gap between
// the two is the order-two commutator of the stencil with w' and is
// reported, not hidden.
struct ProjectedSolve {
  GridField phi;
  std::vector<double> s;          // column coordinates
  std::vector<double> c;
  std::vector<double> c_formula;
  double residual_sup = 0.0;       // bordered system applied to the result
  double orthogonality_sup = 0.0;  // max over columns of the w' pairing
  double c_consistency = 0.0;      // max |c - c_formula|
  bool resonance_warning = false;  // transverse spectrum approached zero
};

// Spectral estimate of an extreme mode of the model operator.
struct ModeEstimate {
  double eigenvalue = 0.0;
  GridField mode;  // sup-normalized, constant along s
};

// Model operator Dtt + Dss - F''(w(t)) on the rectangle of a layout,
// Dirichlet at the t-edges, Neumann or periodic at the s-edges, with one
// quadrature constraint against w' per column and the matching multiplier
// column. Factored once by diagonalizing the t-direction operator; the
// layer mode is eliminated through the constraint, so no inverse ever
// touches the near-null direction. Every right-hand side then costs two
// dense transforms and a family of tridiagonal solves.
class ProjectedOperator {
 public:
  ProjectedOperator(const GridField& layout, const HeteroclinicProfile& prof,
                    const DoubleWell& well, ProjectedConfig cfg = {});
  ~ProjectedOperator();
  ProjectedOperator(ProjectedOperator&&) noexcept;
  ProjectedOperator& operator=(ProjectedOperator&&) noexcept;

  // g is read on the interior nodes of the operator's rectangle.
  ProjectedSolve solve(const GridField& g) const;

  // Unconstrained: the discrete layer mode w'(t) x column, eigenvalue at
  // roundoff-plus-stencil distance from zero. Constrained: the first
  // transverse mode, eigenvalue near -3/2 for the twin pit.
  ModeEstimate near_null(bool constrained) const;

  const GridField& layout() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ProjectedSolve solve_linear_projected(const GridField& g,
                                      const HeteroclinicProfile& prof,
                                      const DoubleWell& well,
                                      const ProjectedConfig& cfg = {});

// Everything the nonlinear iteration needs, factored operator included.
// Non-owning pointers; the referenced objects must outlive the context.
struct ProjectedContext {
  const FermiChart* chart = nullptr;
  const PulledBackPotential* pb = nullptr;
  const DoubleWell* well = nullptr;
  const HeteroclinicProfile* prof = nullptr;
  double eps = 0.1;
  GridField layout;
  GridField v1;  // profile plus first corrector, difference caches filled
  std::shared_ptr<const ProjectedOperator> op;
};

ProjectedContext make_projected_context(
    const FermiChart& chart, const PulledBackPotential& pb,
    const DoubleWell& well, const HeteroclinicProfile& prof,
    const Corrector& psi0, const Corrector& psi1, double eps,
    double sigma_span = 6.0, double dsig = 0.04, double dt = 0.05,
    double t_cap = 8.0, const ProjectedConfig& cfg = {});

// Fixed point for the layer perturbation riding on v1. Each pass solves
// the model problem against minus the full dilated residual of v1 minus
// the coupling, where the coupling collects exactly three linear pieces:
// the geometry correction (exact dilated derivatives minus the flat
// five-point ones), the potential mismatch (F''(v1) - F''(w))phi, and the
// drift terms of the log-gradient of the coefficient, the latter two
// riding inside the exact applications. The outer field is frozen to
// zero on the truncated rectangle; outer_bound reports the size of what
// that surrogate drops, and it is not small at desk-scale eps, so only
// scaling fits lean on these numbers, never absolute constants.
struct NonlinearProjectedSolve {
  ProjectedSolve solve;  // final pass: phi, c, reports
  std::vector<double> update_sups;
  int iterations = 0;
  bool converged = false;
  double phi_norm = 0.0;    // weighted Hoelder surrogate, second order
  double source_norm = 0.0; // same weights, order zero, of the v1 residual
  double outer_bound = 0.0; // exp(-sigma delta / (2 eps)) of the norm class
};

NonlinearProjectedSolve solve_nonlinear_projected(const ProjectedContext& ctx,
                                                  const Displacement& disp,
                                                  const ProjectedConfig& cfg = {});

// Columnar text dump: s, c, c_formula per row.
void write_multiplier_csv(const ProjectedSolve& sol, const std::string& path);

}  // namespace aclab
