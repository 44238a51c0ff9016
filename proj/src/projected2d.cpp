// SPDX-License-Identifier: MIT
#include "aclab/projected2d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "aclab/jacobi.hpp"
#include "aclab/numerics.hpp"
#include "aclab/residual.hpp"

namespace aclab {

namespace {

// Thomas elimination; every column of rhs solved in place. sub[0] and
// sup[n-1] are ignored. Rows here are strictly diagonally dominant
// (|lambda| >= the first transverse eigenvalue), so no pivoting.
void thomas_inplace(const std::vector<double>& sub, std::vector<double> diag,
                    const std::vector<double>& sup, Eigen::MatrixXd& rhs) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> csup(static_cast<std::size_t>(n), 0.0);
  csup[0] = sup[0] / diag[0];
  rhs.row(0) /= diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[static_cast<std::size_t>(i)] -
                     sub[static_cast<std::size_t>(i)] * csup[static_cast<std::size_t>(i - 1)];
    if (i < n - 1) csup[static_cast<std::size_t>(i)] = sup[static_cast<std::size_t>(i)] / m;
    rhs.row(i) = (rhs.row(i) - sub[static_cast<std::size_t>(i)] * rhs.row(i - 1)) / m;
  }
  for (int i = n - 2; i >= 0; --i)
    rhs.row(i) -= csup[static_cast<std::size_t>(i)] * rhs.row(i + 1);
}

}  // namespace

struct ProjectedOperator::Impl {
  GridField layout;
  ProjectedConfig cfg;
  std::size_t ns = 0, nt = 0, ni = 0;
  double ds = 0, dt = 0;
  std::vector<double> wp, fpp;  // full t-grid samples
  std::vector<double> qw;       // interior quadrature weights, size ni
  double cstar = 0;
  Eigen::MatrixXd V;            // t-modes, columns
  Eigen::VectorXd lam, wk, beta;
  std::size_t k0 = 0;           // layer index, largest eigenvalue
  Eigen::MatrixXd K;            // sum over transverse modes of beta w T^-1
  Eigen::PartialPivLU<Eigen::MatrixXd> clu;
  double lambda_layer = 0, lambda_perp = 0;

  // Dss + lambda along one t-mode, s-edges per config.
  void line_solve(double lambda, Eigen::MatrixXd& rhs) const {
    const double id2 = 1.0 / (ds * ds);
    std::vector<double> sub(ns, id2), diag(ns, lambda - 2.0 * id2), sup(ns, id2);
    if (cfg.s_edge == SEdge::Neumann) {
      sup[0] = 2.0 * id2;
      sub[ns - 1] = 2.0 * id2;
      thomas_inplace(sub, diag, sup, rhs);
      return;
    }
    // periodic corners folded in by a rank-one update
    const double gamma = -diag[0];
    std::vector<double> d2 = diag;
    d2[0] = diag[0] - gamma;
    d2[ns - 1] = diag[ns - 1] - id2 * id2 / gamma;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<long>(ns));
    u[0] = gamma;
    u[static_cast<long>(ns) - 1] = id2;
    Eigen::MatrixXd z = u;
    thomas_inplace(sub, d2, sup, z);
    thomas_inplace(sub, d2, sup, rhs);
    Eigen::RowVectorXd vy =
        rhs.row(0) + (id2 / gamma) * rhs.row(static_cast<long>(ns) - 1);
    const double vz =
        1.0 + z(0, 0) + (id2 / gamma) * z(static_cast<long>(ns) - 1, 0);
    rhs.noalias() -= z.col(0) * (vy / vz);
  }

  Eigen::VectorXd line_apply(double lambda, const Eigen::VectorXd& x) const {
    const double id2 = 1.0 / (ds * ds);
    const long n = static_cast<long>(ns);
    Eigen::VectorXd out(n);
    for (long i = 0; i < n; ++i) {
      double acc = (lambda - 2.0 * id2) * x[i];
      if (i > 0) acc += id2 * x[i - 1];
      if (i < n - 1) acc += id2 * x[i + 1];
      if (cfg.s_edge == SEdge::Neumann) {
        if (i == 0) acc += id2 * x[1];
        if (i == n - 1) acc += id2 * x[n - 2];
      } else {
        if (i == 0) acc += id2 * x[n - 1];
        if (i == n - 1) acc += id2 * x[0];
      }
      out[i] = acc;
    }
    return out;
  }

  // Core bordered solve in mode space; o is the constraint right side.
  void core_solve(const Eigen::MatrixXd& ghat, const Eigen::VectorXd& o,
                  Eigen::MatrixXd& phihat, Eigen::VectorXd& c) const {
    const long n = static_cast<long>(ns), m = static_cast<long>(ni);
    Eigen::MatrixXd a(n, m);
    Eigen::VectorXd asum = Eigen::VectorXd::Zero(n);
    for (long k = 0; k < m; ++k) {
      if (static_cast<std::size_t>(k) == k0) continue;
      Eigen::MatrixXd col = ghat.col(k);
      line_solve(lam[k], col);
      a.col(k) = col;
      asum += beta[k] * col;
    }
    const double b0 = beta[static_cast<long>(k0)];
    const Eigen::VectorXd rc =
        ghat.col(static_cast<long>(k0)) +
        line_apply(lam[static_cast<long>(k0)], (asum - o) / b0);
    c = clu.solve(rc);
    phihat.resize(n, m);
    for (long k = 0; k < m; ++k) {
      if (static_cast<std::size_t>(k) == k0) continue;
      Eigen::MatrixXd y = c;
      line_solve(lam[k], y);
      phihat.col(k) = a.col(k) + wk[k] * y.col(0);
    }
    phihat.col(static_cast<long>(k0)) = (o - asum - K * c) / b0;
  }
};

ProjectedOperator::ProjectedOperator(const GridField& layout,
                                     const HeteroclinicProfile& prof,
                                     const DoubleWell& well,
                                     ProjectedConfig cfg)
    : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  if (layout.ns < 3 || layout.nt < 5 || !(layout.ds > 0) || !(layout.dt > 0))
    throw std::invalid_argument("ProjectedOperator: degenerate rectangle");
  im.layout = layout;
  im.layout.values.assign(layout.ns * layout.nt, 0.0);
  im.layout.d_s.clear(); im.layout.d_t.clear(); im.layout.d_ss.clear();
  im.layout.d_st.clear(); im.layout.d_tt.clear();
  im.cfg = cfg;
  im.ns = layout.ns;
  im.nt = layout.nt;
  im.ni = layout.nt - 2;
  im.ds = layout.ds;
  im.dt = layout.dt;

  im.wp.resize(im.nt);
  im.fpp.resize(im.nt);
  for (std::size_t j = 0; j < im.nt; ++j) {
    const double t = layout.t_of(j);
    im.wp[j] = prof.dw_at(t);
    im.fpp[j] = well.d2F(prof.w_at(t));
  }
  // Simpson on the interior when it has an even interval count,
  // trapezoid otherwise; the same weights serve the constraint, the
  // multiplier formula and every report.
  im.qw.assign(im.ni, im.dt);
  if (im.ni % 2 == 1) {
    for (std::size_t j = 0; j < im.ni; ++j)
      im.qw[j] = (j == 0 || j == im.ni - 1) ? im.dt / 3.0
                 : (j % 2 == 1)             ? 4.0 * im.dt / 3.0
                                            : 2.0 * im.dt / 3.0;
  } else {
    im.qw[0] = im.qw[im.ni - 1] = im.dt / 2.0;
  }
  im.cstar = 0.0;
  for (std::size_t j = 0; j < im.ni; ++j)
    im.cstar += im.qw[j] * im.wp[j + 1] * im.wp[j + 1];

  const long m = static_cast<long>(im.ni);
  Eigen::VectorXd diag(m), sub(m - 1);
  const double idt2 = 1.0 / (im.dt * im.dt);
  for (long j = 0; j < m; ++j)
    diag[j] = -2.0 * idt2 - im.fpp[static_cast<std::size_t>(j) + 1];
  sub.setConstant(idt2);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("ProjectedOperator: eigensolve failed");
  im.lam = eig.eigenvalues();
  im.V = eig.eigenvectors();
  im.k0 = im.ni - 1;  // eigenvalues ascend; the layer mode sits on top
  im.lambda_layer = im.lam[static_cast<long>(im.k0)];
  im.lambda_perp = im.lam[static_cast<long>(im.k0) - 1];
  if (std::abs(im.lambda_layer) > 0.5)
    throw std::runtime_error("ProjectedOperator: layer mode missing from the spectrum");

  Eigen::VectorXd wpv(m), bwv(m);
  for (long j = 0; j < m; ++j) {
    wpv[j] = im.wp[static_cast<std::size_t>(j) + 1];
    bwv[j] = im.qw[static_cast<std::size_t>(j)] * wpv[j];
  }
  im.wk = im.V.transpose() * wpv;
  im.beta = im.V.transpose() * bwv;
  if (std::abs(im.beta[static_cast<long>(im.k0)]) < 1e-8)
    throw std::runtime_error("ProjectedOperator: constraint misses the layer mode");

  const long n = static_cast<long>(im.ns);
  im.K = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd X(n, n);
  for (long k = 0; k < m; ++k) {
    if (static_cast<std::size_t>(k) == im.k0) continue;
    const double g = im.beta[k] * im.wk[k];
    if (g == 0.0) continue;
    X.setIdentity();
    im.line_solve(im.lam[k], X);
    im.K.noalias() += g * X;
  }
  Eigen::MatrixXd Mc(n, n);
  for (long i = 0; i < n; ++i)
    Mc.col(i) = im.line_apply(im.lam[static_cast<long>(im.k0)], im.K.col(i));
  Mc *= -1.0 / im.beta[static_cast<long>(im.k0)];
  Mc.diagonal().array() -= im.wk[static_cast<long>(im.k0)];
  im.clu.compute(Mc);
}

ProjectedOperator::~ProjectedOperator() = default;
ProjectedOperator::ProjectedOperator(ProjectedOperator&&) noexcept = default;
ProjectedOperator& ProjectedOperator::operator=(ProjectedOperator&&) noexcept =
    default;

const GridField& ProjectedOperator::layout() const { return impl_->layout; }

ProjectedSolve ProjectedOperator::solve(const GridField& g) const {
  const Impl& im = *impl_;
  if (g.ns != im.ns || g.nt != im.nt ||
      std::abs(g.ds - im.ds) > 1e-12 || std::abs(g.dt - im.dt) > 1e-12 ||
      std::abs(g.s_min - im.layout.s_min) > 1e-9 ||
      std::abs(g.t_min - im.layout.t_min) > 1e-9)
    throw std::invalid_argument(
        "ProjectedOperator::solve: source off the operator rectangle");

  const long n = static_cast<long>(im.ns), m = static_cast<long>(im.ni);
  const Eigen::Map<const Eigen::MatrixXd> G(g.values.data(),
                                            static_cast<long>(im.nt), n);
  const Eigen::MatrixXd ghat =
      (im.V.transpose() * G.middleRows(1, m)).transpose();  // n x m

  Eigen::MatrixXd phihat;
  Eigen::VectorXd c;
  im.core_solve(ghat, Eigen::VectorXd::Zero(n), phihat, c);

  ProjectedSolve out;
  out.phi = im.layout;
  Eigen::Map<Eigen::MatrixXd> P(out.phi.values.data(),
                                static_cast<long>(im.nt), n);
  P.middleRows(1, m) = im.V * phihat.transpose();

  const double gsup = g.sup();
  const double target = im.cfg.solver_tolerance * std::max(1.0, gsup);
  for (int pass = 0; pass <= im.cfg.max_refinements; ++pass) {
    // defect of the bordered system, measured on the grid directly
    double rsup = 0.0;
    GridField defect = im.layout;
    Eigen::VectorXd od(n);
    const double idt2 = 1.0 / (im.dt * im.dt), ids2 = 1.0 / (im.ds * im.ds);
    for (std::size_t i = 0; i < im.ns; ++i) {
      double o = 0.0;
      for (std::size_t j = 1; j + 1 < im.nt; ++j) {
        double lap = (out.phi.at(i, j - 1) - 2.0 * out.phi.at(i, j) +
                      out.phi.at(i, j + 1)) * idt2;
        const std::size_t il =
            (i == 0) ? (im.cfg.s_edge == SEdge::Neumann ? 1 : im.ns - 1) : i - 1;
        const std::size_t ir =
            (i == im.ns - 1) ? (im.cfg.s_edge == SEdge::Neumann ? im.ns - 2 : 0)
                             : i + 1;
        lap += (out.phi.at(il, j) - 2.0 * out.phi.at(i, j) +
                out.phi.at(ir, j)) * ids2;
        const double r = g.at(i, j) -
                         (lap - im.fpp[j] * out.phi.at(i, j) -
                          c[static_cast<long>(i)] * im.wp[j]);
        defect.at(i, j) = r;
        rsup = std::max(rsup, std::abs(r));
        o += im.qw[j - 1] * im.wp[j] * out.phi.at(i, j);
      }
      od[static_cast<long>(i)] = -o;
      rsup = std::max(rsup, std::abs(o));
    }
    out.residual_sup = rsup;
    if (rsup <= target || pass == im.cfg.max_refinements) break;
    const Eigen::Map<const Eigen::MatrixXd> D(defect.values.data(),
                                              static_cast<long>(im.nt), n);
    const Eigen::MatrixXd dhat =
        (im.V.transpose() * D.middleRows(1, m)).transpose();
    Eigen::MatrixXd dphihat;
    Eigen::VectorXd dc;
    im.core_solve(dhat, od, dphihat, dc);
    P.middleRows(1, m) += im.V * dphihat.transpose();
    c += dc;
  }

  out.s.resize(im.ns);
  out.c.resize(im.ns);
  out.c_formula.resize(im.ns);
  for (std::size_t i = 0; i < im.ns; ++i) {
    out.s[i] = im.layout.s_of(i);
    out.c[i] = c[static_cast<long>(i)];
    double num = 0.0, o = 0.0;
    for (std::size_t j = 1; j + 1 < im.nt; ++j) {
      num += im.qw[j - 1] * im.wp[j] * g.at(i, j);
      o += im.qw[j - 1] * im.wp[j] * out.phi.at(i, j);
    }
    out.c_formula[i] = -num / im.cstar;
    out.orthogonality_sup = std::max(out.orthogonality_sup, std::abs(o));
    out.c_consistency =
        std::max(out.c_consistency, std::abs(out.c[i] - out.c_formula[i]));
  }
  out.resonance_warning = std::abs(im.lambda_perp) < 1e-6;
  return out;
}

ModeEstimate ProjectedOperator::near_null(bool constrained) const {
  const Impl& im = *impl_;
  ModeEstimate est;
  const std::size_t k = constrained ? im.k0 - 1 : im.k0;
  est.eigenvalue = im.lam[static_cast<long>(k)];
  est.mode = im.layout;
  double sup = 0.0;
  for (std::size_t j = 0; j < im.ni; ++j)
    sup = std::max(sup, std::abs(im.V(static_cast<long>(j), static_cast<long>(k))));
  for (std::size_t i = 0; i < im.ns; ++i)
    for (std::size_t j = 0; j < im.ni; ++j)
      est.mode.at(i, j + 1) =
          im.V(static_cast<long>(j), static_cast<long>(k)) / sup;
  return est;
}

ProjectedSolve solve_linear_projected(const GridField& g,
                                      const HeteroclinicProfile& prof,
                                      const DoubleWell& well,
                                      const ProjectedConfig& cfg) {
  return ProjectedOperator(g, prof, well, cfg).solve(g);
}

ProjectedContext make_projected_context(
    const FermiChart& chart, const PulledBackPotential& pb,
    const DoubleWell& well, const HeteroclinicProfile& prof,
    const Corrector& psi0, const Corrector& psi1, double eps,
    double sigma_span, double dsig, double dt, double t_cap,
    const ProjectedConfig& cfg) {
  if (!(eps > 0.0) || !(sigma_span > 0.0))
    throw std::invalid_argument("make_projected_context: bad scales");
  ProjectedContext ctx;
  ctx.chart = &chart;
  ctx.pb = &pb;
  ctx.well = &well;
  ctx.prof = &prof;
  ctx.eps = eps;
  ctx.layout = experiment_layout(eps, 0.25, sigma_span, dsig, dt, t_cap);
  ctx.v1 = gf_add(build_v0(prof, ctx.layout),
                  build_phi1(psi0, psi1, pb, eps, ctx.layout));
  fill_differences(ctx.v1);
  ctx.op = std::make_shared<const ProjectedOperator>(ctx.layout, prof, well, cfg);
  return ctx;
}

namespace {

// The three linear coupling pieces in one pass: the exact dilated
// derivatives of phi minus the flat five-point ones (geometry), with the
// drift of log a riding inside the exact application, plus the potential
// mismatch between v1 and the bare profile.
GridField coupling_term(const LayerProblem& lp, const ProjectedContext& ctx,
                        const GridField& phi, SEdge edge) {
  GridField m = phi;
  fill_differences(m);
  const GridField dgeo = apply_fermi_exact(lp, m, false);
  GridField out = ctx.layout;
  const double idt2 = 1.0 / (phi.dt * phi.dt), ids2 = 1.0 / (phi.ds * phi.ds);
  for (std::size_t i = 0; i < phi.ns; ++i)
    for (std::size_t j = 1; j + 1 < phi.nt; ++j) {
      double lap =
          (phi.at(i, j - 1) - 2.0 * phi.at(i, j) + phi.at(i, j + 1)) * idt2;
      const std::size_t il =
          (i == 0) ? (edge == SEdge::Neumann ? 1 : phi.ns - 1) : i - 1;
      const std::size_t ir =
          (i == phi.ns - 1) ? (edge == SEdge::Neumann ? phi.ns - 2 : 0) : i + 1;
      lap += (phi.at(il, j) - 2.0 * phi.at(i, j) + phi.at(ir, j)) * ids2;
      const double t = phi.t_of(j);
      const double mism = ctx.well->d2F(ctx.prof->w_at(t)) -
                          ctx.well->d2F(ctx.v1.at(i, j));
      out.at(i, j) = dgeo.at(i, j) - lap + mism * phi.at(i, j);
    }
  return out;
}

}  // namespace

NonlinearProjectedSolve solve_nonlinear_projected(const ProjectedContext& ctx,
                                                  const Displacement& disp,
                                                  const ProjectedConfig& cfg) {
  if (cfg.max_iterations < 1 || !(cfg.tolerance > 0.0) ||
      !(cfg.rel_tolerance >= 0.0) || !(cfg.ball_multiplier > 0.0))
    throw std::invalid_argument("solve_nonlinear_projected: bad configuration");
  if (!ctx.op) throw std::invalid_argument("solve_nonlinear_projected: empty context");

  std::vector<double> sig(ctx.layout.ns), h(ctx.layout.ns), dh(ctx.layout.ns),
      d2h(ctx.layout.ns);
  for (std::size_t i = 0; i < ctx.layout.ns; ++i) {
    sig[i] = ctx.eps * ctx.layout.s_of(i);
    h[i] = disp.h(sig[i]);
    dh[i] = disp.dh(sig[i]);
    d2h[i] = disp.d2h(sig[i]);
  }
  const double hn = weighted_norm_1d(WeightedNorm1D{}, sig, h, dh, d2h);
  const double ball = cfg.ball_multiplier * ctx.eps;
  if (hn > ball) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "solve_nonlinear_projected: displacement outside the ball, norm %g",
                  hn);
    throw std::invalid_argument(buf);
  }

  const LayerProblem lp{ctx.chart, ctx.pb, &disp, ctx.well, ctx.eps};
  const GridField stilde = apply_fermi_exact(lp, ctx.v1);

  NonlinearProjectedSolve out;
  const WeightedNorm2D w2{3.0, 1.2, ctx.eps};
  out.source_norm = weighted_c0l_norm_2d(w2, stilde);
  out.outer_bound = std::exp(-w2.sigma * 0.25 / (2.0 * ctx.eps));

  GridField phi = ctx.layout;  // zeros
  GridField rhs = ctx.layout;
  int growth = 0;
  for (int k = 0; k < cfg.max_iterations; ++k) {
    if (k == 0) {
      for (std::size_t v = 0; v < rhs.values.size(); ++v)
        rhs.values[v] = -stilde.values[v];
    } else {
      const GridField n1 = coupling_term(lp, ctx, phi, cfg.s_edge);
      for (std::size_t v = 0; v < rhs.values.size(); ++v)
        rhs.values[v] = -stilde.values[v] - n1.values[v];
    }
    for (std::size_t i = 0; i < rhs.ns; ++i)
      rhs.at(i, 0) = rhs.at(i, rhs.nt - 1) = 0.0;

    ProjectedSolve ps = ctx.op->solve(rhs);
    double delta = 0.0;
    for (std::size_t v = 0; v < phi.values.size(); ++v)
      delta = std::max(delta, std::abs(ps.phi.values[v] - phi.values[v]));
    if (!out.update_sups.empty() && delta >= out.update_sups.back()) {
      if (++growth >= 2) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "solve_nonlinear_projected: no contraction at iterate %d, update %g",
                      k + 1, delta);
        throw std::runtime_error(buf);
      }
    } else {
      growth = 0;
    }
    out.update_sups.push_back(delta);
    phi = ps.phi;
    out.solve = std::move(ps);
    out.iterations = k + 1;
    double psup = 0.0;
    for (double v : phi.values) psup = std::max(psup, std::abs(v));
    if (delta < cfg.tolerance + cfg.rel_tolerance * psup) {
      out.converged = true;
      break;
    }
  }
  out.phi_norm = weighted_c2l_norm_2d(w2, phi);
  return out;
}

void write_multiplier_csv(const ProjectedSolve& sol, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_multiplier_csv: cannot open " + path);
  std::fprintf(f, "s,c,c_formula\n");
  for (std::size_t i = 0; i < sol.s.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g\n", sol.s[i], sol.c[i],
                 sol.c_formula[i]);
  std::fclose(f);
}

}  // namespace aclab
