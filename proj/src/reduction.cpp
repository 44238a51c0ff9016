// SPDX-License-Identifier: MIT
#include "aclab/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "aclab/numerics.hpp"

namespace aclab {

namespace {

struct DispTables {
  std::vector<double> h, dh, d2h;
};

DispTables sample_displacement(const Displacement& disp,
                               const std::vector<double>& sigma) {
  DispTables t;
  const std::size_t n = sigma.size();
  t.h.resize(n);
  t.dh.resize(n);
  t.d2h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.h[i] = disp.h(sigma[i]);
    t.dh[i] = disp.dh(sigma[i]);
    t.d2h[i] = disp.d2h(sigma[i]);
  }
  return t;
}

}  // namespace

ReducedContext make_reduced_context(const FermiChart& chart,
                                    const PulledBackPotential& pb,
                                    const DoubleWell& well,
                                    const HeteroclinicProfile& prof,
                                    const Corrector& psi0,
                                    const Corrector& psi1, double eps,
                                    double sigma_span, double t_cap) {
  if (eps <= 0.0 || sigma_span <= 0.0)
    throw std::invalid_argument("make_reduced_context: eps and span must be positive");
  ReducedContext ctx;
  ctx.chart = &chart;
  ctx.pb = &pb;
  ctx.well = &well;
  ctx.prof = &prof;
  ctx.psi0 = &psi0;
  ctx.psi1 = &psi1;
  ctx.eps = eps;

  ctx.layout = experiment_layout(eps, 0.25, sigma_span, 0.02, 0.01, t_cap);
  ctx.sys = assemble(pb, sigma_span, 0.02);
  if (ctx.sys.sigma.size() != ctx.layout.ns)
    throw std::invalid_argument("make_reduced_context: rectangle and stability grids disagree");
  ctx.kernel = construct_kernel(ctx.sys, sigma_span);

  // certificate on the wide default window, where the tail fit is honest
  {
    const JacobiSystem wide = assemble(pb);
    const KernelPair wkp = construct_kernel(wide);
    ctx.cert = nondegeneracy_check(wide, wkp);
  }

  ctx.v1 = gf_add(build_v0(prof, ctx.layout),
                  build_phi1(psi0, psi1, pb, eps, ctx.layout));
  fill_differences(ctx.v1);

  std::vector<double> prod(psi0.t.size());
  for (std::size_t j = 0; j < psi0.t.size(); ++j)
    prod[j] = psi0.dpsi[j] * prof.dw_at(psi0.t[j]);
  ctx.m_psi0 = simpson(prod, prof.dt);
  return ctx;
}

ReducedRhs reduced_rhs(const ReducedContext& ctx, const Displacement& disp,
                       double ball_radius, const G2Supplier& g2) {
  const std::vector<double>& sig = ctx.sys.sigma;
  const std::size_t n = sig.size();
  if (n == 0 || ctx.layout.ns != n || ctx.kernel.sigma.size() != n)
    throw std::invalid_argument("reduced_rhs: context grids disagree");

  if (ball_radius > 0.0) {
    const DispTables t = sample_displacement(disp, sig);
    const double norm = weighted_norm_1d(WeightedNorm1D{}, sig, t.h, t.dh, t.d2h);
    if (norm > ball_radius)
      throw std::invalid_argument("reduced_rhs: displacement outside the ball, norm " +
                                  std::to_string(norm));
  }

  const LayerProblem lp{ctx.chart, ctx.pb, &disp, ctx.well, ctx.eps};
  const GridField sv1 = apply_fermi_exact(lp, ctx.v1);
  const GridField r1 = residual_r1(lp, *ctx.prof, *ctx.psi0, sv1);
  const CutoffFamily cuts = make_cutoffs(*ctx.chart, disp, ctx.eps);

  const std::size_t nt = ctx.layout.nt;
  const std::vector<double> sw = simpson_weights(nt, ctx.layout.dt);
  std::vector<double> wp(nt), wp2(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    wp[j] = ctx.prof->dw_at(ctx.layout.t_of(j));
    wp2[j] = wp[j] * wp[j];
  }
  const std::size_t tail_n = std::max<std::size_t>(1, nt / 10);

  ReducedRhs out;
  out.sigma = sig;
  out.total.resize(n);
  out.chat_term.resize(n);
  out.a0_term.resize(n);
  out.psi0_term.resize(n);
  out.r1_term.resize(n);
  out.g2_term.assign(n, 0.0);

  const double eps = ctx.eps;
  double sup = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = ctx.layout.s_of(i);
    const CurveFieldData d = ctx.pb->on_curve(sig[i]);
    const double h = disp.h(sig[i]);
    const double hpp = disp.d2h(sig[i]);

    double acc = 0.0, tacc = 0.0, qa = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const double z0 = cuts.zeta(0, s, ctx.layout.t_of(j));
      const double c = sw[j] * z0 * r1.values[i * nt + j] * wp[j];
      acc += c;
      if (j < tail_n || j >= nt - tail_n) tacc += c;
      qa += sw[j] * z0 * (ctx.layout.t_of(j) + h) * wp2[j];
    }
    sup = std::max(sup, std::abs(acc));
    tail = std::max(tail, std::abs(tacc));

    out.chat_term[i] = eps * d.C0hat * kChat;
    out.a0_term[i] = -eps * d.A0 * hpp * qa / kCStar;
    out.psi0_term[i] = eps * eps * d.Qjac * hpp * ctx.m_psi0 / kCStar;
    out.r1_term[i] = acc / (eps * eps * kCStar);
    out.total[i] = out.chat_term[i] + out.a0_term[i] + out.psi0_term[i] +
                   out.r1_term[i];
  }

  out.tail_fraction = tail / std::max(sup, 1e-300);
  out.tail_ok = tail <= 1e-12 || out.tail_fraction <= 1e-3;
  if (tail > 1e-12 && out.tail_fraction > 1e-2)
    throw std::runtime_error("reduced_rhs: quadrature window too narrow, tail fraction " +
                             std::to_string(out.tail_fraction));

  if (g2) {
    std::vector<double> extra = g2(disp);
    if (extra.size() != n)
      throw std::invalid_argument("reduced_rhs: coupling term off the sigma grid");
    out.g2_term = std::move(extra);
    out.g2_included = true;
    for (std::size_t i = 0; i < n; ++i) out.total[i] += out.g2_term[i];
  }
  return out;
}

ReducedState solve_reduced(const ReducedContext& ctx, const ReducedConfig& cfg) {
  if (cfg.max_iterations < 1 || cfg.tolerance <= 0.0 || cfg.ball_multiplier <= 0.0)
    throw std::invalid_argument("solve_reduced: bad configuration");
  const std::vector<double>& sig = ctx.sys.sigma;
  const std::size_t n = sig.size();
  const WeightedNorm1D nrm{};

  ReducedState st;
  st.eps = ctx.eps;
  st.sigma = sig;
  st.h.assign(n, 0.0);
  st.dh.assign(n, 0.0);
  st.d2h.assign(n, 0.0);
  st.ball_radius = cfg.ball_multiplier * ctx.eps;

  std::vector<double> f_last;
  int growth = 0;
  for (int k = 0; k < cfg.max_iterations; ++k) {
    const TableDisplacement cur(sig, st.h, st.dh, st.d2h);
    const ReducedRhs rhs = reduced_rhs(ctx, cur, st.ball_radius, cfg.g2);
    const JacobiSolution sol = solve_linear(ctx.sys, ctx.kernel, rhs.total);

    std::vector<double> uh(n), udh(n), ud2h(n);
    for (std::size_t i = 0; i < n; ++i) {
      uh[i] = sol.h[i] - st.h[i];
      udh[i] = sol.dh[i] - st.dh[i];
      ud2h[i] = sol.d2h[i] - st.d2h[i];
    }
    const double un = weighted_norm_1d(nrm, sig, uh, udh, ud2h);
    if (!st.update_norms.empty()) {
      const double ratio = un / st.update_norms.back();
      st.ratios.push_back(ratio);
      st.contraction_ratio = std::max(st.contraction_ratio, ratio);
      growth = ratio >= 1.0 ? growth + 1 : 0;
      if (growth >= 2)
        throw std::runtime_error("solve_reduced: no contraction at iterate " +
                                 std::to_string(k) + ", update " +
                                 std::to_string(un));
    }
    st.update_norms.push_back(un);

    st.h = sol.h;
    st.dh = sol.dh;
    st.d2h = sol.d2h;
    st.solver_residual = sol.residual_sup;
    f_last = rhs.total;
    st.iterations = k + 1;

    st.h_norm = weighted_norm_1d(nrm, sig, st.h, st.dh, st.d2h);
    st.h_sup = 0.0;
    for (double v : st.h) st.h_sup = std::max(st.h_sup, std::abs(v));
    st.h_sups.push_back(st.h_sup);
    if (st.h_norm > st.ball_radius)
      throw std::runtime_error("solve_reduced: iterate " + std::to_string(k) +
                               " left the ball, norm " + std::to_string(st.h_norm));

    if (un < cfg.tolerance) {
      st.converged = true;
      break;
    }
  }

  // fixed point defect: the last solve satisfied J[h*] = f_last node by
  // node, so the defect is the source moved by the final update
  const TableDisplacement fin(sig, st.h, st.dh, st.d2h);
  const ReducedRhs at_star = reduced_rhs(ctx, fin, st.ball_radius, cfg.g2);
  std::vector<double> defect(n);
  for (std::size_t i = 0; i < n; ++i) defect[i] = f_last[i] - at_star.total[i];
  st.fixed_point_residual = weighted_source_norm_1d(nrm, sig, defect);
  return st;
}

void write_reduction_log(const ReducedState& st, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_reduction_log: cannot open " + path);
  std::fprintf(f, "k,update_norm,ratio,h_sup_over_eps\n");
  for (std::size_t k = 0; k < st.update_norms.size(); ++k) {
    const double ratio = k > 0 ? st.ratios[k - 1] : 0.0;
    std::fprintf(f, "%zu,%.17g,%.17g,%.17g\n", k + 1, st.update_norms[k], ratio,
                 st.h_sups[k] / st.eps);
  }
  std::fclose(f);
}

ProjectionSizeReport projection_size_check(const GridField& theta,
                                           const HeteroclinicProfile& prof,
                                           double eps) {
  ProjectionSizeReport r;
  const std::size_t ns = theta.ns, nt = theta.nt;
  if (ns == 0 || nt == 0)
    throw std::invalid_argument("projection_size_check: empty field");
  const std::vector<double> sw = simpson_weights(nt, theta.dt);
  std::vector<double> wp(nt);
  for (std::size_t j = 0; j < nt; ++j) wp[j] = prof.dw_at(theta.t_of(j));

  r.sigma.resize(ns);
  r.z.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nt; ++j)
      acc += sw[j] * theta.values[i * nt + j] * wp[j];
    r.sigma[i] = eps * theta.s_of(i);
    r.z[i] = acc;
  }
  r.z_norm = weighted_source_norm_1d(WeightedNorm1D{}, r.sigma, r.z);
  WeightedNorm2D n2;
  n2.mu = 3.0;  // matches the (2+alpha)-weight of the curve side
  n2.sigma = 1.2;
  n2.eps = eps;
  r.theta_norm = weighted_c0l_norm_2d(n2, theta);
  r.ratio = r.theta_norm > 0.0 ? r.z_norm / r.theta_norm : 0.0;
  return r;
}

}  // namespace aclab
