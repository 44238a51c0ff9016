// SPDX-License-Identifier: MIT
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "aclab/field.hpp"
#include "aclab/geometry.hpp"
#include "aclab/jacobi.hpp"
#include "aclab/numerics.hpp"
#include "aclab/profile.hpp"
#include "aclab/projected2d.hpp"

using namespace aclab;

namespace {

const DoubleWell& well() {
  static const DoubleWell w = make_twin_pit();
  return w;
}
const HeteroclinicProfile& profile() {
  static const HeteroclinicProfile p = solve_heteroclinic(well());
  return p;
}
const Corrector& psi0c() {
  static const Corrector c = corrector_psi0(profile(), well());
  return c;
}
const Corrector& psi1c() {
  static const Corrector c = corrector_psi1(profile(), well());
  return c;
}
const FermiChart& line_chart() {
  static const FermiChart c = make_chart(PlanarCurve::from_graph(CurveKind::Line));
  return c;
}

// Potentials pulled back to the flat line.  "smooth" widens the kink
// smoothing of the decaying example so every coefficient derivative is
// resolved by the grid; "kink" keeps the default narrow smoothing whose
// curvature is concentrated below grid scale.
const PulledBackPotential& flat_pb() {
  static const PotentialField f = constant_potential();
  static const PulledBackPotential pb = pull_back(f, line_chart().curve);
  return pb;
}
const PulledBackPotential& smooth_pb() {
  static const PotentialField f = example1_potential(1.0, 0.0, 0.25);
  static const PulledBackPotential pb = pull_back(f, line_chart().curve);
  return pb;
}
const PulledBackPotential& kink_pb() {
  static const PotentialField f = example1_potential();
  static const PulledBackPotential pb = pull_back(f, line_chart().curve);
  return pb;
}

const ProjectedContext& smooth_ctx(double eps) {
  static std::map<double, ProjectedContext> cache;
  auto it = cache.find(eps);
  if (it == cache.end())
    it = cache.emplace(eps, make_projected_context(line_chart(), smooth_pb(), well(),
                                                   profile(), psi0c(), psi1c(), eps))
             .first;
  return it->second;
}

// Shared 161 x 321 rectangle and its factored operator for the linear cases.
const GridField& battery_layout() {
  static const GridField g = make_grid_field(-20.0, 20.0, 0.25, -8.0, 8.0, 0.05);
  return g;
}
const ProjectedOperator& battery_op() {
  static const ProjectedOperator op(battery_layout(), profile(), well(), {});
  return op;
}

template <typename F>
GridField sampled(const GridField& layout, F f) {
  GridField g = layout;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) g.at(i, j) = f(g.s_of(i), g.t_of(j));
  return g;
}

double generic_even(double s, double t) {
  return std::exp(-t * t / 2.0) * std::cos(1.3 * t) / (1.0 + 0.02 * s * s);
}

double vec_sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Single localized displacement bump with analytic derivatives.
struct Bump final : Displacement {
  double a;
  explicit Bump(double x) : a(x) {}
  double h(double s) const override { return a / std::cosh(s); }
  double dh(double s) const override { return -a * std::tanh(s) / std::cosh(s); }
  double d2h(double s) const override {
    const double th = std::tanh(s), se = 1.0 / std::cosh(s);
    return a * se * (th * th - se * se);
  }
};

double displacement_distance(const ProjectedContext& ctx, const Displacement& d1,
                             const Displacement& d2) {
  std::vector<double> sg(ctx.layout.ns), h(ctx.layout.ns), dh(ctx.layout.ns),
      d2h(ctx.layout.ns);
  for (std::size_t i = 0; i < ctx.layout.ns; ++i) {
    const double s = ctx.eps * ctx.layout.s_of(i);
    sg[i] = s;
    h[i] = d1.h(s) - d2.h(s);
    dh[i] = d1.dh(s) - d2.dh(s);
    d2h[i] = d1.d2h(s) - d2.d2h(s);
  }
  return weighted_norm_1d(WeightedNorm1D{}, sg, h, dh, d2h);
}

}  // namespace

TEST_CASE("profile-weighted input collapses to the multiplier") {
  const GridField g = sampled(battery_layout(), [&](double s, double t) {
    return profile().dw_at(t) / (1.0 + 0.01 * s * s);
  });
  const ProjectedSolve sol = battery_op().solve(g);

  CHECK(sol.phi.sup() < 1e-12);
  double cerr = 0.0;
  for (std::size_t i = 0; i < sol.s.size(); ++i)
    cerr = std::max(cerr, std::abs(sol.c[i] + 1.0 / (1.0 + 0.01 * sol.s[i] * sol.s[i])));
  CHECK(cerr < 1e-12);
  CHECK(sol.residual_sup < 1e-10);
  CHECK(sol.orthogonality_sup < 1e-10);
  CHECK(sol.c_consistency < 1e-12);
  CHECK_FALSE(sol.resonance_warning);
}

TEST_CASE("odd input leaves the multiplier at zero") {
  const GridField g = sampled(battery_layout(), [](double s, double t) {
    return t * std::exp(-t * t) / std::cosh(0.2 * s);
  });
  const ProjectedSolve sol = battery_op().solve(g);

  CHECK(vec_sup(sol.c) < 1e-12);
  CHECK(vec_sup(sol.c_formula) < 1e-12);
  CHECK(sol.phi.sup() > 0.05);  // genuine correction, just no layer shadow
  CHECK(sol.residual_sup < 1e-10);
  CHECK(sol.orthogonality_sup < 1e-10);
}

TEST_CASE("solver invariants hold on a generic source") {
  const GridField g = sampled(battery_layout(), generic_even);
  const ProjectedSolve sol = battery_op().solve(g);

  CHECK(sol.residual_sup < 1e-10);
  CHECK(sol.orthogonality_sup < 1e-8);
  CHECK(sol.phi.sup() > 0.05);
  CHECK(sol.phi.sup() < 1.0);

  // The gap between the discrete multiplier and the closed-form report is a
  // grid commutator: it shrinks at second order, it is not solver error.
  auto ccons_on = [&](double ds, double dt) {
    const GridField lay = make_grid_field(-20.0, 20.0, ds, -8.0, 8.0, dt);
    return solve_linear_projected(sampled(lay, generic_even), profile(), well())
        .c_consistency;
  };
  const double c0 = ccons_on(0.5, 0.1);
  const double c1 = ccons_on(0.25, 0.05);
  const double c2 = ccons_on(0.125, 0.025);
  CHECK(c0 < 5e-4);
  CHECK(c0 / c1 > 2.5);
  CHECK(c0 / c1 < 6.0);
  CHECK(c1 / c2 > 2.5);
  CHECK(c1 / c2 < 6.0);
}

TEST_CASE("solution converges at second order under refinement") {
  auto solve_on = [&](double ds, double dt) {
    const GridField lay = make_grid_field(-20.0, 20.0, ds, -8.0, 8.0, dt);
    return solve_linear_projected(sampled(lay, generic_even), profile(), well());
  };
  const ProjectedSolve r0 = solve_on(0.5, 0.1);
  const ProjectedSolve r1 = solve_on(0.25, 0.05);
  const ProjectedSolve r2 = solve_on(0.125, 0.025);

  auto diff_at = [](const ProjectedSolve& a, const ProjectedSolve& b) {
    double d = 0.0;  // b is factor-2 nested in a
    for (std::size_t i = 0; i < a.phi.ns; ++i)
      for (std::size_t j = 0; j < a.phi.nt; ++j)
        d = std::max(d, std::abs(a.phi.at(i, j) - b.phi.at(2 * i, 2 * j)));
    return d;
  };
  const double d01 = diff_at(r0, r1), d12 = diff_at(r1, r2);
  CHECK(d01 / d12 > 3.0);
  CHECK(d01 / d12 < 5.5);
}

TEST_CASE("near null pair splits the layer from the transverse gap") {
  const ModeEstimate un = battery_op().near_null(false);
  const ModeEstimate co = battery_op().near_null(true);

  CHECK(std::abs(un.eigenvalue) < 1e-3);
  CHECK(std::abs(co.eigenvalue + 1.5) < 2e-3);

  // The unconstrained mode is the layer slope up to normalization.
  double wsup = 0.0;
  for (std::size_t j = 0; j < battery_layout().nt; ++j)
    wsup = std::max(wsup, std::abs(profile().dw_at(battery_layout().t_of(j))));
  double shape = 0.0;
  const std::size_t mid = battery_layout().ns / 2;
  const double sgn = un.mode.at(mid, battery_layout().nt / 2) > 0.0 ? 1.0 : -1.0;
  for (std::size_t j = 1; j + 1 < battery_layout().nt; ++j)
    shape = std::max(shape, std::abs(sgn * un.mode.at(mid, j) -
                                     profile().dw_at(battery_layout().t_of(j)) / wsup));
  CHECK(shape < 5e-3);
}

TEST_CASE("periodic edges solve to the same tolerance") {
  ProjectedConfig pc;
  pc.s_edge = SEdge::Periodic;
  const ProjectedOperator op(battery_layout(), profile(), well(), pc);
  const ProjectedSolve sol = op.solve(sampled(battery_layout(), generic_even));

  CHECK(sol.residual_sup < 1e-10);
  CHECK(sol.orthogonality_sup < 1e-8);
  CHECK(sol.phi.sup() > 0.05);
}

TEST_CASE("estimate constant is stable across grids") {
  const WeightedNorm2D wn{2.0, 1.2, 1.0};
  auto cest = [&](double ds, double dt, double S, double T) {
    const GridField lay = make_grid_field(-S, S, ds, -T, T, dt);
    const GridField g = sampled(lay, [](double s, double t) {
      return std::exp(-t * t / 2.0) * std::cos(1.3 * t) / std::pow(1.0 + std::abs(s), 2.0);
    });
    const ProjectedSolve ps = solve_linear_projected(g, profile(), well());
    return weighted_c2l_norm_2d(wn, ps.phi) / weighted_c0l_norm_2d(wn, g);
  };
  std::vector<double> cs = {cest(0.5, 0.1, 20.0, 8.0), cest(0.25, 0.05, 20.0, 8.0),
                            cest(0.125, 0.025, 20.0, 8.0), cest(0.25, 0.05, 30.0, 8.0),
                            cest(0.25, 0.05, 20.0, 10.0)};
  double lo = cs[0], hi = cs[0];
  for (double c : cs) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi / lo < 1.25);
  CHECK(hi < 10.0);
}

TEST_CASE("flat line needs no correction") {
  const ProjectedContext ctx = make_projected_context(line_chart(), flat_pb(), well(),
                                                      profile(), psi0c(), psi1c(), 0.1);
  const NonlinearProjectedSolve r = solve_nonlinear_projected(ctx, ZeroDisplacement{});

  CHECK(r.converged);
  CHECK(r.iterations <= 4);
  CHECK(r.solve.phi.sup() < 1e-6);
  CHECK(vec_sup(r.solve.c) < 1e-12);
}

TEST_CASE("correction scale tracks the fourth power on a smooth potential") {
  const std::vector<double> eps = {0.2, 0.1, 0.05};
  std::vector<double> sups;
  double prev = 1e300;
  for (double e : eps) {
    const NonlinearProjectedSolve r =
        solve_nonlinear_projected(smooth_ctx(e), ZeroDisplacement{});
    CHECK(r.converged);
    CHECK(r.iterations <= 8);
    CHECK(r.solve.residual_sup < 1e-10);
    CHECK(r.solve.orthogonality_sup < 1e-8);
    CHECK(r.solve.c_consistency < 1e-8);
    CHECK(vec_sup(r.solve.c) < 1e-12);  // even coefficient, odd source
    for (std::size_t k = 1; k < r.update_sups.size(); ++k)
      CHECK(r.update_sups[k] < r.update_sups[k - 1]);
    CHECK(r.source_norm > 0.0);
    CHECK(r.solve.phi.sup() < prev);
    prev = r.solve.phi.sup();
    sups.push_back(r.solve.phi.sup());
  }
  const SlopeFit fit = fit_loglog(eps, sups);
  CHECK(fit.slope >= 3.5);
  CHECK(fit.slope <= 4.5);
}

TEST_CASE("kink mass dominates the response on the default potential") {
  // The default coefficient keeps its kink smoothing below grid scale; the
  // correction then responds to the integrated mass, one power below the
  // smooth rate.  The ratio across one halving pins that mechanism.
  std::vector<double> sups;
  for (double e : {0.1, 0.05}) {
    const ProjectedContext ctx = make_projected_context(line_chart(), kink_pb(), well(),
                                                        profile(), psi0c(), psi1c(), e);
    const NonlinearProjectedSolve r = solve_nonlinear_projected(ctx, ZeroDisplacement{});
    CHECK(r.converged);
    CHECK(r.iterations <= 15);
    sups.push_back(r.solve.phi.sup());
  }
  CHECK(sups[0] / sups[1] > 6.0);
  CHECK(sups[0] / sups[1] < 12.0);
}

TEST_CASE("correction is lipschitz in the displacement") {
  std::vector<double> ratios;
  for (double e : {0.1, 0.05}) {
    const ProjectedContext& ctx = smooth_ctx(e);
    const Bump d1(0.05 * e), d2(-0.04 * e);
    const NonlinearProjectedSolve n1 = solve_nonlinear_projected(ctx, d1);
    const NonlinearProjectedSolve n2 = solve_nonlinear_projected(ctx, d2);
    CHECK(n1.converged);
    CHECK(n2.converged);
    double dphi = 0.0;
    for (std::size_t v = 0; v < n1.solve.phi.values.size(); ++v)
      dphi = std::max(dphi, std::abs(n1.solve.phi.values[v] - n2.solve.phi.values[v]));
    const double dist = displacement_distance(ctx, d1, d2);
    CHECK(dist > 1e-6);
    ratios.push_back(dphi / dist);
    CHECK(ratios.back() < 0.05 * e * e * e);
  }
  CHECK(ratios[1] / ratios[0] < 0.25);  // one cube of the halving, with margin
}

TEST_CASE("large displacement stays inside contraction") {
  ProjectedConfig big;
  big.ball_multiplier = 1e6;
  const NonlinearProjectedSolve r =
      solve_nonlinear_projected(smooth_ctx(0.2), Bump(3.0), big);
  CHECK(r.converged);
  CHECK(r.solve.phi.sup() < 0.1);
  CHECK(r.solve.orthogonality_sup < 1e-8);
}

TEST_CASE("guards reject misuse and non-contraction") {
  const GridField degenerate = make_grid_field(-1.0, 1.0, 2.0, -8.0, 8.0, 0.05);
  CHECK_THROWS_AS(ProjectedOperator(degenerate, profile(), well(), {}),
                  std::invalid_argument);

  const GridField short_t = make_grid_field(-5.0, 5.0, 0.25, -0.25, 0.25, 0.05);
  CHECK_THROWS_AS(ProjectedOperator(short_t, profile(), well(), {}), std::runtime_error);

  const GridField off = make_grid_field(-10.0, 10.0, 0.25, -8.0, 8.0, 0.05);
  CHECK_THROWS_AS(battery_op().solve(off), std::invalid_argument);

  ProjectedConfig bad;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(solve_nonlinear_projected(smooth_ctx(0.1), ZeroDisplacement{}, bad),
                  std::invalid_argument);

  ProjectedContext empty;
  CHECK_THROWS_AS(solve_nonlinear_projected(empty, ZeroDisplacement{}),
                  std::invalid_argument);

  CHECK_THROWS_AS(solve_nonlinear_projected(smooth_ctx(0.05), Bump(1.0)),
                  std::invalid_argument);

  // Far outside the perturbative regime the fixed point genuinely expands and
  // the iteration refuses to continue.
  const ProjectedContext wide = make_projected_context(line_chart(), kink_pb(), well(),
                                                       profile(), psi0c(), psi1c(), 2.0);
  CHECK_THROWS_AS(solve_nonlinear_projected(wide, ZeroDisplacement{}),
                  std::runtime_error);
}

TEST_CASE("multiplier table exports to csv") {
  const GridField g = sampled(battery_layout(), generic_even);
  const ProjectedSolve sol = battery_op().solve(g);
  const std::string path = "projected_multiplier_test.csv";
  write_multiplier_csv(sol, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "s,c,c_formula");
  std::size_t rows = 0;
  std::string row;
  double first_s = 0.0, first_c = 0.0;
  while (std::getline(in, row)) {
    if (rows == 0) {
      std::istringstream ss(row);
      std::string tok;
      std::getline(ss, tok, ',');
      first_s = std::stod(tok);
      std::getline(ss, tok, ',');
      first_c = std::stod(tok);
    }
    ++rows;
  }
  CHECK(rows == sol.s.size());
  CHECK(first_s == doctest::Approx(sol.s[0]).epsilon(1e-14));
  CHECK(first_c == doctest::Approx(sol.c[0]).epsilon(1e-14));
  std::remove(path.c_str());
}
