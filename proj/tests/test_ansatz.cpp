// SPDX-License-Identifier: MIT
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "aclab/ansatz.hpp"
#include "aclab/field.hpp"
#include "aclab/geometry.hpp"
#include "aclab/numerics.hpp"
#include "aclab/profile.hpp"

using namespace aclab;

namespace {

const HeteroclinicProfile& profile() {
  static const HeteroclinicProfile p = solve_heteroclinic(make_twin_pit());
  return p;
}
const Corrector& psi0() {
  static const Corrector c = corrector_psi0(profile(), make_twin_pit());
  return c;
}
const Corrector& psi1() {
  static const Corrector c = corrector_psi1(profile(), make_twin_pit());
  return c;
}
const PotentialField& decaying_field() {
  static const PotentialField f = example1_potential();
  return f;
}
const PotentialField& flat_field() {
  static const PotentialField f = constant_potential();
  return f;
}
const PlanarCurve& straight_curve() {
  static const PlanarCurve c = PlanarCurve::from_graph(CurveKind::Line);
  return c;
}

}  // namespace

TEST_CASE("grid fields carry their lattice and round-trip through disk") {
  GridField g = make_grid_field(-2.0, 2.0, 0.5, -1.0, 1.0, 0.25);
  REQUIRE(g.ns == 9);
  REQUIRE(g.nt == 9);
  CHECK(g.s_of(0) == -2.0);
  CHECK(g.s_of(8) == 2.0);
  CHECK(g.t_of(4) == 0.0);
  for (std::size_t m = 0; m < g.values.size(); ++m)
    g.values[m] = std::sin(3.0 * static_cast<double>(m)) * 1e3 +
                  0.125 * static_cast<double>(m);

  const std::string path = "ansatz_io_test.acgf";
  write_grid_field(g, path);
  const GridField r = read_grid_field(path);
  CHECK(r.ns == g.ns);
  CHECK(r.nt == g.nt);
  CHECK(r.s_min == g.s_min);
  CHECK(r.s_max == g.s_max);
  CHECK(r.t_min == g.t_min);
  CHECK(r.t_max == g.t_max);
  CHECK(r.ds == g.ds);
  CHECK(r.dt == g.dt);
  bool bitwise = r.values.size() == g.values.size();
  for (std::size_t m = 0; bitwise && m < g.values.size(); ++m)
    bitwise = r.values[m] == g.values[m];
  CHECK(bitwise);

  // a second write of the identical field produces identical bytes
  const std::string path2 = "ansatz_io_test2.acgf";
  write_grid_field(r, path2);
  const GridField r2 = read_grid_field(path2);
  bool again = true;
  for (std::size_t m = 0; again && m < g.values.size(); ++m)
    again = r2.values[m] == g.values[m];
  CHECK(again);

  CHECK_THROWS(read_grid_field("ansatz_io_missing.acgf"));
  {
    std::FILE* f = std::fopen("ansatz_io_bad.acgf", "wb");
    REQUIRE(f != nullptr);
    std::fputs("ACGFxxxx", f);
    std::fclose(f);
  }
  CHECK_THROWS(read_grid_field("ansatz_io_bad.acgf"));

  const GridField l1 = experiment_layout(0.2);
  CHECK(l1.ns == 2401);
  CHECK(l1.nt == 1051);
  CHECK(l1.s_min == doctest::Approx(-120.0).epsilon(1e-14));
  CHECK(l1.t_max == doctest::Approx(5.25).epsilon(1e-14));
  const GridField l2 = experiment_layout(0.025);
  CHECK(l2.t_max == doctest::Approx(14.0).epsilon(1e-14));  // capped
  CHECK(l2.nt == 2801);
}

TEST_CASE("bicubic lookup reproduces knots exactly and smooth fields closely") {
  GridField g = make_grid_field(-3.0, 3.0, 0.05, -2.0, 2.0, 0.05);
  const auto f = [](double s, double t) {
    return std::sin(0.8 * s) * std::exp(-0.3 * t * t) + 0.2 * t;
  };
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) g.at(i, j) = f(g.s_of(i), g.t_of(j));

  CHECK(gf_interp(g, g.s_of(17), g.t_of(9)) == g.at(17, 9));
  CHECK(gf_interp(g, g.s_of(0), g.t_of(40)) == g.at(0, 40));

  double worst = 0.0;
  for (double s = -2.4; s <= 2.4; s += 0.313)
    for (double t = -1.7; t <= 1.7; t += 0.217)
      worst = std::max(worst, std::abs(gf_interp(g, s, t) - f(s, t)));
  CHECK(worst < 5e-4);

  // queries past the rectangle clamp to the edge
  CHECK(gf_interp(g, 10.0, 0.313) == gf_interp(g, 3.0, 0.313));
  CHECK(gf_interp(g, -10.0, 0.313) == gf_interp(g, -3.0, 0.313));
  CHECK(gf_interp(g, 0.313, 99.0) == gf_interp(g, 0.313, 2.0));
}

TEST_CASE("difference caches agree with derivatives of a polynomial") {
  GridField g = make_grid_field(-4.0, 4.0, 0.1, -2.0, 2.0, 0.05);
  const auto S = [](double s) { return 2.0 + 0.1 * s - 0.03 * s * s; };
  const auto dS = [](double s) { return 0.1 - 0.06 * s; };
  const auto T = [](double t) { return 1.0 + 0.5 * t + 0.2 * t * t + 0.01 * t * t * t; };
  const auto dT = [](double t) { return 0.5 + 0.4 * t + 0.03 * t * t; };
  const auto d2T = [](double t) { return 0.4 + 0.06 * t; };
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nt; ++j) g.at(i, j) = S(g.s_of(i)) * T(g.t_of(j));
  fill_differences(g);
  double w1 = 0, w2 = 0, w3 = 0, w4 = 0, w5 = 0;
  for (std::size_t i = 2; i + 2 < g.ns; i += 3) {
    for (std::size_t j = 2; j + 2 < g.nt; j += 3) {
      const double s = g.s_of(i), t = g.t_of(j);
      const std::size_t m = i * g.nt + j;
      w1 = std::max(w1, std::abs(g.d_s[m] - dS(s) * T(t)));
      w2 = std::max(w2, std::abs(g.d_t[m] - S(s) * dT(t)));
      w3 = std::max(w3, std::abs(g.d_ss[m] - (-0.06) * T(t)));
      w4 = std::max(w4, std::abs(g.d_tt[m] - S(s) * d2T(t)));
      w5 = std::max(w5, std::abs(g.d_st[m] - dS(s) * dT(t)));
    }
  }
  CHECK(w1 < 1e-9);
  CHECK(w2 < 1e-9);
  CHECK(w3 < 1e-9);
  CHECK(w4 < 1e-9);
  CHECK(w5 < 1e-9);
}

TEST_CASE("cutoffs nest exactly and vanish at the tube edge") {
  const FermiChart fc = make_chart(straight_curve());
  const ZeroDisplacement zero;
  const CutoffFamily cz = make_cutoffs(fc, zero, 0.1);

  CHECK(cz.rho(0.0) == doctest::Approx(2.5).epsilon(1e-14));
  // eta(u) = 1 for u <= 1 puts the flat part of zeta_2 at |t| <= rho - 1
  CHECK(cz.zeta(2, 0.0, 1.5) == 1.0);
  CHECK(cz.zeta(2, 0.0, -1.5) == 1.0);
  CHECK(cz.zeta(2, 0.0, cz.rho(0.0)) == 0.0);
  CHECK(cz.zeta(2, 0.0, 3.7) == 0.0);
  const double mid = cz.zeta(2, 0.0, 2.0);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);

  for (double s : {0.0, 5.0, -5.0, 40.0, -40.0}) {
    for (double t = -cz.rho(s) - 1.0; t <= cz.rho(s) + 1.0; t += 0.13) {
      const double z2 = cz.zeta(2, s, t);
      const double z3 = cz.zeta(3, s, t);
      const double z4 = cz.zeta(4, s, t);
      CHECK(z3 * z4 == z4);
      CHECK(z2 * z3 == z3);
      CHECK(z4 <= z3);
      CHECK(z3 <= z2);
    }
  }

  const AnalyticDisplacement bump(
      [](double s) { return 0.3 / std::cosh(s); },
      [](double s) { return -0.3 * std::tanh(s) / std::cosh(s); },
      [](double s) {
        const double c = 1.0 / std::cosh(s), th = std::tanh(s);
        return 0.3 * c * (th * th - c * c);
      });
  const CutoffFamily cb = make_cutoffs(fc, bump, 0.1);
  const double hh = bump.h(0.1 * 3.0);
  for (double tau : {0.4, 1.7, 2.6}) {
    CHECK(cb.zeta(3, 3.0, -hh + tau) ==
          doctest::Approx(cb.zeta(3, 3.0, -hh - tau)).epsilon(1e-12));
  }

  CHECK_THROWS(make_cutoffs(fc, zero, 0.0));
}

TEST_CASE("leading ansatz samples the profile column by column") {
  const GridField layout = experiment_layout(0.1);
  GridField v0 = build_v0(profile(), layout);

  const std::size_t jmid = (v0.nt - 1) / 2;
  CHECK(v0.t_of(jmid) == 0.0);
  for (std::size_t i = 0; i < v0.ns; i += 400) {
    CHECK(v0.at(i, jmid) == 0.0);
    for (std::size_t j = 37; j < v0.nt; j += 257) CHECK(v0.at(i, j) == v0.at(0, j));
  }

  const GridField tall = make_grid_field(-5.0, 5.0, 0.5, -14.0, 14.0, 0.01);
  const GridField v0t = build_v0(profile(), tall);
  CHECK(std::abs(v0t.at(3, v0t.nt - 1) - 1.0) < 1e-7);
  CHECK(std::abs(v0t.at(3, 0) + 1.0) < 1e-7);

  fill_differences(v0);
  double wd = 0.0, ws = 0.0;
  for (std::size_t i = 2; i + 2 < v0.ns; i += 379) {
    for (std::size_t j = 2; j + 2 < v0.nt; j += 41) {
      const std::size_t m = i * v0.nt + j;
      wd = std::max(wd, std::abs(v0.d_t[m] - profile().dw_at(v0.t_of(j))));
      ws = std::max(ws, std::abs(v0.d_s[m]));
    }
  }
  CHECK(wd < 1e-8);
  CHECK(ws < 1e-14);  // stencil roundoff on bitwise-equal rows
}

TEST_CASE("first corrector vanishes flat and scales quadratically") {
  const auto pb_flat = pull_back(flat_field(), straight_curve());
  const GridField small = make_grid_field(-40.0, 40.0, 0.5, -3.0, 3.0, 0.01);
  const GridField z = build_phi1(psi0(), psi1(), pb_flat, 0.1, small);
  CHECK(z.sup() == 0.0);

  const auto pb = pull_back(decaying_field(), straight_curve());
  std::vector<double> es{0.2, 0.1, 0.05}, sups;
  for (double e : es) {
    const GridField phi = build_phi1(psi0(), psi1(), pb, e, experiment_layout(e));
    sups.push_back(phi.sup());
  }
  const auto fit = fit_loglog(es, sups);
  CHECK(fit.slope > 1.8);
  CHECK(fit.slope < 2.2);

  // weighted row sups stay pinned: the curve data decays exactly at the
  // cubic rate the weight removes
  const GridField phi = build_phi1(psi0(), psi1(), pb, 0.1, experiment_layout(0.1));
  std::vector<double> wr(phi.ns, 0.0);
  for (std::size_t i = 0; i < phi.ns; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < phi.nt; ++j) rs = std::max(rs, std::abs(phi.at(i, j)));
    const double sig = std::abs(0.1 * phi.s_of(i));
    wr[i] = rs * std::pow(1.0 + sig, 3.0);
  }
  const double w0 = wr[(phi.ns - 1) / 2];
  double wmax = 0.0, wmin = 1e300;
  for (double v : wr) {
    wmax = std::max(wmax, v);
    wmin = std::min(wmin, v);
  }
  CHECK(w0 > 0.0);
  CHECK(wmax / w0 < 1.1);
  CHECK(wmin / w0 > 0.9);
}

TEST_CASE("global extension is continuous across the seam and classifies sides") {
  const double eps = 0.1;
  const FermiChart fc = make_chart(straight_curve());
  const ZeroDisplacement zero;
  const DilatedChart dil = dilated_chart(fc, zero, eps);
  const CutoffFamily cuts = make_cutoffs(fc, zero, eps);

  const GridField layout = experiment_layout(eps);
  const auto pb = pull_back(decaying_field(), straight_curve());
  const GridField v1 =
      gf_add(build_v0(profile(), layout), build_phi1(psi0(), psi1(), pb, eps, layout));
  const GlobalApproximation glob = build_global(v1, dil, cuts, profile());

  // far points resolve by side of the curve alone
  CHECK(glob({0.0, -10.0}).value == 1.0);
  CHECK(glob({0.0, 10.0}).value == -1.0);
  CHECK_FALSE(glob({0.0, 10.0}).in_chart);
  CHECK(glob({7.0, -25.0}).value == 1.0);

  // on the interface the transition is at its center, of corrector size
  const auto on_curve = glob({0.5, 0.0});
  CHECK(on_curve.in_chart);
  CHECK(std::abs(on_curve.value) < eps * eps);

  // chart round trip recovers the sampled rectangle on the core tube
  double worst = 0.0;
  for (std::size_t i = v1.ns / 2 - 200; i <= v1.ns / 2 + 200; i += 50) {
    for (double t : {-0.4, -0.15, 0.0, 0.25}) {
      const std::size_t j =
          static_cast<std::size_t>(std::llround((t - v1.t_min) / v1.dt));
      const Vec2 x = dil.forward(v1.s_of(i), v1.t_of(j));
      const auto e = glob(x);
      REQUIRE(e.in_chart);
      worst = std::max(worst, std::abs(e.value - v1.at(i, j)));
    }
  }
  CHECK(worst < 1e-10);

  // the glue to the step stays under the profile tail bound, and the
  // whole function never leaves the corrected range
  double amp = 0.0;
  for (double sg : {0.0, 1.6, -1.6}) {
    const double s = sg / eps;
    const double r = cuts.rho(s);
    const double bound = std::exp(-kSqrt2 * (r - 3.0));
    for (double u = r - 2.0; u <= r - 1.0; u += 0.05) {
      for (double sd : {1.0, -1.0}) {
        const auto e = glob(dil.forward(s, sd * u));
        CHECK(std::abs(e.value - sd) < bound);
        amp = std::max(amp, std::abs(e.value));
      }
    }
    for (double t = -6.0; t <= 6.0; t += 0.37)
      amp = std::max(amp, std::abs(glob(dil.forward(s, t)).value));
  }
  CHECK(amp <= 1.0 + 2.0 * eps * eps);
}

TEST_CASE("weight function blends the interface factor and stays above one") {
  const double eps = 0.1;
  const FermiChart fc = make_chart(straight_curve());
  const ZeroDisplacement zero;
  const DilatedChart dil = dilated_chart(fc, zero, eps);
  const CutoffFamily cuts = make_cutoffs(fc, zero, eps);

  const WeightK k2 = make_weight(dil, cuts, 1.2, 2.0);
  const Vec2 core = dil.forward(3.0, 0.5);
  CHECK(k2(core) == doctest::Approx(std::exp(0.5 * 1.2 * 0.5) *
                                    std::pow(1.0 + 0.3, 2.0))
                        .epsilon(1e-9));

  const WeightK k0 = make_weight(dil, cuts, 1.2, 0.0);
  CHECK(k0({30.0, 30.0}) == doctest::Approx(std::exp(0.4 * 60.0)).epsilon(1e-12));

  for (double x = -20.0; x <= 20.0; x += 2.5)
    for (double y = -20.0; y <= 20.0; y += 2.5) CHECK(k0({x, y}) >= 1.0 - 1e-12);

  // fine steps across the blend and on through the tube edge stay gentle
  for (double s : {0.0, 5.0}) {
    const double r = cuts.rho(s);
    double prev = -1.0;
    for (double t = r - 1.2; t <= r + 0.2; t += 0.005) {
      const double v = k0(dil.forward(s, t));
      if (prev > 0.0) CHECK(std::abs(v - prev) / std::min(v, prev) < 0.05);
      prev = v;
    }
  }

  CHECK_THROWS(make_weight(dil, cuts, 1.2, 0.0, 0.7, 0.7));
  CHECK_THROWS(make_weight(dil, cuts, 1.5, 0.0));
  CHECK_THROWS(make_weight(dil, cuts, 1.2, -1.0));
}

TEST_CASE("plane norms weigh fields the way the definitions say") {
  GridField one = make_grid_field(-10.0, 10.0, 0.1, -3.0, 3.0, 0.05);
  std::fill(one.values.begin(), one.values.end(), 1.0);
  WeightedNorm2D flat;
  flat.mu = 0.0;
  flat.sigma = 0.0;
  flat.eps = 0.1;
  CHECK(weighted_c0l_norm_2d(flat, one) == 1.0);
  CHECK(weighted_sup_norm_2d(flat, one) == 1.0);

  GridField g = one;
  for (std::size_t i = 0; i < g.ns; ++i)
    for (std::size_t j = 0; j < g.nt; ++j)
      g.at(i, j) = std::sin(0.7 * g.s_of(i)) * std::cos(1.3 * g.t_of(j)) +
                   0.3 * std::exp(-g.t_of(j) * g.t_of(j));
  GridField g3 = g;
  for (double& v : g3.values) v *= 3.0;
  WeightedNorm2D n;
  n.mu = 1.0;
  n.sigma = 0.8;
  n.eps = 0.1;
  CHECK(weighted_c0l_norm_2d(n, g3) ==
        doctest::Approx(3.0 * weighted_c0l_norm_2d(n, g)).epsilon(1e-13));
  CHECK(weighted_sup_norm_2d(n, g3) ==
        doctest::Approx(3.0 * weighted_sup_norm_2d(n, g)).epsilon(1e-13));

  WeightedNorm2D njr = n;
  njr.window = 2.0;
  CHECK(weighted_c0l_norm_2d(njr, g) >= weighted_c0l_norm_2d(n, g));

  // a field matching the weight exactly stays order one and grid-stable
  WeightedNorm2D m;
  m.mu = 2.0;
  m.sigma = 1.0;
  m.eps = 0.1;
  const auto decay = [&](double s, double t) {
    return std::exp(-m.sigma * std::abs(t)) *
           std::pow(1.0 + std::abs(m.eps * s), -m.mu);
  };
  GridField a = make_grid_field(-60.0, 60.0, 0.2, -5.0, 5.0, 0.02);
  for (std::size_t i = 0; i < a.ns; ++i)
    for (std::size_t j = 0; j < a.nt; ++j) a.at(i, j) = decay(a.s_of(i), a.t_of(j));
  GridField b = make_grid_field(-60.0, 60.0, 0.1, -5.0, 5.0, 0.01);
  for (std::size_t i = 0; i < b.ns; ++i)
    for (std::size_t j = 0; j < b.nt; ++j) b.at(i, j) = decay(b.s_of(i), b.t_of(j));
  const double na = weighted_c0l_norm_2d(m, a);
  const double nb = weighted_c0l_norm_2d(m, b);
  CHECK(na > 1.0);
  CHECK(na < 20.0);
  CHECK(std::abs(nb / na - 1.0) < 0.1);

  const double c2 = weighted_c2l_norm_2d(m, a);
  CHECK(c2 >= weighted_sup_norm_2d(m, a));
  CHECK(std::isfinite(c2));
}
