// SPDX-License-Identifier: MIT
#include "aclab/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aclab {

namespace {
double lookup(const std::vector<double>& tab, const std::vector<double>& grid,
              double ds, double s) {
  if (s <= grid.front()) return tab.front();
  if (s >= grid.back()) return tab.back();
  return interp_cubic(tab, grid.front(), ds, s);
}
}  // namespace

double JacobiSystem::qtilde_at(double s) const { return lookup(qtilde, sigma, ds, s); }
double JacobiSystem::a0_at(double s) const { return lookup(a0, sigma, ds, s); }
double JacobiSystem::b_at(double s) const { return lookup(b, sigma, ds, s); }
double JacobiSystem::Q_at(double s) const { return lookup(Q, sigma, ds, s); }

JacobiSystem assemble(const PulledBackPotential& pb, double s_max, double ds) {
  JacobiSystem sys;
  sys.ds = ds;
  sys.sigma = make_grid(-s_max, s_max, ds);
  const std::size_t n = sys.sigma.size();
  sys.a0.resize(n);
  sys.b.resize(n);
  sys.Q.resize(n);
  sys.qtilde.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = pb.on_curve(sys.sigma[i]);
    sys.a0[i] = d.a0;
    sys.b[i] = d.b;
    sys.Q[i] = d.Qjac;
    sys.qtilde[i] = d.Qjac + 0.5 * d.d2a0 / d.a0 - 0.25 * d.b * d.b;
  }
  sys.qtilde_exact = [pb](double s) {
    const auto d = pb.on_curve(s);
    return d.Qjac + 0.5 * d.d2a0 / d.a0 - 0.25 * d.b * d.b;
  };

  // decay exponent of Q over the right tail, skipped for vanishing Q
  std::vector<double> xs, ys;
  const auto stride = static_cast<std::size_t>(std::lround(2.0 / ds));
  double qsup = 0.0;
  for (std::size_t i = 0; i < n; i += stride) {
    const double s = sys.sigma[i];
    if (s < 20.0 || s > s_max - 5.0) continue;
    xs.push_back(1.0 + s);
    ys.push_back(std::abs(sys.Q[i]));
    qsup = std::max(qsup, std::abs(sys.Q[i]));
  }
  if (xs.size() >= 3 && qsup > 1e-13)
    sys.alpha_decay = -fit_loglog(xs, ys).slope - 2.0;
  return sys;
}

std::vector<double> liouville_transform(const JacobiSystem& sys) { return sys.qtilde; }

namespace {

// integrate u'' = qtilde u across the grid from one end
struct USol {
  std::vector<double> u, du;
};

USol integrate_liouville(const JacobiSystem& sys, const std::vector<double>& pts,
                         double u0, double du0) {
  const bool exact = static_cast<bool>(sys.qtilde_exact);
  OdeRhs rhs = [&sys, exact](double s, const std::vector<double>& y,
                             std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = (exact ? sys.qtilde_exact(s) : sys.qtilde_at(s)) * y[0];
  };
  OdeOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  opt.max_step = 0.5;
  const auto path = ode45_path(rhs, {u0, du0}, pts, opt);
  USol out;
  out.u.resize(pts.size());
  out.du.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.u[i] = path[i][0];
    out.du[i] = path[i][1];
  }
  return out;
}

}  // namespace

KernelPair construct_kernel(const JacobiSystem& sys, double s_max) {
  KernelPair kp;
  // restrict to the requested window
  const double S = std::min(s_max, -sys.sigma.front());
  std::size_t lo = 0, hi = sys.sigma.size() - 1;
  while (lo < hi && sys.sigma[lo] < -S - 1e-12) ++lo;
  while (hi > lo && sys.sigma[hi] > S + 1e-12) --hi;
  kp.sigma.assign(sys.sigma.begin() + static_cast<long>(lo),
                  sys.sigma.begin() + static_cast<long>(hi) + 1);
  kp.ds = sys.ds;
  const std::size_t n = kp.sigma.size();

  // unit seeds (1, 0) at each end give the branch bounded there, up to
  // the neglected tail of qtilde beyond the window
  std::vector<double> fwd(kp.sigma), bwd(kp.sigma);
  std::reverse(bwd.begin(), bwd.end());
  const USol ul = integrate_liouville(sys, fwd, 1.0, 0.0);  // bounded at -S
  USol ur = integrate_liouville(sys, bwd, 1.0, 0.0);        // bounded at +S
  std::reverse(ur.u.begin(), ur.u.end());
  std::reverse(ur.du.begin(), ur.du.end());

  kp.h1.resize(n);
  kp.dh1.resize(n);
  kp.h2.resize(n);
  kp.dh2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = sys.a0_at(kp.sigma[i]);
    const double b = sys.b_at(kp.sigma[i]);
    const double am = 1.0 / std::sqrt(a0);
    // h = a0^{-1/2} u,  h' = a0^{-1/2} (u' - b u / 2)
    kp.h1[i] = am * ur.u[i];
    kp.dh1[i] = am * (ur.du[i] - 0.5 * b * ur.u[i]);
    kp.h2[i] = am * ul.u[i];
    kp.dh2[i] = am * (ul.du[i] - 0.5 * b * ul.u[i]);
  }

  const std::size_t mid = n / 2;
  const double a0m = sys.a0_at(kp.sigma[mid]);
  kp.alpha3 = a0m * (kp.h1[mid] * kp.dh2[mid] - kp.dh1[mid] * kp.h2[mid]);
  kp.degenerate = std::abs(kp.alpha3) < 1e-10;

  if (kp.degenerate) {
    // explicit pair: h1 = 1 and h2 = int ds'/a0, which keeps W = 1
    std::vector<double> inv(n);
    for (std::size_t i = 0; i < n; ++i) inv[i] = 1.0 / sys.a0_at(kp.sigma[i]);
    const auto I = cumulative_from_index(inv, sys.ds, mid);
    for (std::size_t i = 0; i < n; ++i) {
      kp.h1[i] = 1.0;
      kp.dh1[i] = 0.0;
      kp.h2[i] = I[i];
      kp.dh2[i] = inv[i];
    }
  } else {
    const double c = 1.0 / kp.alpha3;
    for (std::size_t i = 0; i < n; ++i) {
      kp.h1[i] *= c;
      kp.dh1[i] *= c;
    }
  }

  kp.W.resize(n);
  double drift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = sys.a0_at(kp.sigma[i]);
    kp.W[i] = a0 * (kp.h1[i] * kp.dh2[i] - kp.dh1[i] * kp.h2[i]);
    drift = std::max(drift, std::abs(kp.W[i] - 1.0));
  }
  kp.wronskian_drift = drift;
  return kp;
}

double KernelPair::h1_at(double s) const { return interp_cubic(h1, sigma.front(), ds, s); }
double KernelPair::h2_at(double s) const { return interp_cubic(h2, sigma.front(), ds, s); }
double KernelPair::dh1_at(double s) const { return interp_cubic(dh1, sigma.front(), ds, s); }
double KernelPair::dh2_at(double s) const { return interp_cubic(dh2, sigma.front(), ds, s); }

NondegeneracyCert nondegeneracy_check(const JacobiSystem& sys, const KernelPair& kp) {
  NondegeneracyCert c;
  c.q_min = 1e300;
  c.q_max = -1e300;
  for (double q : sys.Q) {
    c.q_min = std::min(c.q_min, q);
    c.q_max = std::max(c.q_max, q);
  }
  c.pass_by_corollary = (c.q_min >= -1e-12) && (c.q_max > 1e-10);
  c.alpha3 = kp.alpha3;
  c.pass_by_kernel = std::abs(kp.alpha3) > 1e-6;

  // diagnostic: how fast the right-bounded branch settles toward a constant
  if (!kp.degenerate) {
    std::vector<double> xs, ys;
    const double S = kp.sigma.back();
    const double limit = kp.h1.back() * std::sqrt(sys.a0_at(S));
    for (double s = 0.25 * S; s <= 0.85 * S; s += 0.05 * S) {
      const double u = kp.h1_at(s) * std::sqrt(sys.a0_at(s));
      const double d = std::abs(u - limit);
      if (d > 1e-14) {
        xs.push_back(1.0 + s);
        ys.push_back(d);
      }
    }
    if (xs.size() >= 3) c.tail_exponent = -fit_loglog(xs, ys).slope;
  }
  c.nondegenerate = c.pass_by_corollary || c.pass_by_kernel;
  return c;
}

JacobiSolution solve_linear(const JacobiSystem& sys, const KernelPair& kp,
                            const std::vector<double>& f) {
  const std::size_t n = kp.sigma.size();
  if (f.size() != n)
    throw std::invalid_argument("solve_linear: f must be sampled on the kernel grid");
  JacobiSolution sol;
  sol.sigma = kp.sigma;

  std::vector<double> g1(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = sys.a0_at(kp.sigma[i]);
    g1[i] = kp.h2[i] * a0 * f[i];
    g2[i] = kp.h1[i] * a0 * f[i];
  }
  const auto c1 = cell_integrals(g1, sys.ds);
  const auto c2 = cell_integrals(g2, sys.ds);
  // I1(s) = int_{-S}^{s} h2 a0 f,  I2(s) = int_{s}^{S} h1 a0 f, the second
  // accumulated from the right end so decaying tails stay accurate
  std::vector<double> I1(n, 0.0), I2(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) I1[i] = I1[i - 1] + c1[i - 1];
  for (std::size_t i = n - 1; i > 0; --i) I2[i - 1] = I2[i] + c2[i - 1];

  sol.h.resize(n);
  sol.dh.resize(n);
  sol.d2h.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sol.h[i] = -(kp.h1[i] * I1[i] + kp.h2[i] * I2[i]);
    sol.dh[i] = -(kp.dh1[i] * I1[i] + kp.dh2[i] * I2[i]);
    // from the equation itself
    const double s = kp.sigma[i];
    sol.d2h[i] = f[i] - sys.b_at(s) * sol.dh[i] + sys.Q_at(s) * sol.h[i];
  }

  // independent residual: numerical second derivative against the equation
  const auto d2 = fd_d2(sol.h, sys.ds);
  double rs = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double s = kp.sigma[i];
    rs = std::max(rs, std::abs(d2[i] + sys.b_at(s) * sol.dh[i] -
                               sys.Q_at(s) * sol.h[i] - f[i]));
  }
  sol.residual_sup = rs;
  return sol;
}

namespace {

// sup over s of (1+|s|)^expo (window sup of |g| + Hoelder quotient over
// pair separations up to the window scale): the C^{0,lambda} weighted
// surrogate. Quotients over all separations keep the value grid-stable;
// adjacent-point quotients alone would vanish like ds^{1-lambda}.
double window_holder_sup(const WeightedNorm1D& nrm, const std::vector<double>& sigma,
                         const std::vector<double>& g, double expo) {
  const std::size_t n = sigma.size();
  const double ds = sigma[1] - sigma[0];
  const auto hw = static_cast<std::size_t>(std::lround(nrm.window / ds));
  const std::size_t dmax = std::max<std::size_t>(1, 2 * hw);

  std::vector<double> invp(dmax + 1, 0.0);
  for (std::size_t d = 1; d <= dmax; ++d)
    invp[d] = 1.0 / std::pow(static_cast<double>(d) * ds, nrm.lambda);

  std::vector<double> absg(n), quot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) absg[i] = std::abs(g[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jmax = std::min(n - 1, i + dmax);
    double m = 0.0;
    for (std::size_t j = i + 1; j <= jmax; ++j)
      m = std::max(m, std::abs(g[j] - g[i]) * invp[j - i]);
    quot[i] = m;
  }
  const auto wsup = window_max(absg, hw);
  const auto wq = window_max(quot, hw);
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    p = std::max(p, std::pow(1.0 + std::abs(sigma[i]), expo) * (wsup[i] + wq[i]));
  return p;
}

}  // namespace

double weighted_norm_1d(const WeightedNorm1D& nrm, const std::vector<double>& sigma,
                        const std::vector<double>& h, const std::vector<double>& dh,
                        const std::vector<double>& d2h) {
  const std::size_t n = sigma.size();
  if (n < 3 || h.size() != n || dh.size() != n || d2h.size() != n)
    throw std::invalid_argument("weighted_norm_1d: inconsistent tables");

  double p0 = 0.0, p1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p0 = std::max(p0, std::abs(h[i]));
    p1 = std::max(p1, std::pow(1.0 + std::abs(sigma[i]), 1.0 + nrm.alpha) * std::abs(dh[i]));
  }
  return p0 + p1 + window_holder_sup(nrm, sigma, d2h, 2.0 + nrm.alpha);
}

double weighted_source_norm_1d(const WeightedNorm1D& nrm,
                               const std::vector<double>& sigma,
                               const std::vector<double>& f) {
  if (sigma.size() < 3 || f.size() != sigma.size())
    throw std::invalid_argument("weighted_source_norm_1d: inconsistent tables");
  return window_holder_sup(nrm, sigma, f, 2.0 + nrm.alpha);
}

}  // namespace aclab
