// SPDX-License-Identifier: MIT
#include "aclab/numerics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <deque>
#include <stdexcept>

namespace aclab {

std::vector<double> make_grid(double a, double b, double step) {
  const double span = (b - a) / step;
  const long n = std::lround(span) + 1;
  assert(n >= 2 && std::abs(span - std::round(span)) < 1e-9);
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = a + step * static_cast<double>(i);
  if (a == -b) {  // exact mirror symmetry for centered grids
    for (long i = 0; i < n / 2; ++i)
      g[static_cast<std::size_t>(i)] = -g[static_cast<std::size_t>(n - 1 - i)];
    if (n % 2 == 1) g[static_cast<std::size_t>(n / 2)] = 0.0;
  }
  return g;
}

std::vector<double> simpson_weights(std::size_t n, double dx) {
  if (n < 2) throw std::invalid_argument("simpson_weights: need n >= 2");
  std::vector<double> w(n, 0.0);
  if (n == 2) {  // trapezoid, nothing better available
    w[0] = w[1] = 0.5 * dx;
    return w;
  }
  std::size_t m = n;
  // Even point count means an odd panel count: peel off a 3/8 tail.
  bool tail38 = (n % 2 == 0);
  if (tail38) m = n - 3;
  // Simpson over points [0, m-1] (m odd).
  w[0] += dx / 3.0;
  w[m - 1] += dx / 3.0;
  for (std::size_t i = 1; i + 1 < m; ++i) w[i] += dx * ((i % 2 == 1) ? 4.0 : 2.0) / 3.0;
  if (tail38) {
    const double c = 3.0 * dx / 8.0;
    w[n - 4] += c;
    w[n - 3] += 3.0 * c;
    w[n - 2] += 3.0 * c;
    w[n - 1] += c;
  }
  return w;
}

double simpson(const std::vector<double>& f, double dx) {
  const auto w = simpson_weights(f.size(), dx);
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
  return s;
}

std::vector<double> cell_integrals(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> c(n > 0 ? n - 1 : 0, 0.0);
  if (n < 2) return c;
  if (n < 4) {  // trapezoid fallback for tiny inputs
    for (std::size_t i = 0; i + 1 < n; ++i) c[i] = 0.5 * dx * (f[i] + f[i + 1]);
    return c;
  }
  // 4-point rule: int_{x_i}^{x_{i+1}} f = dx*(-f[i-1]+13f[i]+13f[i+1]-f[i+2])/24,
  // shifted stencils at the two boundary cells keep 4th order.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (i == 0) {
      c[i] = dx * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
    } else if (i + 2 == n) {
      c[i] = dx * (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]) / 24.0;
    } else {
      c[i] = dx * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]) / 24.0;
    }
  }
  return c;
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2) return F;
  const auto c = cell_integrals(f, dx);
  for (std::size_t i = 0; i + 1 < n; ++i) F[i + 1] = F[i] + c[i];
  return F;
}

std::vector<double> cumulative_from_index(const std::vector<double>& f, double dx,
                                          std::size_t mid) {
  const std::size_t n = f.size();
  std::vector<double> F(n, 0.0);
  if (n < 2 || mid >= n) return F;
  const auto c = cell_integrals(f, dx);
  for (std::size_t i = mid; i + 1 < n; ++i) F[i + 1] = F[i] + c[i];
  for (std::size_t i = mid; i > 0; --i) F[i - 1] = F[i] - c[i - 1];
  return F;
}

const std::array<double, 5> kGL5Nodes = {
    -0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
    0.538469310105683091036314420700, 0.906179845938663992797626878299};
const std::array<double, 5> kGL5Weights = {
    0.236926885056189087514264040720, 0.478628670499366468041291514836,
    0.568888888888888888888888888889, 0.478628670499366468041291514836,
    0.236926885056189087514264040720};

double gauss5(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 5; ++i) s += kGL5Weights[i] * f(c + h * kGL5Nodes[i]);
  return s * h;
}

std::vector<double> fd_d1(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) return fd_d1_o2(f, dx);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dx);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  d[1] = (f[2] - f[0]) / (2.0 * dx);
  d[n - 2] = (f[n - 1] - f[n - 3]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return d;
}

std::vector<double> fd_d2(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) return fd_d2_o2(f, dx);
  const double h2 = dx * dx;
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  d[1] = (f[0] - 2.0 * f[1] + f[2]) / h2;
  d[n - 2] = (f[n - 3] - 2.0 * f[n - 2] + f[n - 1]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

std::vector<double> fd_d1_o2(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (f[1] - f[0]) / dx;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return d;
}

std::vector<double> fd_d2_o2(const std::vector<double>& f, double dx) {
  const std::size_t n = f.size();
  std::vector<double> d(n, 0.0);
  const double h2 = dx * dx;
  if (n < 4) {
    if (n == 3) d[0] = d[1] = d[2] = (f[0] - 2.0 * f[1] + f[2]) / h2;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) / h2;
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

namespace {

// Cash-Karp tableau.
constexpr double kA[6] = {0.0, 1.0 / 5, 3.0 / 10, 3.0 / 5, 1.0, 7.0 / 8};
constexpr double kB[6][5] = {
    {0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0},
    {3.0 / 10, -9.0 / 10, 6.0 / 5, 0, 0},
    {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27, 0},
    {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096}};
constexpr double kC5[6] = {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771};
constexpr double kC4[6] = {2825.0 / 27648, 0,           18575.0 / 48384,
                           13525.0 / 55296, 277.0 / 14336, 1.0 / 4};

struct Stepper {
  const OdeRhs& rhs;
  std::size_t dim;
  std::vector<std::vector<double>> k;
  std::vector<double> ytmp, y5, y4;

  explicit Stepper(const OdeRhs& r, std::size_t d)
      : rhs(r), dim(d), k(6, std::vector<double>(d)), ytmp(d), y5(d), y4(d) {}

  // One attempted step from (t, y) of size h (signed). Fills y5 and returns
  // the scaled error estimate.
  double attempt(double t, const std::vector<double>& y, double h, const OdeOptions& opt) {
    rhs(t, y, k[0]);
    for (int s = 1; s < 6; ++s) {
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += kB[s][j] * k[j][i];
        ytmp[i] = y[i] + h * acc;
      }
      rhs(t + kA[s] * h, ytmp, k[s]);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      double s5 = 0.0, s4 = 0.0;
      for (int s = 0; s < 6; ++s) {
        s5 += kC5[s] * k[s][i];
        s4 += kC4[s] * k[s][i];
      }
      y5[i] = y[i] + h * s5;
      y4[i] = y[i] + h * s4;
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(y5[i] - y4[i]) / sc);
    }
    return err;
  }
};

}  // namespace

std::vector<double> ode45(const OdeRhs& rhs, std::vector<double> y, double t0,
                          double t1, const OdeOptions& opt) {
  if (t0 == t1) return y;
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  Stepper st(rhs, y.size());
  double t = t0;
  double h = dir * std::min(opt.max_step, std::abs(t1 - t0));
  int stall = 0;
  while (dir * (t1 - t) > 0.0) {
    if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
    const double err = st.attempt(t, y, h, opt);
    if (err <= 1.0) {
      t += h;
      y = st.y5;
      const double grow = (err > 1e-30) ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
      if (std::abs(h) > opt.max_step) h = dir * opt.max_step;
      stall = 0;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
      if (std::abs(h) < opt.min_step) throw std::runtime_error("ode45: step size underflow");
      if (++stall > 200) throw std::runtime_error("ode45: controller stalled");
    }
  }
  return y;
}

std::vector<std::vector<double>> ode45_path(const OdeRhs& rhs,
                                            const std::vector<double>& y0,
                                            const std::vector<double>& ts,
                                            const OdeOptions& opt) {
  std::vector<std::vector<double>> out;
  out.reserve(ts.size());
  if (ts.empty()) return out;
  std::vector<double> y = y0;
  out.push_back(y);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    y = ode45(rhs, std::move(y), ts[i - 1], ts[i], opt);
    out.push_back(y);
  }
  return out;
}

double catmull_rom(double fm1, double f0, double f1, double f2, double u) {
  const double m0 = 0.5 * (f1 - fm1);
  const double m1 = 0.5 * (f2 - f0);
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * m0 +
         (-2 * u3 + 3 * u2) * f1 + (u3 - u2) * m1;
}

double interp_cubic(const std::vector<double>& f, double x0, double dx, double x) {
  const std::size_t n = f.size();
  if (n < 4) throw std::invalid_argument("interp_cubic: need >= 4 samples");
  double pos = (x - x0) / dx;
  // snap to the lattice: grids built elsewhere should read back table
  // values bit for bit, not through the C^1 interpolant
  const double r = std::round(pos);
  if (std::abs(pos - r) < 1e-9 && r >= 0.0 && r < static_cast<double>(n))
    return f[static_cast<std::size_t>(r)];
  // clamp so the 4-point stencil stays inside
  pos = std::clamp(pos, 1.0, static_cast<double>(n - 2) - 1e-12);
  auto i = static_cast<std::size_t>(std::floor(pos));
  i = std::min(i, n - 3);
  i = std::max<std::size_t>(i, 1);
  const double u = pos - static_cast<double>(i);
  return catmull_rom(f[i - 1], f[i], f[i + 1], f[i + 2], u);
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  SlopeFit out;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return out;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::max(y[i], 1e-300));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  out.slope = (dn * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / dn;
  out.pair_slopes.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.pair_slopes[i] = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]);
    // monotone means: smaller x gives smaller y
    if ((x[i + 1] < x[i] && y[i + 1] > y[i]) || (x[i + 1] > x[i] && y[i + 1] < y[i]))
      out.monotone = false;
  }
  return out;
}

double smoothstep5(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double eta_step(double u) { return 1.0 - smoothstep5(u - 1.0); }

double odd_step(double t) { return 2.0 * smoothstep5(0.5 * (t + 1.0)) - 1.0; }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> window_max(const std::vector<double>& v, std::size_t hw) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  // monotone deque sliding maximum, two passes not needed: single pass with
  // window [i-hw, i+hw]
  std::deque<std::size_t> dq;
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t hi = std::min(n - 1, i + hw);
    while (r <= hi) {
      while (!dq.empty() && v[dq.back()] <= v[r]) dq.pop_back();
      dq.push_back(r);
      ++r;
    }
    const std::size_t lo = (i >= hw) ? i - hw : 0;
    while (!dq.empty() && dq.front() < lo) dq.pop_front();
    out[i] = v[dq.front()];
  }
  return out;
}

}  // namespace aclab
