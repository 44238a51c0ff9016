// SPDX-License-Identifier: MIT
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace aclab {

inline constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

// Frozen reference values for the tanh(t/sqrt(2)) transition profile.
// c* = integral of w'(t)^2  =  2*sqrt(2)/3
inline constexpr double kCStar = 0.942809041582063365867792482806465386;
// chat = (integral of t^2 w'(t)^2) / c*  =  (pi^2 - 6)/6
inline constexpr double kChat = 0.644934066848226436472415166646025189;
// integral of t^2 w'(t)^2
inline constexpr double kT2WPrime2 = 0.608049669448798752833887725231;
// w(1) = tanh(1/sqrt(2))
inline constexpr double kWAtOne = 0.608859365013913810385945214001;

// Uniform grid a + i*step, i = 0..n-1 with n = round((b-a)/step)+1.
// b must sit on the lattice; asserts in debug builds.
std::vector<double> make_grid(double a, double b, double step);

// Composite Simpson on a uniform grid. Even panel counts use a 3/8 tail.
double simpson(const std::vector<double>& f, double dx);
// Simpson with per-sample weights returned explicitly, so different
// integrands can share the exact same discrete pairing.
std::vector<double> simpson_weights(std::size_t n, double dx);

// Per-cell integrals c_i = int_{x_i}^{x_{i+1}} f (size n-1), 4th order.
std::vector<double> cell_integrals(const std::vector<double>& f, double dx);
// Cumulative integral F(x_i) = int_{x_0}^{x_i} f, 4th-order accurate
// (three-point backward/forward corrections at the ends of each step).
std::vector<double> cumulative_integral(const std::vector<double>& f, double dx);
// Cumulative integral anchored at index mid: F(x_i) = int_{x_mid}^{x_i} f.
std::vector<double> cumulative_from_index(const std::vector<double>& f, double dx,
                                          std::size_t mid);

// Five-point Gauss-Legendre on [a,b]; exact through degree 9.
double gauss5(const std::function<double(double)>& f, double a, double b);
extern const std::array<double, 5> kGL5Nodes;   // on [-1,1]
extern const std::array<double, 5> kGL5Weights;

// First/second derivative of uniform-grid samples. Interior stencils are
// 4th order; the two cells at each edge fall back to one-sided 2nd order.
std::vector<double> fd_d1(const std::vector<double>& f, double dx);
std::vector<double> fd_d2(const std::vector<double>& f, double dx);
// Plain 2nd-order versions (central interior, one-sided edges). Used by
// discretization-order studies where the measured slope should be 2.
std::vector<double> fd_d1_o2(const std::vector<double>& f, double dx);
std::vector<double> fd_d2_o2(const std::vector<double>& f, double dx);

using OdeRhs =
    std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double max_step = 1.0;
  double min_step = 1e-14;
};

// Adaptive Cash-Karp RK45. Returns the state at t1 (t1 < t0 integrates
// backwards). Throws std::runtime_error if the controller stalls.
std::vector<double> ode45(const OdeRhs& rhs, std::vector<double> y0, double t0,
                          double t1, const OdeOptions& opt = {});

// Integrates once through the monotone sequence ts, clamping steps so each
// requested point is hit exactly. Row i is the state at ts[i].
std::vector<std::vector<double>> ode45_path(const OdeRhs& rhs,
                                            const std::vector<double>& y0,
                                            const std::vector<double>& ts,
                                            const OdeOptions& opt = {});

// Catmull-Rom cubic through (f[-1],f[0],f[1],f[2]) evaluated at u in [0,1]
// measured from f[0]. Exact for quadratic data, O(h^3) on smooth data.
double catmull_rom(double fm1, double f0, double f1, double f2, double u);
// Catmull-Rom lookup into uniform samples f(x0 + i dx); clamps to the
// valid interior range.
double interp_cubic(const std::vector<double>& f, double x0, double dx,
                    double x);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;             // log(C)
  std::vector<double> pair_slopes;    // consecutive two-point slopes
  bool monotone = true;               // values shrink as x shrinks
};
// Least-squares fit of log(y) vs log(x). Entries with y <= 0 are clamped
// to 1e-300 so exact zeros register as "far below any tolerance".
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

// Quintic step: 0 for u<=0, 1 for u>=1, C^2 across both ends.
double smoothstep5(double u);
// Cutoff template: 1 for u<=1, 0 for u>=2, C^2 monotone in between.
double eta_step(double u);
// Odd sigmoid used far from the interface: -1 for t<=-1, +1 for t>=+1.
double odd_step(double t);

std::uint64_t fnv1a(std::string_view s);

double sup_abs(const std::vector<double>& v);
// max over a centered window of half-width hw (index units)
std::vector<double> window_max(const std::vector<double>& v, std::size_t hw);

}  // namespace aclab
