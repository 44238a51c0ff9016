// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "aclab/numerics.hpp"

namespace aclab {

struct Vec2 {
  double x = 0.0, y = 0.0;
};
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double c, Vec2 a) { return {c * a.x, c * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

enum class CurveKind { Line, Hyperbola, TanhGraph, Catenary, Custom };

// Graph data: y = f(x) with four closed-form derivatives.
struct GraphData {
  std::function<double(double)> f, f1, f2, f3, f4;
};

// Embedded planar curve gamma(s) = (x(s), f(x(s))) in arclength
// parametrization, s = 0 above x = 0. Frenet frame convention:
//   gamma_dot = (1, f')/q,  nu = (f', -1)/q,  q = sqrt(1 + f'^2),
//   k = f''/q^3,  so that  d(nu)/ds = +k gamma_dot,  d2(gamma)/ds2 = -k nu.
class PlanarCurve {
 public:
  // param: Hyperbola aperture omega (f = sqrt(1 + omega^2 x^2)); ignored by
  // the other kinds.
  static PlanarCurve from_graph(CurveKind kind, double param = 0.0,
                                double x_max = 220.0);
  static PlanarCurve from_graph(GraphData data, double x_max = 220.0);

  double f(double x) const { return d_.f(x); }
  double f1(double x) const { return d_.f1(x); }
  double f2(double x) const { return d_.f2(x); }

  double arclength_of_x(double x) const;
  double x_of_arclength(double s) const;
  double s_max() const;  // arclength of x_max

  Vec2 gamma(double s) const;
  Vec2 gamma_dot(double s) const;
  Vec2 normal(double s) const;
  double curvature(double s) const;
  double curvature_ds(double s) const;
  double curvature_ds2(double s) const;

  bool is_straight() const;
  // gamma_dot at +s_max dotted with gamma_dot at -s_max
  double tangent_dot_asymptotic() const;
  // same curve with nu and k negated (graph reflected through y -> -y,
  // traversed so the frame identities still hold)
  bool flip_frame() const { return flip_; }
  PlanarCurve flipped() const;

  CurveKind kind() const { return kind_; }
  double param() const { return param_; }
  double x_max() const { return xmax_; }

 private:
  PlanarCurve() = default;
  void build_arclength_table();
  double kx_at(double x) const;   // dk/dx
  double kxx_at(double x) const;  // d2k/dx2

  CurveKind kind_ = CurveKind::Custom;
  double param_ = 0.0;
  double xmax_ = 220.0;
  bool flip_ = false;  // negate nu and k
  GraphData d_;
  // arclength at cell boundaries x = -xmax + i dx
  std::vector<double> sacc_;
  double dx_ = 0.01;
};

// Tubular neighborhood |z| < delta + c0 |s| around the curve with the
// chart map X(s,z) = gamma(s) + z nu(s).
struct FermiChart {
  PlanarCurve curve;
  double delta = 0.25;
  double c0 = 0.1;  // 0.1 sin(theta_sep/2) from the asymptote separation

  Vec2 forward(double s, double z) const;
  struct InverseResult {
    bool converged = false;
    bool inside = false;  // within the widening tube
    double s = 0.0, z = 0.0;
  };
  InverseResult inverse(Vec2 p) const;
  bool in_neighborhood(double s, double z) const;
  // metric coefficient g_ss = (1 + z k)^2
  double metric_ss(double s, double z) const;
};

FermiChart make_chart(const PlanarCurve& c, double delta = 0.25);

// Normal displacement of the interface, h : sigma -> R with two
// derivatives. sigma is the undilated arclength variable.
class Displacement {
 public:
  virtual ~Displacement() = default;
  virtual double h(double sigma) const = 0;
  virtual double dh(double sigma) const = 0;
  virtual double d2h(double sigma) const = 0;
};

class ZeroDisplacement final : public Displacement {
 public:
  double h(double) const override { return 0.0; }
  double dh(double) const override { return 0.0; }
  double d2h(double) const override { return 0.0; }
};

class AnalyticDisplacement final : public Displacement {
 public:
  AnalyticDisplacement(std::function<double(double)> h, std::function<double(double)> dh,
                       std::function<double(double)> d2h)
      : h_(std::move(h)), dh_(std::move(dh)), d2h_(std::move(d2h)) {}
  double h(double s) const override { return h_(s); }
  double dh(double s) const override { return dh_(s); }
  double d2h(double s) const override { return d2h_(s); }

 private:
  std::function<double(double)> h_, dh_, d2h_;
};

// Uniform-grid samples; derivatives by 4th-order differences, lookup by
// cubic interpolation, zero extension outside the table.
class GridDisplacement final : public Displacement {
 public:
  GridDisplacement(std::vector<double> sigma, std::vector<double> values);
  double h(double s) const override;
  double dh(double s) const override;
  double d2h(double s) const override;
  const std::vector<double>& grid() const { return sigma_; }
  const std::vector<double>& values() const { return h_; }

 private:
  std::vector<double> sigma_, h_, dh_, d2h_;
  double ds_ = 0.0;
};

// Displacement with all three tables supplied (no differencing).
class TableDisplacement final : public Displacement {
 public:
  TableDisplacement(std::vector<double> sigma, std::vector<double> h,
                    std::vector<double> dh, std::vector<double> d2h);
  double h(double s) const override;
  double dh(double s) const override;
  double d2h(double s) const override;

 private:
  std::vector<double> sigma_, h_, dh_, d2h_;
  double ds_ = 0.0;
};

// Dilated chart at scale eps with displacement h:
//   X(s,t) = gamma(eps s) + eps (t + h(eps s)) nu(eps s).
struct DilatedChart {
  const FermiChart* chart = nullptr;
  const Displacement* disp = nullptr;
  double eps = 0.1;

  Vec2 forward(double s, double t) const;
  struct InverseResult {
    bool converged = false;
    bool inside = false;
    double s = 0.0, t = 0.0;
  };
  InverseResult inverse(Vec2 p) const;
};

DilatedChart dilated_chart(const FermiChart& chart, const Displacement& disp, double eps);

}  // namespace aclab
