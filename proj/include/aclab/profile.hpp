// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "aclab/numerics.hpp"

namespace aclab {

// Balanced double-well nonlinearity. The equation for the transition
// profile is w'' = dF(w), its linearization L0[psi] = psi'' - d2F(w) psi.
struct DoubleWell {
  std::function<double(double)> F, dF, d2F, d3F;
  double u_minus = -1.0;
  double u_plus = 1.0;
  bool quartic_twin_pit = false;  // enables the closed-form tanh profile
};

// F(u) = (1-u^2)^2/4 with wells at u = -1, +1.
DoubleWell make_twin_pit();

struct HeteroclinicProfile {
  // exposed grid
  std::vector<double> t;            // [-12,12], step 0.01
  std::vector<double> w, dw, d2w;
  // internal padded grid used by corrector construction and projections;
  // the pad keeps variation-of-parameters tails well inside the window
  std::vector<double> tp;           // [-22,22], step 0.01
  std::vector<double> wp, dwp, d2wp;
  double dt = 0.01;
  bool closed_form = false;
  double sigma_minus = 0.0, sigma_plus = 0.0;  // sqrt(d2F(u_-)), sqrt(d2F(u_+))
  double u_minus = -1.0, u_plus = 1.0;

  // pointwise evaluators; closed form when available, otherwise cubic
  // interpolation of the padded table with saturated tails
  double w_at(double t) const;
  double dw_at(double t) const;
  double d2w_at(double t) const;
};

struct ProfileOptions {
  double t_max = 12.0;
  double t_pad = 22.0;
  double dt = 0.01;
  bool force_ode = false;  // integrate even when the closed form exists
};

// Solves w'' = dF(w) with w(+-inf) = u_+- through the first integral
// w' = sqrt(2 F(w)). Throws std::invalid_argument when the well values at
// the two minima differ (no first-integral heteroclinic exists).
HeteroclinicProfile solve_heteroclinic(const DoubleWell& well,
                                       const ProfileOptions& opt = {});

// Solution of L0[psi] = source on the padded grid, built by variation of
// parameters around the kernel element w'.
struct Corrector {
  std::vector<double> t;       // padded grid
  std::vector<double> psi, dpsi, source;
  double residual_sup = 0.0;   // sup |D2 psi - d2F(w) psi - source|, 4th-order D2
  double orth_wprime = 0.0;    // Simpson pairing <psi, w'>
  double at(double t) const;   // cubic lookup, zero outside the pad
  double d1_at(double t) const;
};

// L0[psi0] = t w'(t); odd, psi0(0) = 0.
Corrector corrector_psi0(const HeteroclinicProfile& p, const DoubleWell& well);
// L0[psi1] = (t^2 - chat) w'(t) with chat = <t^2 w', w'>/<w', w'>; even,
// returned orthogonal to w'.
Corrector corrector_psi1(const HeteroclinicProfile& p, const DoubleWell& well);

struct ProjectionResult {
  double coeff = 0.0;               // <f, w'> / <w', w'>
  std::vector<double> remainder;    // f - coeff w'
  double orth_check = 0.0;          // <remainder, w'> with the same weights
};
// f sampled on the padded grid p.tp.
ProjectionResult project_onto_wprime(const std::vector<double>& f,
                                     const HeteroclinicProfile& p);

// Columnar text dump of the exposed grid (t, w, w', w'').
void write_profile_csv(const HeteroclinicProfile& p, const std::string& path);

}  // namespace aclab
