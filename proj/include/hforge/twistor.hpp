#pragma once

#include <map>
#include <string>
#include <vector>

#include "hforge/contour.hpp"
#include "hforge/expr.hpp"
#include "hforge/jet.hpp"
#include "hforge/linalg.hpp"
#include "hforge/plebanski.hpp"

namespace hforge {

// A class on the total space of O(k), represented in the affine gauge
// pi = (lambda, 1) by an expression in Q and lambda. Other free variables
// are looked up in `constants`.
struct TwistorClass {
  int k = 2;
  Expr representative;
  int weight = 0;  // 0 for a G class, 2 - k for an f class
  ContourSpec contour{};
  std::map<std::string, cplx> constants;
};

// Raises WeightMismatch unless weight is 0 or 2 - k.
void validate(const TwistorClass& c);

// Names t0 .. tk, in the order used for jets over a section.
std::vector<std::string> section_vars(int k);
JetSpacePtr section_space(int k, int degree);

// Q(lambda) = sum_i lambda^i t^{k-i}.
cplx section_value(const std::vector<cplx>& t, cplx lambda);

// (1/2 pi i) oint G(Q(z), z) dz / (z - lambda) over G.contour; lambda must
// lie strictly inside.
cplx split_g(const TwistorClass& G, const std::vector<cplx>& t, cplx lambda);
// Same Cauchy integral over an arbitrary circle not passing through lambda.
cplx split_g(const TwistorClass& G, const std::vector<cplx>& t, cplx lambda, const ContourSpec& contour);

// F(t) = (1/2 pi i) oint G(Q, lambda) lambda^{-2} dlambda.
cplx f_from_g_class(const TwistorClass& G, const std::vector<cplx>& t);
// Jet of F over `space` (variables t0 .. tk by position), differentiated
// under the integral.
Jet f_from_g_jet(const TwistorClass& G, const JetSpacePtr& space, const std::vector<cplx>& t);

// Spinor indices are 0 (0') or 1 (1'); rho_0' = lambda, rho_1' = 1.
// psi = (1/2 pi i) oint rho...rho df/dQ dlambda, 2k - 4 indices.
cplx psi_field(const TwistorClass& f, const std::vector<cplx>& t, const std::vector<int>& indices);
Jet psi_field_jet(const TwistorClass& f, const JetSpacePtr& space, const std::vector<cplx>& t,
                  const std::vector<int>& indices);

// (1/2 pi i) oint rho...rho f dlambda with k - 4 indices (k >= 4).
cplx constraint_field(const TwistorClass& f, const std::vector<cplx>& t, const std::vector<int>& indices);
// The k - 3 independent components (m indices equal to 0', m = 0..k-4);
// empty for k < 4.
std::vector<cplx> constraint_fields(const TwistorClass& f, const std::vector<cplx>& t);

// Sigma(lambda) = -dQ ^ d zeta, where zeta solves the splitting of f on the
// section. Coordinates t0 .. tk, plus the fibre coordinate z (last) when
// k = 2. Requires |lambda| < contour radius and lambda != 0 for k > 3.
Matrix<cplx> sigma_from_psi(const TwistorClass& f, const std::vector<cplx>& t, cplx lambda,
                            double constraint_tolerance = 1e-9);

struct SigmaComponents {
  // Sigma(lambda) = lambda^2 s00 + 2 lambda s01 + s11
  Matrix<cplx> s00, s01, s11;
  double quadratic_residual = 0.0;  // misfit at a fourth lambda
};
SigmaComponents sigma_components(const TwistorClass& f, const std::vector<cplx>& t,
                                 double constraint_tolerance = 1e-9);

// GH dictionary for k = 2: (t0, t1, t2) = (-p, y, w).
std::vector<cplx> gh_section(cplx w, cplx y, cplx p);

struct BridgeReport {
  TwistorClass f;          // f = lambda^2 dG/dQ
  std::string gauge_note;
  std::vector<cplx> psi;   // psi with m indices 0', m = 0 .. 2k-4
  std::vector<cplx> f_second;  // matching second derivatives of F
  double max_mismatch = 0.0;
};
BridgeReport bridge_two_methods(const TwistorClass& G, const std::vector<cplx>& t);

}  // namespace hforge
