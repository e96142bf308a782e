#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hforge/expr.hpp"
#include "hforge/twistor.hpp"

namespace hforge {

enum class ALEKind { A, D, E6, E7, E8 };

ALEKind parse_ale_kind(const std::string& name);  // "A", "D", "E6", "E7", "E8"
std::string ale_kind_name(ALEKind kind);

// Bundle degrees of (x, y, z) and the degree s of the relation.
struct ALEDegrees {
  int p = 0, q = 0, r = 0, s = 0;
  int chern() const { return p + q + r - s; }
};

// k is the exponent of z in the relation: xy = z^k for A, x^2 + y^2 z + z^k
// for D. It is ignored for the E series. Valid ranges: A k >= 1, D k >= 3.
ALEDegrees ale_degrees(ALEKind kind, int k);
int parameter_count(ALEKind kind, int k);
// Degree in lambda of each a_i, i = 1 .. parameter_count.
std::vector<int> parameter_degrees(ALEKind kind, int k);

struct ALEFamily {
  ALEKind kind = ALEKind::A;
  int k = 2;
  ALEDegrees degrees;
  std::vector<int> a_degrees;
  std::vector<Expr> a;  // polynomials in lambda
};

// Checks every a_i against its degree; an empty list means all a_i = 0.
ALEFamily make_ale_family(ALEKind kind, int k, std::vector<Expr> a = {});

// Largest power of `var` in e, read off its Laurent coefficients on the unit
// circle. nullopt when e has negative powers. e may depend on var only.
std::optional<int> lambda_degree(const Expr& e, const std::string& var = "lambda", double tol = 1e-10);

// The deformed relation in x, y, z, lambda.
Expr relation_polynomial(const ALEFamily& fam);
cplx relation_eval(const ALEFamily& fam, cplx x, cplx y, cplx z, cplx lambda);

// ---------------------------------------------------------------- A series

// Roots p_j(lambda) are sections of O(2), given as expressions in lambda.
struct PatchValue {
  cplx f, G;
};
// f = sum_j ln(z - p_j), G = sum_j (z - p_j)(ln(z - p_j) - 1), each log on
// its principal branch. Raises BranchPoint when z hits a root.
PatchValue ak_patching(const std::vector<Expr>& roots, cplx z, cplx lambda);
// The same functions as expressions in z and lambda.
Expr ak_f_expr(const std::vector<Expr>& roots);
Expr ak_g_expr(const std::vector<Expr>& roots);

// Largest mismatch between prod (z - p_j) and z^k + a_1 z^{k-2} + ... at lambda.
double ak_roots_mismatch(const ALEFamily& fam, const std::vector<Expr>& roots, cplx lambda);

// Patching integral of dy / F_x from F_y = 1 to F_x = 1 on xy = prod(z - p_j),
// along the straight segment, multiplied by `orientation`. With orientation
// -1 this is the principal ln prod(z - p_j).
cplx ak_patch_integral(const std::vector<Expr>& roots, cplx z, cplx lambda, int nodes = 128,
                       double orientation = -1.0);

// The k = 2 class f = sum_j ln(Q - p_j) on the GH section.
TwistorClass ak_f_class(const std::vector<Expr>& roots);
// psi = sum_j psi_field(ln(Q - p_j)) at (p, y, w); one term per centre.
cplx ak_gh_potential(const std::vector<Expr>& roots, cplx p, cplx y, cplx w);

// ---------------------------------------------------------------- D series

// Evaluates (1/sqrt z) ln[((z - 4zP)^{1/2} + sqrt z) / ((1 + 4zP)^{1/2} - 1)]
// with P = prod (z - q_j(lambda)), principal branches throughout.
// BranchPoint at z = 0, P = 0, or an argument on a cut.
cplx dk_patching(const std::vector<Expr>& roots, cplx z, cplx lambda);
// Patching integral of dy / F_x from F_y = 1 to F_x = 1 on x^2 = y^2 z + P,
// with x = 1/2 at the upper limit and continued along the segment.
cplx dk_patch_integral(const std::vector<Expr>& roots, cplx z, cplx lambda, int nodes = 128);

// ---------------------------------------------------------------- E series

// n-point Gauss-Legendre nodes and weights on [-1, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

// Integral of dy / sqrt(R(y)) along the segment [a, b] for a polynomial R
// (coefficients highest first). An endpoint where R vanishes is absorbed by
// u^2 = y - endpoint. The root is continued from the principal value at a.
cplx sqrt_poly_integral(const std::vector<cplx>& coeffs, cplx a, cplx b, int nodes = 64);

// Weierstrass data: the fibre x^2 = 4Y^3 + g1 Y + g2 after y -> -4^{1/3} Y
// (and a shift removing y^2 for E7). g1, g2 are expressions in z, lambda.
std::pair<Expr, Expr> weierstrass_form(const ALEFamily& fam);

struct EllipticOptions {
  std::optional<cplx> y0_hint;  // picks a root of 12y^2 + g1 - 1
  std::optional<cplx> y1_hint;  // picks a root of 4y^3 + g1 y + g2 - 1/4
  int nodes = 64;
};
struct EllipticPatch {
  cplx f;
  cplx y0, y1;
};
// f = (1/2) int_{y0}^{y1} dy / sqrt(4y^3 + g1 y + g2).
EllipticPatch ek_patching(cplx g1, cplx g2, const EllipticOptions& opts);
EllipticPatch ek_patching(const ALEFamily& fam, cplx z, cplx lambda, const EllipticOptions& opts);

}  // namespace hforge
