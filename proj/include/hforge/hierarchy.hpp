#pragma once

#include <string>
#include <vector>

#include "hforge/expr.hpp"
#include "hforge/plebanski.hpp"

namespace hforge {

// Level-n potential in the variables x{A}{i}, A in {0,1}, i in 0..n.
struct HierarchyPotential {
  int n = 1;
  Expr theta;
};

std::string hierarchy_var(int A, int i);
// x00..x0n followed by x10..x1n.
std::vector<std::string> hierarchy_vars(int n);
// Bracket in the level-n variables: y = x00, x = -x10.
BracketPair hierarchy_bracket();
// n = 1 relabelling y -> x00, x -> -x10, w -> x01, z -> x11.
HierarchyPotential hierarchy_from_plebanski(const Expr& theta);
Expr plebanski_from_hierarchy(const HierarchyPotential& h);

// phi_xw + phi_yz + Th_yy phi_xx + Th_xx phi_yy - 2 Th_xy phi_xy
cplx wave_operator(const Expr& theta, const Expr& phi, const Vec4& point);

struct RecursionOptions {
  int sample_points = 0;  // 0: ansatz size + 12
  double tolerance = 1e-10;
  unsigned seed = 20240611;
};

// Solves d_y R = e_{01'}(dTh) and -d_x R = e_{11'}(dTh) for R in the span of
// the ansatz; monomials free of x and y are dropped (gauge).
Expr recursion_step(const Expr& theta, const Expr& delta, const std::vector<Expr>& ansatz,
                    const RecursionOptions& opts = {});
std::vector<Expr> recursion_chain(const Expr& theta, const Expr& start, const std::vector<Expr>& ansatz,
                                  int steps, const RecursionOptions& opts = {});

// All monomials in vars with total degree <= max_degree.
std::vector<Expr> monomials(const std::vector<std::string>& vars, int max_degree);

cplx hierarchy_residual(const HierarchyPotential& h, int A, int i, int B, int j,
                        const std::map<std::string, cplx>& point);

// d_{A,i-1} Phi - lambda (d_{A,i} Phi + {d_{A,i-1} Th, Phi}); Phi may
// depend on the variable "lambda".
cplx lax_apply(const HierarchyPotential& h, const Expr& phi, int A, int i, cplx lambda,
               const std::map<std::string, cplx>& point);
// Same operator on a polynomial in lambda given by coefficients; returns the
// coefficients of the image (one longer than the input).
std::vector<cplx> lax_series(const HierarchyPotential& h, const std::vector<Expr>& phi, int A, int i,
                             const std::map<std::string, cplx>& point);

struct OmegaExpansion {
  int n = 1;
  int order = 0;
  std::vector<Expr> omega0;  // coefficient of lambda^k at index k
  std::vector<Expr> omega1;
  double background_residual = 0.0;  // max hierarchy residual at probe points
  std::string warning;
};

OmegaExpansion omega_expansion(const HierarchyPotential& h, int order);

// Coefficient of lambda^k in d(omega^0) ^ d(omega^1) as an antisymmetric
// matrix over hierarchy_vars(n); k <= 2n+1.
std::vector<std::vector<cplx>> omega_sigma_coefficient(const HierarchyPotential& h, int k,
                                                       const std::map<std::string, cplx>& point);

}  // namespace hforge
