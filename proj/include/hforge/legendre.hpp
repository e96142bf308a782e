#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hforge/expr.hpp"
#include "hforge/hierarchy.hpp"
#include "hforge/newton.hpp"
#include "hforge/plebanski.hpp"

namespace hforge {

// ------------------------------------------------------------ Gibbons-Hawking

// GH coordinates by position: (w, y, p, z).
enum GHCoord : size_t { gW = 0, gY = 1, gP = 2, gZ = 3 };
inline const std::vector<std::string>& gh_vars() {
  static const std::vector<std::string> v{"w", "y", "p", "z"};
  return v;
}

struct LegendreGH {
  cplx F{};
  cplx x{};        // root of Th_x = p
  cplx F_p{};      // equals x
  cplx F_y{};      // equals -Th_y
  cplx theta_y{};
  double identity_residual = 0.0;  // max of |x - F_p|, |Th_y + F_y|
};

// F(p, y, w) = p x - Th with x solving Th_x(w, 0, x, y) = p; Th must not
// depend on z.
LegendreGH legendre_gh(const Expr& theta, cplx w, cplx y, cplx p, cplx seed_x, const NewtonOptions& opts = {});

// Inverse transform: p solves F_p = x, Th = p x - F.
struct InverseLegendreGH {
  cplx theta{};
  cplx p{};
};
InverseLegendreGH legendre_gh_inverse(const Expr& F, cplx w, cplx y, cplx x, cplx seed_p,
                                      const NewtonOptions& opts = {});

cplx gh_wave_residual(const Expr& F, const Vec4& point);

struct GHReport {
  MetricSample sample;  // coordinates (w, y, p, z)
  cplx psi{};
  cplx wave{};          // F_pw + F_yy
  // dOmega - *dpsi in the slice metric dy^2/4 + dw dp: (wy, yp, pw)
  std::array<cplx, 3> monopole{};
  double monopole_max = 0.0;
  bool non_monopole = false;
};

GHReport gh_metric(const Expr& F, const Vec4& point, double tolerance = 1e-10);
MetricJetField gh_metric_field(const Expr& F);
// The three forms read off from -d omega^0 ^ d omega^1 with omega^0 = w +
// l y - l^2 p and omega^1 = z - l F_p + l^2 F_y, normalised as
// Sigma(l) = l^2 S00 + 2 l S01 + S11.
Forms3 gh_sd_forms(const Expr& F, const Vec4& point);
// Same forms from the second derivatives of F over (w, y, p).
using Hessian3 = std::array<std::array<cplx, 3>, 3>;
Forms3 gh_sd_forms_from_hessian(const Hessian3& h);

// ------------------------------------------------------------ hierarchy side

std::string t_var(int i);
std::vector<std::string> t_vars(int n);  // t0 .. t{2n}

struct HierarchyF {
  int n = 1;
  Expr F;  // in t0 .. t{2n}
};

// d^2F/dt^{i+1}dt^j - d^2F/dt^i dt^{j+1}, 0 <= i, j <= 2n-1.
cplx wave_system_residual(const HierarchyF& hf, int i, int j, const std::map<std::string, cplx>& point);
double wave_system_max_residual(const HierarchyF& hf, const std::map<std::string, cplx>& point);

struct HierarchyLegendre {
  std::vector<cplx> t;         // t0 .. t{2n}
  cplx F{};
  std::vector<cplx> x1;        // x^{1i}, i < n
  std::vector<cplx> gradient;  // dF/dt^a
  double wave_residual = 0.0;  // max over the wave system at the point
};

// p^i = d_{1i}Th inverted for x^{1i} (i < n) from seeds; t^{n-i-1} = p^i,
// t^{n+i} = x^{0i}; requires d_{1n}Th = 0.
HierarchyLegendre hierarchy_legendre(const HierarchyPotential& h, const std::vector<cplx>& x0,
                                     const std::vector<cplx>& p, const std::vector<cplx>& seeds,
                                     const NewtonOptions& opts = {});

// ------------------------------------------------------------ leaves

// Leaf coordinates by position: (x00, x01, x10, x11).
const std::vector<std::string>& leaf_vars();

MetricSample leaf_metric(const HierarchyPotential& h, const std::map<std::string, cplx>& point);
Forms3 leaf_sd_forms(const HierarchyPotential& h, const std::map<std::string, cplx>& point);
// Jets of the leaf metric with x^{Ai}, i > 1, frozen at `frozen`.
MetricJetField leaf_metric_field(const HierarchyPotential& h, const std::map<std::string, cplx>& frozen);

// Leaf geometry of the potential defined implicitly by a wave-system
// solution: p^i solves x^{1i} = dF/dt^{n-i-1}, Th = sum p^i x^{1i} - F.
struct ImplicitLeaf {
  cplx theta{};
  std::vector<cplx> p;
  cplx th_00_00{}, th_00_10{}, th_10_10{};  // Hessian entries on the leaf
  MetricSample sample;
  Forms3 sd{};
};
ImplicitLeaf leaf_from_f(const HierarchyF& hf, const std::map<std::string, cplx>& point,
                         const std::vector<cplx>& seeds, const NewtonOptions& opts = {});
MetricJetField leaf_metric_field_from_f(const HierarchyF& hf, const std::map<std::string, cplx>& point,
                                        const std::vector<cplx>& seeds, const NewtonOptions& opts = {});

// ------------------------------------------------------------ n = 2

struct N2SecondDerivatives {
  cplx th_xx{}, th_xy{}, th_yy{};
  cplx M{};
};
// Closed-form second derivatives of Th in terms of F (x = x10, y = x00).
N2SecondDerivatives n2_second_derivatives(const HierarchyF& hf, const std::map<std::string, cplx>& point);

// Closed-form metric in (t0, t1, t2, t3) on the surface dF/dt4 = 0.
MetricSample n2_metric(const HierarchyF& hf, const std::map<std::string, cplx>& point,
                       double surface_tolerance = 1e-10);

}  // namespace hforge
