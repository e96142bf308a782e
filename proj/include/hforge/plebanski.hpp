#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hforge/expr.hpp"
#include "hforge/jet.hpp"
#include "hforge/linalg.hpp"

namespace hforge {

// Coordinate order used throughout the four-dimensional code: (w, z, x, y).
enum Coord : size_t { kW = 0, kZ = 1, kX = 2, kY = 3 };
inline const std::vector<std::string>& plebanski_vars() {
  static const std::vector<std::string> v{"w", "z", "x", "y"};
  return v;
}

using Vec4 = std::array<cplx, 4>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;
using Forms3 = std::array<Mat4, 3>;  // primed pairs 0'0', 0'1', 1'1'

std::map<std::string, cplx> plebanski_point(const Vec4& p);

struct MetricSample {
  Vec4 point{};
  Mat4 g{};
  // tetrad[2*A + A'] holds the coordinate components of e_{AA'}.
  std::array<Vec4, 4> tetrad{};
};

// Heavenly equation residual Th_xw + Th_yz + Th_xx Th_yy - Th_xy^2.
cplx heavenly_residual(const Expr& theta, const Vec4& point);

// Calibrated null tetrad; g(e_AA', e_BB') = eps_AB eps_A'B' with eps_01 = 1.
std::array<Vec4, 4> tetrad(const Expr& theta, const Vec4& point);
MetricSample metric_from_theta(const Expr& theta, const Vec4& point);
Mat4 metric_from_tetrad(const std::array<Vec4, 4>& e);

// Tetrad matrix E[a][i] (vector a, coordinate i) from the three Hessian
// entries Th_xx, Th_xy, Th_yy.
template <class S>
Matrix<S> tetrad_matrix(const S& txx, const S& txy, const S& tyy, const S& zero, const S& one) {
  Matrix<S> e = filled(4, 4, zero);
  e[0][kY] = one;                    // e_00' = d_y
  e[2][kX] = -one;                   // e_10' = -d_x
  e[1][kW] = one;                    // e_01' = d_w - Th_xy d_y + Th_yy d_x
  e[1][kY] = -txy;
  e[1][kX] = tyy;
  e[3][kZ] = one;                    // e_11' = d_z + Th_xx d_y - Th_xy d_x
  e[3][kY] = txx;
  e[3][kX] = -txy;
  return e;
}

// Sigma^{A'B'} = -1/2 eps_AB e^{AA'} ^ e^{BB'} from a tetrad matrix; the
// coframe is the inverse transpose. Result: 2-form coefficient matrices.
template <class S>
std::array<Matrix<S>, 3> sd_forms_from_tetrad(const Matrix<S>& e, const S& zero, const S& one) {
  Matrix<S> et = filled(4, 4, zero);
  for (size_t a = 0; a < 4; ++a)
    for (size_t i = 0; i < 4; ++i) et[i][a] = e[a][i];
  Matrix<S> th = inverse<S>(et, zero, one, ErrorKind::DegenerateTetrad);  // th[a][i]
  auto wedge = [&](size_t a, size_t b) {
    Matrix<S> m = filled(4, 4, zero);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) m[i][j] = th[a][i] * th[b][j] - th[b][i] * th[a][j];
    return m;
  };
  // frame index 2*A + A'
  std::array<Matrix<S>, 3> out;
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int p = 0; p < 3; ++p) {
    size_t ap = static_cast<size_t>(pairs[p][0]);
    size_t bp = static_cast<size_t>(pairs[p][1]);
    // eps_01 = 1: e^{0A'} ^ e^{1B'} - e^{1A'} ^ e^{0B'}
    Matrix<S> w1 = wedge(ap, 2 + bp);
    Matrix<S> w2 = wedge(2 + ap, bp);
    Matrix<S> m = filled(4, 4, zero);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) m[i][j] = (w1[i][j] - w2[i][j]) * cplx(-0.5);
    out[static_cast<size_t>(p)] = m;
  }
  return out;
}

Forms3 sd_two_forms(const Expr& theta, const Vec4& point);
// Sigma(lambda) = lambda^2 S^{0'0'} + 2 lambda S^{0'1'} + S^{1'1'}.
Mat4 sigma_at(const Forms3& forms, cplx lambda);
// (S ^ T) as the coefficient of d0^d1^d2^d3.
cplx wedge4(const Mat4& s, const Mat4& t);
// Two-forms read off from -d(omega^0) ^ d(omega^1) with the omega series cut
// after lambda^2: Sigma(lambda) = l^2 F[0] + l F[1] + F[2]. Their wedge
// square vanishes for all lambda exactly when the heavenly equation holds.
Forms3 omega_two_forms(const Expr& theta, const Vec4& point);
Mat4 omega_sigma_at(const Forms3& forms, cplx lambda);
// max over components of d(Sigma^{A'B'}) from the tetrad construction.
double sd_forms_exterior_derivative(const Expr& theta, const Vec4& point);

// ------------------------------------------------------------ curvature

struct CurvatureReport {
  Mat4 ricci{};
  cplx scalar{};
  // SD Weyl spinor components Psi_{0'0'0'0'}, ..., Psi_{1'1'1'1'}.
  std::array<cplx, 5> sd_weyl{};
  bool has_weyl = false;
  double max_ricci = 0.0;
  double max_weyl = 0.0;
};

// Metric as jets over `space` (four variables, by position) expanded about
// `point`; entries must be exact through total degree 2.
using MetricJetField = std::function<Matrix<Jet>(const JetSpacePtr& space, const Vec4& point)>;
using MetricSampleField = std::function<Mat4(const Vec4& point)>;

CurvatureReport curvature_from_jets(const MetricJetField& g, const Vec4& point,
                                    const std::optional<Forms3>& sd_basis = std::nullopt);

struct StepPolicy {
  double first = 1e-5;   // relative step for first derivatives
  double second = 1e-4;  // relative step for second derivatives
};

CurvatureReport curvature_finite_difference(const MetricSampleField& g, const Vec4& point,
                                            const std::optional<Forms3>& sd_basis = std::nullopt,
                                            const StepPolicy& steps = {});

MetricJetField plebanski_metric_field(const Expr& theta);
CurvatureReport curvature_report(const Expr& theta, const Vec4& point);

// ------------------------------------------------------------ spinors

struct KillingSpinorField {
  int k = 1;
  // Components L^{A'_1...A'_k} with upper indices, entry j having j indices 1'.
  std::vector<Expr> components;
};

// e_{A(A'} L_{B'_1...B'_k)}: result[A][m], m = number of lower 1' indices.
std::array<std::vector<cplx>, 2> killing_spinor_residual(const KillingSpinorField& L, const Expr& theta,
                                                         const Vec4& point);

// chi^{A'B'} = SD part of dK (K lowered with g), contracted against the
// Sigma basis; entries ordered 0'0', 0'1', 1'1'.
std::array<cplx, 3> symmetry_chi(const Expr& theta, const std::array<Expr, 4>& K, const Vec4& point);

enum class SymmetryType { Triholomorphic, Killing, Homothety, General, TypeNNonconstant };
const char* to_string(SymmetryType t);

SymmetryType classify_symmetry(const std::array<std::array<Expr, 2>, 2>& phi,
                               const std::vector<std::map<std::string, cplx>>& points,
                               double tol = 1e-9);

}  // namespace hforge
