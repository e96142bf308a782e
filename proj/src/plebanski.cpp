#include "hforge/plebanski.hpp"

#include <algorithm>
#include <cmath>

#include "hforge/errors.hpp"

namespace hforge {

namespace {

Jet theta_jet(const Expr& theta, const Vec4& point, int degree) {
  auto space = JetSpace::make_total(plebanski_vars(), degree);
  return jet_at(theta, space, plebanski_point(point));
}

Mat4 to_mat4(const Matrix<cplx>& m) {
  Mat4 r{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) r[i][j] = m[i][j];
  return r;
}

Matrix<cplx> from_mat4(const Mat4& m) {
  Matrix<cplx> r = filled<cplx>(4, 4, 0.0);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) r[i][j] = m[i][j];
  return r;
}

Mat4 one_form_wedge(const Vec4& a, const Vec4& b) {
  Mat4 m{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) m[i][j] = a[i] * b[j] - b[i] * a[j];
  return m;
}

Mat4 add(const Mat4& a, const Mat4& b) {
  Mat4 r{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

Vec4 basis(size_t i) {
  Vec4 v{};
  v[i] = 1.0;
  return v;
}

double max_abs(const Mat4& m) {
  double r = 0.0;
  for (const auto& row : m)
    for (const auto& x : row) r = std::max(r, std::abs(x));
  return r;
}

using Tensor3 = std::array<Mat4, 4>;  // [k][i][j] = d_k g_ij
using Tensor4 = std::array<std::array<Mat4, 4>, 4>;

CurvatureReport curvature_from_derivatives(const Mat4& g, const Tensor3& dg, const Tensor4& ddg,
                                           const std::optional<Forms3>& sd) {
  const Mat4 gi = to_mat4(inverse<cplx>(from_mat4(g), 0.0, 1.0, ErrorKind::DegenerateMetric));
  Tensor3 dgi{};
  for (size_t c = 0; c < 4; ++c)
    for (size_t a = 0; a < 4; ++a)
      for (size_t b = 0; b < 4; ++b) {
        cplx s = 0.0;
        for (size_t p = 0; p < 4; ++p)
          for (size_t q = 0; q < 4; ++q) s -= gi[a][p] * dg[c][p][q] * gi[q][b];
        dgi[c][a][b] = s;
      }

  // Gam[a][b][c] and dGam[e][a][b][c]
  std::array<Mat4, 4> gam{};
  std::array<std::array<Mat4, 4>, 4> dgam{};
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = 0; b < 4; ++b)
      for (size_t c = 0; c < 4; ++c) {
        cplx s = 0.0;
        for (size_t d = 0; d < 4; ++d) s += gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
        gam[a][b][c] = 0.5 * s;
        for (size_t e = 0; e < 4; ++e) {
          cplx t = 0.0;
          for (size_t d = 0; d < 4; ++d) {
            t += dgi[e][a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
            t += gi[a][d] * (ddg[e][b][d][c] + ddg[e][c][d][b] - ddg[e][d][b][c]);
          }
          dgam[e][a][b][c] = 0.5 * t;
        }
      }

  // R^a_{bcd}
  std::array<std::array<Mat4, 4>, 4> riem{};
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = 0; b < 4; ++b)
      for (size_t c = 0; c < 4; ++c)
        for (size_t d = 0; d < 4; ++d) {
          cplx s = dgam[c][a][d][b] - dgam[d][a][c][b];
          for (size_t e = 0; e < 4; ++e) s += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
          riem[a][b][c][d] = s;
        }

  CurvatureReport rep;
  for (size_t b = 0; b < 4; ++b)
    for (size_t d = 0; d < 4; ++d) {
      cplx s = 0.0;
      for (size_t a = 0; a < 4; ++a) s += riem[a][b][a][d];
      rep.ricci[b][d] = s;
    }
  for (size_t b = 0; b < 4; ++b)
    for (size_t d = 0; d < 4; ++d) rep.scalar += gi[b][d] * rep.ricci[b][d];
  rep.max_ricci = max_abs(rep.ricci);

  if (sd) {
    // lower R_abcd
    std::array<std::array<Mat4, 4>, 4> low{};
    for (size_t a = 0; a < 4; ++a)
      for (size_t b = 0; b < 4; ++b)
        for (size_t c = 0; c < 4; ++c)
          for (size_t d = 0; d < 4; ++d) {
            cplx s = 0.0;
            for (size_t e = 0; e < 4; ++e) s += g[a][e] * riem[e][b][c][d];
            low[a][b][c][d] = s;
          }
    std::array<Mat4, 3> up{};
    for (size_t p = 0; p < 3; ++p)
      for (size_t a = 0; a < 4; ++a)
        for (size_t b = 0; b < 4; ++b) {
          cplx s = 0.0;
          for (size_t c = 0; c < 4; ++c)
            for (size_t d = 0; d < 4; ++d) s += gi[a][c] * gi[b][d] * (*sd)[p][c][d];
          up[p][a][b] = s;
        }
    cplx m[3][3];
    for (size_t p = 0; p < 3; ++p)
      for (size_t q = 0; q < 3; ++q) {
        cplx s = 0.0;
        for (size_t a = 0; a < 4; ++a)
          for (size_t b = 0; b < 4; ++b) {
            if (up[p][a][b] == cplx(0.0)) continue;
            for (size_t c = 0; c < 4; ++c)
              for (size_t d = 0; d < 4; ++d) s += low[a][b][c][d] * up[p][a][b] * up[q][c][d];
          }
        m[p][q] = s;
      }
    rep.sd_weyl = {m[0][0], m[0][1], (m[0][2] + 2.0 * m[1][1]) / 3.0, m[1][2], m[2][2]};
    rep.has_weyl = true;
    for (const auto& c : rep.sd_weyl) rep.max_weyl = std::max(rep.max_weyl, std::abs(c));
  }
  return rep;
}

}  // namespace

std::map<std::string, cplx> plebanski_point(const Vec4& p) {
  return {{"w", p[kW]}, {"z", p[kZ]}, {"x", p[kX]}, {"y", p[kY]}};
}

cplx heavenly_residual(const Expr& theta, const Vec4& point) {
  Jet t = theta_jet(theta, point, 2);
  return t.d(kX, kW) + t.d(kY, kZ) + t.d(kX, kX) * t.d(kY, kY) - t.d(kX, kY) * t.d(kX, kY);
}

std::array<Vec4, 4> tetrad(const Expr& theta, const Vec4& point) {
  Jet t = theta_jet(theta, point, 2);
  Matrix<cplx> e = tetrad_matrix<cplx>(t.d(kX, kX), t.d(kX, kY), t.d(kY, kY), 0.0, 1.0);
  std::array<Vec4, 4> out{};
  for (size_t a = 0; a < 4; ++a)
    for (size_t i = 0; i < 4; ++i) out[a][i] = e[a][i];
  return out;
}

Mat4 metric_from_tetrad(const std::array<Vec4, 4>& e) {
  Matrix<cplx> et = filled<cplx>(4, 4, 0.0);
  for (size_t a = 0; a < 4; ++a)
    for (size_t i = 0; i < 4; ++i) et[i][a] = e[a][i];
  Matrix<cplx> th = inverse<cplx>(et, 0.0, 1.0, ErrorKind::DegenerateTetrad);
  // g = sum eps_AB eps_A'B' e^{AA'} (x) e^{BB'}; frame index 2A + A'.
  auto eps = [](size_t a, size_t b) { return a == b ? 0.0 : (a < b ? 1.0 : -1.0); };
  Mat4 g{};
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = 0; b < 4; ++b) {
      double c = eps(a / 2, b / 2) * eps(a % 2, b % 2);
      if (c == 0.0) continue;
      for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j) g[i][j] += c * th[a][i] * th[b][j];
    }
  return g;
}

MetricSample metric_from_theta(const Expr& theta, const Vec4& point) {
  Jet t = theta_jet(theta, point, 2);
  MetricSample s;
  s.point = point;
  s.g[kW][kX] = s.g[kX][kW] = 1.0;
  s.g[kZ][kY] = s.g[kY][kZ] = 1.0;
  s.g[kZ][kZ] = -2.0 * t.d(kX, kX);
  s.g[kW][kW] = -2.0 * t.d(kY, kY);
  s.g[kW][kZ] = s.g[kZ][kW] = 2.0 * t.d(kX, kY);
  Matrix<cplx> e = tetrad_matrix<cplx>(t.d(kX, kX), t.d(kX, kY), t.d(kY, kY), 0.0, 1.0);
  for (size_t a = 0; a < 4; ++a)
    for (size_t i = 0; i < 4; ++i) s.tetrad[a][i] = e[a][i];
  return s;
}

Forms3 sd_two_forms(const Expr& theta, const Vec4& point) {
  Jet t = theta_jet(theta, point, 2);
  Matrix<cplx> e = tetrad_matrix<cplx>(t.d(kX, kX), t.d(kX, kY), t.d(kY, kY), 0.0, 1.0);
  auto f = sd_forms_from_tetrad<cplx>(e, 0.0, 1.0);
  return {to_mat4(f[0]), to_mat4(f[1]), to_mat4(f[2])};
}

Mat4 sigma_at(const Forms3& forms, cplx lambda) {
  Mat4 r{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j)
      r[i][j] = lambda * lambda * forms[0][i][j] + 2.0 * lambda * forms[1][i][j] + forms[2][i][j];
  return r;
}

cplx wedge4(const Mat4& s, const Mat4& t) {
  return s[0][1] * t[2][3] - s[0][2] * t[1][3] + s[0][3] * t[1][2] + s[1][2] * t[0][3] -
         s[1][3] * t[0][2] + s[2][3] * t[0][1];
}

Forms3 omega_two_forms(const Expr& theta, const Vec4& point) {
  Jet t = theta_jet(theta, point, 2);
  Vec4 dthx{};
  Vec4 dthy{};
  for (size_t i = 0; i < 4; ++i) {
    dthx[i] = t.d(kX, i);
    dthy[i] = t.d(kY, i);
  }
  const Vec4 dw = basis(kW), dz = basis(kZ), dx = basis(kX), dy = basis(kY);
  Mat4 s00 = add(add(one_form_wedge(dw, dthy), one_form_wedge(dy, dx)), one_form_wedge(dthx, dz));
  Mat4 c1 = add(one_form_wedge(dz, dy), one_form_wedge(dw, dx));
  Mat4 s11 = one_form_wedge(dz, dw);
  return {s00, c1, s11};
}

Mat4 omega_sigma_at(const Forms3& forms, cplx lambda) {
  Mat4 r{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j)
      r[i][j] = lambda * lambda * forms[0][i][j] + lambda * forms[1][i][j] + forms[2][i][j];
  return r;
}

double sd_forms_exterior_derivative(const Expr& theta, const Vec4& point) {
  auto space = JetSpace::make_total(plebanski_vars(), 3);
  Jet t = jet_at(theta, space, plebanski_point(point));
  Jet tx = t.derivative(kX);
  Jet ty = t.derivative(kY);
  Jet txx = tx.derivative(kX);
  Jet txy = tx.derivative(kY);
  Jet tyy = ty.derivative(kY);
  Jet zero(space, 0.0);
  Jet one(space, 1.0);
  auto e = tetrad_matrix<Jet>(txx, txy, tyy, zero, one);
  auto forms = sd_forms_from_tetrad<Jet>(e, zero, one);
  double worst = 0.0;
  for (const auto& f : forms)
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j)
        for (size_t k = j + 1; k < 4; ++k) {
          cplx d = f[j][k].d(i) + f[k][i].d(j) + f[i][j].d(k);
          worst = std::max(worst, std::abs(d));
        }
  return worst;
}

// ------------------------------------------------------------ curvature

CurvatureReport curvature_from_jets(const MetricJetField& field, const Vec4& point,
                                    const std::optional<Forms3>& sd_basis) {
  auto space = JetSpace::make_total({"c0", "c1", "c2", "c3"}, 4);
  Matrix<Jet> g = field(space, point);
  Mat4 g0{};
  Tensor3 dg{};
  Tensor4 ddg{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) {
      g0[i][j] = g[i][j].value();
      for (size_t k = 0; k < 4; ++k) {
        dg[k][i][j] = g[i][j].d(k);
        for (size_t l = 0; l < 4; ++l) ddg[k][l][i][j] = g[i][j].d(k, l);
      }
    }
  return curvature_from_derivatives(g0, dg, ddg, sd_basis);
}

CurvatureReport curvature_finite_difference(const MetricSampleField& field, const Vec4& point,
                                            const std::optional<Forms3>& sd_basis,
                                            const StepPolicy& steps) {
  auto shifted = [&](std::initializer_list<std::pair<size_t, double>> moves) {
    Vec4 p = point;
    for (const auto& [k, h] : moves) p[k] += h;
    return field(p);
  };
  auto step = [&](size_t k, double rel) { return rel * std::max(1.0, std::abs(point[k])); };

  Mat4 g0 = field(point);
  Tensor3 dg{};
  Tensor4 ddg{};
  for (size_t k = 0; k < 4; ++k) {
    double h = step(k, steps.first);
    Mat4 gp = shifted({{k, h}});
    Mat4 gm = shifted({{k, -h}});
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
  }
  for (size_t k = 0; k < 4; ++k) {
    double hk = step(k, steps.second);
    Mat4 gp = shifted({{k, hk}});
    Mat4 gm = shifted({{k, -hk}});
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) ddg[k][k][i][j] = (gp[i][j] - 2.0 * g0[i][j] + gm[i][j]) / (hk * hk);
    for (size_t l = k + 1; l < 4; ++l) {
      double hl = step(l, steps.second);
      Mat4 pp = shifted({{k, hk}, {l, hl}});
      Mat4 pm = shifted({{k, hk}, {l, -hl}});
      Mat4 mp = shifted({{k, -hk}, {l, hl}});
      Mat4 mm = shifted({{k, -hk}, {l, -hl}});
      for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j) {
          cplx v = (pp[i][j] - pm[i][j] - mp[i][j] + mm[i][j]) / (4.0 * hk * hl);
          ddg[k][l][i][j] = v;
          ddg[l][k][i][j] = v;
        }
    }
  }
  return curvature_from_derivatives(g0, dg, ddg, sd_basis);
}

MetricJetField plebanski_metric_field(const Expr& theta) {
  return [theta](const JetSpacePtr& space, const Vec4& point) {
    std::unordered_map<std::string, Jet> b;
    const auto& names = plebanski_vars();
    for (size_t v = 0; v < 4; ++v) b.emplace(names[v], Jet::variable(space, v, point[v]));
    Jet t = jet_of(theta, b, space);
    Jet tx = t.derivative(kX);
    Jet ty = t.derivative(kY);
    Jet txx = tx.derivative(kX);
    Jet txy = tx.derivative(kY);
    Jet tyy = ty.derivative(kY);
    Jet zero(space, 0.0);
    Jet one(space, 1.0);
    Matrix<Jet> g = filled(4, 4, zero);
    g[kW][kX] = g[kX][kW] = one;
    g[kZ][kY] = g[kY][kZ] = one;
    g[kZ][kZ] = txx * cplx(-2.0);
    g[kW][kW] = tyy * cplx(-2.0);
    g[kW][kZ] = g[kZ][kW] = txy * cplx(2.0);
    return g;
  };
}

CurvatureReport curvature_report(const Expr& theta, const Vec4& point) {
  return curvature_from_jets(plebanski_metric_field(theta), point, sd_two_forms(theta, point));
}

// ------------------------------------------------------------ spinors

std::array<std::vector<cplx>, 2> killing_spinor_residual(const KillingSpinorField& L, const Expr& theta,
                                                         const Vec4& point) {
  const int k = L.k;
  if (k < 1 || static_cast<int>(L.components.size()) != k + 1)
    throw Error(ErrorKind::InvalidArgument, "Killing spinor of valence k needs k+1 components");
  auto e = tetrad(theta, point);
  auto space = JetSpace::make_total(plebanski_vars(), 1);
  auto at = plebanski_point(point);
  // lower components: L_{j ones} = (-1)^{k-j} L^{(k-j) ones}
  std::vector<Vec4> grad(static_cast<size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    Jet lj = jet_at(L.components[static_cast<size_t>(k - j)], space, at);
    double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
    for (size_t i = 0; i < 4; ++i) grad[static_cast<size_t>(j)][i] = sign * lj.d(i);
  }
  auto apply = [&](size_t frame, int j) {
    cplx s = 0.0;
    for (size_t i = 0; i < 4; ++i) s += e[frame][i] * grad[static_cast<size_t>(j)][i];
    return s;
  };
  std::array<std::vector<cplx>, 2> out;
  for (size_t A = 0; A < 2; ++A) {
    out[A].assign(static_cast<size_t>(k) + 2, 0.0);
    for (int m = 0; m <= k + 1; ++m) {
      cplx s = 0.0;
      if (m >= 1) s += static_cast<double>(m) * apply(2 * A + 1, m - 1);
      if (m <= k) s += static_cast<double>(k + 1 - m) * apply(2 * A, m);
      out[A][static_cast<size_t>(m)] = s / static_cast<double>(k + 1);
    }
  }
  return out;
}

std::array<cplx, 3> symmetry_chi(const Expr& theta, const std::array<Expr, 4>& K, const Vec4& point) {
  auto space = JetSpace::make_total(plebanski_vars(), 3);
  auto at = plebanski_point(point);
  Matrix<Jet> g = plebanski_metric_field(theta)(space, point);
  std::array<Jet, 4> kj;
  for (size_t i = 0; i < 4; ++i) kj[i] = jet_at(K[i], space, at);
  std::array<Jet, 4> flat;
  for (size_t a = 0; a < 4; ++a) {
    Jet s(space, 0.0);
    for (size_t b = 0; b < 4; ++b) s += g[a][b] * kj[b];
    flat[a] = s;
  }
  Mat4 dk{};
  for (size_t a = 0; a < 4; ++a)
    for (size_t b = 0; b < 4; ++b) dk[a][b] = flat[b].d(a) - flat[a].d(b);
  Mat4 g0{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) g0[i][j] = g[i][j].value();
  Mat4 gi = to_mat4(inverse<cplx>(from_mat4(g0), 0.0, 1.0, ErrorKind::DegenerateMetric));
  Forms3 sd = sd_two_forms(theta, point);
  std::array<cplx, 3> chi{};
  for (size_t p = 0; p < 3; ++p) {
    cplx s = 0.0;
    for (size_t a = 0; a < 4; ++a)
      for (size_t b = 0; b < 4; ++b) {
        cplx up = 0.0;
        for (size_t c = 0; c < 4; ++c)
          for (size_t d = 0; d < 4; ++d) up += gi[a][c] * gi[b][d] * sd[p][c][d];
        s += 0.5 * dk[a][b] * up;
      }
    chi[p] = s;
  }
  return chi;
}

const char* to_string(SymmetryType t) {
  switch (t) {
    case SymmetryType::Triholomorphic: return "triholomorphic";
    case SymmetryType::Killing: return "killing";
    case SymmetryType::Homothety: return "homothety";
    case SymmetryType::General: return "general";
    case SymmetryType::TypeNNonconstant: return "type-N-nonconstant";
  }
  return "general";
}

SymmetryType classify_symmetry(const std::array<std::array<Expr, 2>, 2>& phi,
                               const std::vector<std::map<std::string, cplx>>& points, double tol) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "classify_symmetry needs sample points");
  std::vector<cplx> traces;
  std::vector<std::array<cplx, 2>> eig;
  double scale = 0.0;
  for (const auto& p : points) {
    cplx a = phi[0][0].evaluate(p), b = phi[0][1].evaluate(p);
    cplx c = phi[1][0].evaluate(p), d = phi[1][1].evaluate(p);
    for (cplx v : {a, b, c, d})
      if (!(std::isfinite(v.real()) && std::isfinite(v.imag()))) throw Error(ErrorKind::SingularEvaluation, "phi is not finite at a sample point");
    cplx tr = a + d;
    cplx disc = std::sqrt((a - d) * (a - d) / 4.0 + b * c);
    traces.push_back(tr);
    eig.push_back({tr / 2.0 + disc, tr / 2.0 - disc});
    scale = std::max({scale, std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  }
  const double eps = tol * std::max(1.0, scale);
  bool equal = true;
  for (const auto& e : eig) equal = equal && std::abs(e[0] - e[1]) <= eps;
  if (equal) return SymmetryType::Triholomorphic;
  bool trace_zero = true;
  bool trace_const = true;
  for (const auto& t : traces) {
    trace_zero = trace_zero && std::abs(t) <= eps;
    trace_const = trace_const && std::abs(t - traces.front()) <= eps;
  }
  if (trace_zero) return SymmetryType::Killing;
  if (trace_const) return SymmetryType::Homothety;
  // eigenvalues as unordered pairs
  auto same_pair = [&](const std::array<cplx, 2>& u, const std::array<cplx, 2>& v) {
    return (std::abs(u[0] - v[0]) <= eps && std::abs(u[1] - v[1]) <= eps) ||
           (std::abs(u[0] - v[1]) <= eps && std::abs(u[1] - v[0]) <= eps);
  };
  for (const auto& e : eig)
    if (!same_pair(e, eig.front())) return SymmetryType::TypeNNonconstant;
  return SymmetryType::General;
}

}  // namespace hforge
