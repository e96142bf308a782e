#include "hforge/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hforge/errors.hpp"
#include "hforge/jet.hpp"

namespace hforge {

namespace {

const std::vector<std::string> kSlice{"w", "y", "p"};

// Bindings that make every variable of `space` a coordinate jet.
std::unordered_map<std::string, Jet> coordinate_jets(const JetSpacePtr& space,
                                                     const std::map<std::string, cplx>& at) {
  std::unordered_map<std::string, Jet> b;
  for (size_t v = 0; v < space->nvars(); ++v) {
    const auto& name = space->vars()[v];
    auto it = at.find(name);
    if (it == at.end()) throw Error(ErrorKind::UnboundVariable, "unbound variable '" + name + "'");
    b.emplace(name, Jet::variable(space, v, it->second));
  }
  return b;
}

std::map<std::string, cplx> slice_point(const Vec4& point) {
  return {{"w", point[gW]}, {"y", point[gY]}, {"p", point[gP]}, {"z", point[gZ]}};
}

// Plebanski tetrad with Hessian entries (txx, txy, tyy), as a 4x4 over (w, z, x, y).
Matrix<cplx> plebanski_tetrad(cplx txx, cplx txy, cplx tyy) {
  return tetrad_matrix<cplx>(txx, txy, tyy, 0.0, 1.0);
}

Mat4 to_mat4(const Matrix<cplx>& m) {
  Mat4 r{};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) r[i][j] = m[i][j];
  return r;
}

// Leaf metric in (x00, x01, x10, x11) from the leaf Hessian entries.
template <class S>
Matrix<S> leaf_metric_matrix(const S& h0000, const S& h0010, const S& h1010, const S& zero, const S& one) {
  Matrix<S> g = filled(4, 4, zero);
  g[1][2] = g[2][1] = -one;
  g[0][3] = g[3][0] = one;
  g[3][3] = h1010 * cplx(-2.0);
  g[1][1] = h0000 * cplx(-2.0);
  g[1][3] = g[3][1] = h0010 * cplx(-2.0);
  return g;
}

// Plebanski tetrad rewritten in leaf coordinates: x00 = y, x01 = w, x10 = -x, x11 = z.
std::array<Vec4, 4> leaf_tetrad(cplx h0000, cplx h0010, cplx h1010) {
  Matrix<cplx> e = plebanski_tetrad(h1010, -h0010, h0000);
  std::array<Vec4, 4> out{};
  for (size_t a = 0; a < 4; ++a) out[a] = {e[a][kY], e[a][kW], -e[a][kX], e[a][kZ]};
  return out;
}

MetricSample leaf_sample(cplx h0000, cplx h0010, cplx h1010, const Vec4& point) {
  MetricSample s;
  s.point = point;
  s.g = to_mat4(leaf_metric_matrix<cplx>(h0000, h0010, h1010, 0.0, 1.0));
  s.tetrad = leaf_tetrad(h0000, h0010, h1010);
  return s;
}

Forms3 forms_from_frame(const std::array<Vec4, 4>& e) {
  Matrix<cplx> m = filled<cplx>(4, 4, 0.0);
  for (size_t a = 0; a < 4; ++a)
    for (size_t i = 0; i < 4; ++i) m[a][i] = e[a][i];
  auto f = sd_forms_from_tetrad<cplx>(m, 0.0, 1.0);
  return {to_mat4(f[0]), to_mat4(f[1]), to_mat4(f[2])};
}

Vec4 leaf_point(const std::map<std::string, cplx>& point) {
  Vec4 v{};
  const auto& names = leaf_vars();
  for (size_t k = 0; k < 4; ++k) {
    auto it = point.find(names[k]);
    if (it == point.end()) throw Error(ErrorKind::UnboundVariable, "unbound variable '" + names[k] + "'");
    v[k] = it->second;
  }
  return v;
}

void check_wave_index(const HierarchyF& hf, int i) {
  if (i < 0 || i > 2 * hf.n - 1)
    throw Error(ErrorKind::IndexRange,
                "wave-system index " + std::to_string(i) + " outside 0.." + std::to_string(2 * hf.n - 1));
}

double wave_max_from_jet(const Jet& F, int n) {
  double worst = 0.0;
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i + 1; j < 2 * n; ++j) {
      auto a = static_cast<size_t>(i), b = static_cast<size_t>(j);
      worst = std::max(worst, std::abs(F.d(a + 1, b) - F.d(a, b + 1)));
    }
  return worst;
}

// Substitution t^{n+i} -> x-name, t^{n-i-1} -> p_i for the implicit leaf.
struct LeafNames {
  std::map<std::string, Expr> sub;
  std::vector<Expr> x1;  // x^{1i} as expressions, i < n
  std::vector<std::string> unknowns;
};

LeafNames leaf_names(int n, const std::vector<std::string>& leaf_alias) {
  // leaf_alias renames (x00, x01, x10, x11)
  LeafNames ln;
  for (int i = 0; i <= n; ++i) {
    std::string name = i < 2 ? leaf_alias[static_cast<size_t>(i)] : hierarchy_var(0, i);
    ln.sub[t_var(n + i)] = Expr::var(name);
  }
  for (int i = 0; i < n; ++i) {
    std::string pn = "p" + std::to_string(i);
    ln.unknowns.push_back(pn);
    ln.sub[t_var(n - i - 1)] = Expr::var(pn);
    std::string xn = i < 2 ? leaf_alias[static_cast<size_t>(2 + i)] : hierarchy_var(1, i);
    ln.x1.push_back(Expr::var(xn));
  }
  return ln;
}

struct ImplicitTheta {
  std::vector<cplx> p;
  Jet theta;
};

// Theta jet over `space` for the implicit potential of hf; `fixed` holds the
// space variables and every other x value.
ImplicitTheta implicit_theta(const HierarchyF& hf, const LeafNames& ln, const JetSpacePtr& space,
                             const std::map<std::string, cplx>& fixed, const std::vector<cplx>& seeds,
                             const NewtonOptions& opts) {
  const int n = hf.n;
  if (static_cast<int>(seeds.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "need one seed per momentum p^i");
  std::vector<Expr> eqs;
  for (int i = 0; i < n; ++i)
    eqs.push_back(hf.F.diff(t_var(n - i - 1)).substitute(ln.sub) - ln.x1[static_cast<size_t>(i)]);
  ImplicitTheta out;
  out.p = newton_solve(eqs, ln.unknowns, fixed, seeds, opts);
  auto pj = implicit_jets(eqs, ln.unknowns, space, fixed, out.p, opts.degenerate);
  Expr th = -hf.F.substitute(ln.sub);
  for (int i = 0; i < n; ++i) th = th + Expr::var(ln.unknowns[static_cast<size_t>(i)]) * ln.x1[static_cast<size_t>(i)];
  auto bind = coordinate_jets(space, fixed);
  for (int i = 0; i < n; ++i) bind.insert_or_assign(ln.unknowns[static_cast<size_t>(i)], pj[static_cast<size_t>(i)]);
  out.theta = jet_of(th, bind, space, fixed);
  return out;
}

}  // namespace

// ------------------------------------------------------------ Gibbons-Hawking

LegendreGH legendre_gh(const Expr& theta, cplx w, cplx y, cplx p, cplx seed_x, const NewtonOptions& opts) {
  if (theta.depends_on("z")) throw Error(ErrorKind::InvalidArgument, "Legendre transform needs Theta_z = 0");
  Expr eq = theta.diff("x") - Expr::var("p");
  std::map<std::string, cplx> fixed{{"w", w}, {"y", y}, {"p", p}, {"z", 0.0}};
  LegendreGH out;
  out.x = newton_solve({eq}, {"x"}, fixed, {seed_x}, opts)[0];
  std::map<std::string, cplx> at = fixed;
  at["x"] = out.x;
  out.F = p * out.x - theta.evaluate(at);
  out.theta_y = theta.diff("y").evaluate(at);

  auto space = JetSpace::make_total(kSlice, 1);
  Jet xj = implicit_jets({eq}, {"x"}, space, fixed, {out.x}, opts.degenerate)[0];
  auto bind = coordinate_jets(space, fixed);
  bind.insert_or_assign("x", xj);
  Jet Fj = bind.at("p") * xj - jet_of(theta, bind, space, fixed);
  out.F_p = Fj.d(2);
  out.F_y = Fj.d(1);
  out.identity_residual = std::max(std::abs(out.x - out.F_p), std::abs(out.theta_y + out.F_y));
  return out;
}

InverseLegendreGH legendre_gh_inverse(const Expr& F, cplx w, cplx y, cplx x, cplx seed_p,
                                      const NewtonOptions& opts) {
  Expr eq = F.diff("p") - Expr::var("x");
  std::map<std::string, cplx> fixed{{"w", w}, {"y", y}, {"x", x}};
  InverseLegendreGH out;
  out.p = newton_solve({eq}, {"p"}, fixed, {seed_p}, opts)[0];
  fixed["p"] = out.p;
  out.theta = out.p * x - F.evaluate(fixed);
  return out;
}

cplx gh_wave_residual(const Expr& F, const Vec4& point) {
  auto space = JetSpace::make_total(kSlice, 2);
  Jet f = jet_at(F, space, slice_point(point));
  return f.d(2, 0) + f.d(1, 1);
}

GHReport gh_metric(const Expr& F, const Vec4& point, double tolerance) {
  auto space = JetSpace::make_total(kSlice, 3);
  Jet f = jet_at(F, space, slice_point(point));
  auto D = [&](int a, int b, int c) { return f.partial({a, b, c}); };  // orders in (w, y, p)
  GHReport rep;
  const cplx psi = D(0, 0, 2);
  if (std::abs(psi) < 1e-14) throw Error(ErrorKind::DegenerateGH, "degenerate GH potential: F_pp = 0");
  const cplx fpy = D(0, 1, 1);
  const cplx fpw = D(1, 0, 1);
  rep.psi = psi;
  rep.wave = fpw + D(0, 2, 0);

  Mat4& g = rep.sample.g;
  rep.sample.point = point;
  g[gW][gP] = g[gP][gW] = psi / 2.0;
  g[gZ][gZ] = -1.0 / psi;
  g[gZ][gW] = g[gW][gZ] = -fpy / psi;
  g[gZ][gY] = g[gY][gZ] = 0.5;
  g[gW][gW] = -fpy * fpy / psi;
  g[gW][gY] = g[gY][gW] = fpy / 2.0;

  // Tetrad: Plebanski frame with Th_xx = 1/psi, Th_xy = -F_py/psi,
  // Th_yy = F_pw + F_py^2/psi, pushed forward by x = F_p and scaled by
  // sqrt 2 (the GH form is half the pulled-back Plebanski metric).
  Matrix<cplx> e = plebanski_tetrad(1.0 / psi, -fpy / psi, fpw + fpy * fpy / psi);
  const double r2 = std::sqrt(2.0);
  for (size_t a = 0; a < 4; ++a) {
    cplx vp = (e[a][kX] - fpw * e[a][kW] - fpy * e[a][kY]) / psi;
    rep.sample.tetrad[a] = {r2 * e[a][kW], r2 * e[a][kY], r2 * vp, r2 * e[a][kZ]};
  }

  // Monopole equation on the slice (w, y, p), h = dy^2/4 + dw dp.
  cplx dpsi[3] = {D(1, 0, 2), D(0, 1, 2), D(0, 0, 3)};
  cplx omega_d[3][3] = {};  // d_a Omega_b, Omega = F_py dw - psi/2 dy
  omega_d[0][0] = D(1, 1, 1);
  omega_d[1][0] = D(0, 2, 1);
  omega_d[2][0] = D(0, 1, 2);
  for (int a = 0; a < 3; ++a) omega_d[a][1] = -dpsi[a] / 2.0;
  const double hinv[3][3] = {{0, 0, 2}, {0, 4, 0}, {2, 0, 0}};
  const double vol = 0.25;
  auto eps = [](int a, int b, int c) {
    return static_cast<double>((a - b) * (b - c) * (c - a)) / 2.0;
  };
  const int pairs[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  double scale = 1.0;
  for (int k = 0; k < 3; ++k) {
    const int a = pairs[k][0], b = pairs[k][1];
    cplx star = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d) star += vol * eps(a, b, c) * hinv[c][d] * dpsi[d];
    cplx dom = omega_d[a][b] - omega_d[b][a];
    rep.monopole[static_cast<size_t>(k)] = dom - star;
    rep.monopole_max = std::max(rep.monopole_max, std::abs(dom - star));
    scale = std::max({scale, std::abs(dom), std::abs(star)});
  }
  const double wscale = std::max({1.0, std::abs(fpw), std::abs(D(0, 2, 0))});
  rep.non_monopole = std::abs(rep.wave) > tolerance * wscale || rep.monopole_max > tolerance * scale;
  return rep;
}

MetricJetField gh_metric_field(const Expr& F) {
  return [F](const JetSpacePtr& space, const Vec4& point) {
    std::unordered_map<std::string, Jet> b;
    for (size_t v = 0; v < 3; ++v) b.emplace(kSlice[v], Jet::variable(space, v, point[v]));
    Jet f = jet_of(F, b, space);
    Jet fp = f.derivative(gP);
    Jet psi = fp.derivative(gP);
    Jet fpy = fp.derivative(gY);
    Jet zero(space, 0.0);
    Jet inv = reciprocal(psi);
    Matrix<Jet> g = filled(4, 4, zero);
    g[gW][gP] = g[gP][gW] = psi * cplx(0.5);
    g[gZ][gZ] = -inv;
    g[gZ][gW] = g[gW][gZ] = -(fpy * inv);
    g[gZ][gY] = g[gY][gZ] = Jet(space, 0.5);
    g[gW][gW] = -(fpy * fpy * inv);
    g[gW][gY] = g[gY][gW] = fpy * cplx(0.5);
    return g;
  };
}

Forms3 gh_sd_forms_from_hessian(const Hessian3& h) {
  auto one_form = [](cplx w, cplx y, cplx p, cplx z) { return Vec4{w, y, p, z}; };
  const Vec4 dw = one_form(1, 0, 0, 0), dy = one_form(0, 1, 0, 0), dp = one_form(0, 0, 1, 0),
             dz = one_form(0, 0, 0, 1);
  const Vec4 dFp = one_form(h[gP][gW], h[gP][gY], h[gP][gP], 0.0);
  const Vec4 dFy = one_form(h[gY][gW], h[gY][gY], h[gY][gP], 0.0);
  auto wedge = [](const Vec4& a, const Vec4& b) {
    Mat4 m{};
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) m[i][j] = a[i] * b[j] - b[i] * a[j];
    return m;
  };
  Forms3 out{};
  Mat4 a = wedge(dz, dp), b = wedge(dy, dFp), c = wedge(dw, dFy);
  Mat4 d = wedge(dz, dy), e = wedge(dw, dFp);
  Mat4 s = wedge(dz, dw);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) {
      out[0][i][j] = -a[i][j] + b[i][j] - c[i][j];
      out[1][i][j] = 0.5 * (d[i][j] + e[i][j]);
      out[2][i][j] = s[i][j];
    }
  return out;
}

Forms3 gh_sd_forms(const Expr& F, const Vec4& point) {
  auto space = JetSpace::make_total(kSlice, 2);
  Jet f = jet_at(F, space, slice_point(point));
  Hessian3 h{};
  for (size_t a = 0; a < 3; ++a)
    for (size_t b = 0; b < 3; ++b) h[a][b] = f.d(a, b);
  return gh_sd_forms_from_hessian(h);
}

// ------------------------------------------------------------ hierarchy side

std::string t_var(int i) { return "t" + std::to_string(i); }

std::vector<std::string> t_vars(int n) {
  std::vector<std::string> v;
  for (int i = 0; i <= 2 * n; ++i) v.push_back(t_var(i));
  return v;
}

cplx wave_system_residual(const HierarchyF& hf, int i, int j, const std::map<std::string, cplx>& point) {
  if (hf.n < 1) throw Error(ErrorKind::IndexRange, "hierarchy level must be at least 1");
  check_wave_index(hf, i);
  check_wave_index(hf, j);
  auto space = JetSpace::make_total(t_vars(hf.n), 2);
  Jet F = jet_at(hf.F, space, point);
  auto a = static_cast<size_t>(i), b = static_cast<size_t>(j);
  return F.d(a + 1, b) - F.d(a, b + 1);
}

double wave_system_max_residual(const HierarchyF& hf, const std::map<std::string, cplx>& point) {
  auto space = JetSpace::make_total(t_vars(hf.n), 2);
  return wave_max_from_jet(jet_at(hf.F, space, point), hf.n);
}

HierarchyLegendre hierarchy_legendre(const HierarchyPotential& h, const std::vector<cplx>& x0,
                                     const std::vector<cplx>& p, const std::vector<cplx>& seeds,
                                     const NewtonOptions& opts) {
  const int n = h.n;
  if (n < 1) throw Error(ErrorKind::IndexRange, "hierarchy level must be at least 1");
  if (static_cast<int>(x0.size()) != n + 1 || static_cast<int>(p.size()) != n ||
      static_cast<int>(seeds.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "hierarchy Legendre needs n+1 values x^{0i}, n momenta and n seeds");
  const std::string top = hierarchy_var(1, n);
  if (!h.theta.diff(top).is_zero())
    throw Error(ErrorKind::InvalidArgument, "Legendre transform needs dTheta/d" + top + " = 0");

  std::map<std::string, Expr> sub;
  std::map<std::string, cplx> fixed{{top, 0.0}};
  HierarchyLegendre out;
  out.t.assign(static_cast<size_t>(2 * n + 1), 0.0);
  for (int i = 0; i <= n; ++i) {
    sub[hierarchy_var(0, i)] = Expr::var(t_var(n + i));
    out.t[static_cast<size_t>(n + i)] = x0[static_cast<size_t>(i)];
  }
  for (int i = 0; i < n; ++i) out.t[static_cast<size_t>(n - i - 1)] = p[static_cast<size_t>(i)];
  for (int a = 0; a <= 2 * n; ++a) fixed[t_var(a)] = out.t[static_cast<size_t>(a)];

  std::vector<Expr> eqs;
  std::vector<std::string> unknowns;
  for (int i = 0; i < n; ++i) {
    unknowns.push_back(hierarchy_var(1, i));
    eqs.push_back(h.theta.diff(hierarchy_var(1, i)).substitute(sub) - Expr::var(t_var(n - i - 1)));
  }
  out.x1 = newton_solve(eqs, unknowns, fixed, seeds, opts);

  auto space = JetSpace::make_total(t_vars(n), 2);
  auto xj = implicit_jets(eqs, unknowns, space, fixed, out.x1, opts.degenerate);
  auto bind = coordinate_jets(space, fixed);
  for (int i = 0; i < n; ++i) bind.insert_or_assign(unknowns[static_cast<size_t>(i)], xj[static_cast<size_t>(i)]);
  Jet F = -jet_of(h.theta.substitute(sub), bind, space, fixed);
  for (int i = 0; i < n; ++i) F += bind.at(t_var(n - i - 1)) * xj[static_cast<size_t>(i)];
  out.F = F.value();
  for (int a = 0; a <= 2 * n; ++a) out.gradient.push_back(F.d(static_cast<size_t>(a)));
  out.wave_residual = wave_max_from_jet(F, n);
  return out;
}

// ------------------------------------------------------------ leaves

const std::vector<std::string>& leaf_vars() {
  static const std::vector<std::string> v{"x00", "x01", "x10", "x11"};
  return v;
}

MetricSample leaf_metric(const HierarchyPotential& h, const std::map<std::string, cplx>& point) {
  auto space = JetSpace::make_total(leaf_vars(), 2);
  Jet t = jet_at(h.theta, space, point);
  return leaf_sample(t.d(0, 0), t.d(0, 2), t.d(2, 2), leaf_point(point));
}

Forms3 leaf_sd_forms(const HierarchyPotential& h, const std::map<std::string, cplx>& point) {
  return forms_from_frame(leaf_metric(h, point).tetrad);
}

MetricJetField leaf_metric_field(const HierarchyPotential& h, const std::map<std::string, cplx>& frozen) {
  return [h, frozen](const JetSpacePtr& space, const Vec4& point) {
    std::unordered_map<std::string, Jet> b;
    const auto& names = leaf_vars();
    for (size_t v = 0; v < 4; ++v) b.emplace(names[v], Jet::variable(space, v, point[v]));
    Jet t = jet_of(h.theta, b, space, frozen);
    Jet t0 = t.derivative(0);
    Jet zero(space, 0.0);
    Jet one(space, 1.0);
    auto g = leaf_metric_matrix<Jet>(t0.derivative(0), t0.derivative(2), t.derivative(2).derivative(2), zero, one);
    return g;
  };
}

ImplicitLeaf leaf_from_f(const HierarchyF& hf, const std::map<std::string, cplx>& point,
                         const std::vector<cplx>& seeds, const NewtonOptions& opts) {
  LeafNames ln = leaf_names(hf.n, leaf_vars());
  auto space = JetSpace::make_total(leaf_vars(), 2);
  auto it = implicit_theta(hf, ln, space, point, seeds, opts);
  ImplicitLeaf out;
  out.theta = it.theta.value();
  out.p = it.p;
  out.th_00_00 = it.theta.d(0, 0);
  out.th_00_10 = it.theta.d(0, 2);
  out.th_10_10 = it.theta.d(2, 2);
  out.sample = leaf_sample(out.th_00_00, out.th_00_10, out.th_10_10, leaf_point(point));
  out.sd = forms_from_frame(out.sample.tetrad);
  return out;
}

MetricJetField leaf_metric_field_from_f(const HierarchyF& hf, const std::map<std::string, cplx>& point,
                                        const std::vector<cplx>& seeds, const NewtonOptions& opts) {
  return [hf, point, seeds, opts](const JetSpacePtr& space, const Vec4& at) {
    LeafNames ln = leaf_names(hf.n, space->vars());
    std::map<std::string, cplx> fixed = point;
    for (size_t v = 0; v < 4; ++v) fixed[space->vars()[v]] = at[v];
    auto it = implicit_theta(hf, ln, space, fixed, seeds, opts);
    Jet t0 = it.theta.derivative(0);
    Jet zero(space, 0.0);
    Jet one(space, 1.0);
    return leaf_metric_matrix<Jet>(t0.derivative(0), t0.derivative(2), it.theta.derivative(2).derivative(2), zero,
                                   one);
  };
}

// ------------------------------------------------------------ n = 2

N2SecondDerivatives n2_second_derivatives(const HierarchyF& hf, const std::map<std::string, cplx>& point) {
  if (hf.n != 2) throw Error(ErrorKind::InvalidArgument, "closed n = 2 formulas need n = 2");
  auto space = JetSpace::make_total(t_vars(2), 2);
  Jet f = jet_at(hf.F, space, point);
  auto F = [&](size_t a, size_t b) { return f.d(a, b); };
  N2SecondDerivatives out;
  out.M = F(0, 1) * F(0, 1) - F(0, 0) * F(1, 1);
  if (out.M == cplx(0.0)) throw Error(ErrorKind::DegenerateM, "M = F01^2 - F00 F11 vanishes");
  out.th_xx = -F(0, 0) / out.M;
  out.th_xy = (-F(0, 1) * F(0, 2) + F(0, 0) * F(1, 2)) / out.M;
  out.th_yy = -F(2, 2) - (F(0, 0) * F(1, 2) * F(1, 2) - 2.0 * F(0, 1) * F(1, 2) * F(0, 2) +
                          F(1, 1) * F(0, 2) * F(0, 2)) /
                             out.M;
  return out;
}

MetricSample n2_metric(const HierarchyF& hf, const std::map<std::string, cplx>& point, double surface_tolerance) {
  if (hf.n != 2) throw Error(ErrorKind::InvalidArgument, "closed n = 2 metric needs n = 2");
  auto space = JetSpace::make_total(t_vars(2), 2);
  Jet f = jet_at(hf.F, space, point);
  if (std::abs(f.d(4)) > surface_tolerance)
    throw Error(ErrorKind::OffSurface, "point is off the surface F_4 = 0 (|F_4| = " + std::to_string(std::abs(f.d(4))) + ")");
  const cplx F00 = f.d(0, 0), F01 = f.d(0, 1), F11 = f.d(1, 1), F03 = f.d(0, 3);
  const cplx M = F01 * F01 - F00 * F11;
  if (M == cplx(0.0)) throw Error(ErrorKind::DegenerateM, "M = F01^2 - F00 F11 vanishes");
  const cplx N = F01 * F01 + F00 * F11;

  MetricSample s;
  s.point = {point.at("t0"), point.at("t1"), point.at("t2"), point.at("t3")};
  Mat4& g = s.g;
  auto sym = [&](size_t a, size_t b, cplx c) {
    if (a == b) {
      g[a][a] += c / M;
    } else {
      g[a][b] += c / (2.0 * M);
      g[b][a] += c / (2.0 * M);
    }
  };
  sym(1, 2, F01 * N);
  sym(0, 2, F00 * N);
  sym(2, 2, F11 * F01 * F01);
  sym(3, 3, F11 * F11 * F11);
  sym(2, 3, 2.0 * F01 * F11 * F11);
  sym(0, 1, 2.0 * F01 * F00 * F00);
  sym(0, 0, F00 * F00 * F00);
  sym(1, 1, F00 * F01 * F01);
  sym(1, 3, F11 * N + F01 * F00 * F03);
  sym(0, 3, 3.0 * F01 * F00 * F11 - F01 * F01 * F01 + F00 * F00 * F03);
  return s;
}

}  // namespace hforge
