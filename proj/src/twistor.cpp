#include "hforge/twistor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "hforge/errors.hpp"

namespace hforge {

namespace {

const std::string kQ = "Q";
const std::string kLambda = "lambda";

int count_primed_zero(const std::vector<int>& indices, size_t expected, const char* what) {
  if (indices.size() != expected)
    throw Error(ErrorKind::IndexRange, std::string(what) + " takes exactly " + std::to_string(expected) +
                                           " spinor indices, got " + std::to_string(indices.size()));
  int m = 0;
  for (int a : indices) {
    if (a != 0 && a != 1) throw Error(ErrorKind::IndexRange, "spinor index must be 0 or 1");
    if (a == 0) ++m;
  }
  return m;
}

void check_section(const TwistorClass& c, const std::vector<cplx>& t) {
  validate(c);
  if (t.size() != static_cast<size_t>(c.k + 1))
    throw Error(ErrorKind::InvalidArgument, "a section of O(" + std::to_string(c.k) + ") needs " +
                                                std::to_string(c.k + 1) + " coordinates");
}

void require_f(const TwistorClass& f) {
  if (f.weight != 2 - f.k)
    throw Error(ErrorKind::WeightMismatch, "expected an f class of weight " + std::to_string(2 - f.k) + ", got " +
                                               std::to_string(f.weight));
}

void require_g(const TwistorClass& G) {
  if (G.weight != 0)
    throw Error(ErrorKind::WeightMismatch, "expected a G class of weight 0, got " + std::to_string(G.weight));
}

std::map<std::string, cplx> at_node(const TwistorClass& c, cplx q, cplx lambda) {
  auto p = c.constants;
  p[kQ] = q;
  p[kLambda] = lambda;
  return p;
}

// (1/2 pi i) oint e(Q(z), z) kernel(z) dz
cplx integrate(const TwistorClass& c, const Expr& e, const std::vector<cplx>& t,
               const std::function<cplx(cplx)>& kernel, const ContourSpec& contour) {
  return contour_sum<cplx>(
      [&](cplx z) { return e.evaluate(at_node(c, section_value(t, z), z)) * kernel(z); }, contour, cplx(0.0));
}

Jet integrate_jet(const TwistorClass& c, const Expr& e, const JetSpacePtr& space, const std::vector<cplx>& t,
                  const std::function<cplx(cplx)>& kernel) {
  if (space->nvars() != t.size())
    throw Error(ErrorKind::InvalidArgument, "jet space must have one variable per section coordinate");
  std::vector<Jet> coord;
  for (size_t a = 0; a < t.size(); ++a) coord.push_back(Jet::variable(space, a, t[a]));
  const int k = c.k;
  return contour_sum<Jet>(
      [&](cplx z) {
        Jet q(space, 0.0);
        for (int a = 0; a <= k; ++a) q += coord[static_cast<size_t>(a)] * std::pow(z, k - a);
        std::unordered_map<std::string, Jet> b{{kQ, q}};
        auto consts = c.constants;
        consts[kLambda] = z;
        return jet_of(e, b, space, consts) * kernel(z);
      },
      c.contour, Jet(space, 0.0));
}

double max_abs(const Matrix<cplx>& m) {
  double r = 0.0;
  for (const auto& row : m)
    for (cplx v : row) r = std::max(r, std::abs(v));
  return r;
}

}  // namespace

void validate(const TwistorClass& c) {
  if (c.k < 1) throw Error(ErrorKind::InvalidArgument, "O(k) needs k >= 1");
  if (c.weight != 0 && c.weight != 2 - c.k)
    throw Error(ErrorKind::WeightMismatch, "weight " + std::to_string(c.weight) + " is neither 0 nor 2 - k = " +
                                               std::to_string(2 - c.k));
}

std::vector<std::string> section_vars(int k) {
  std::vector<std::string> v;
  for (int a = 0; a <= k; ++a) v.push_back("t" + std::to_string(a));
  return v;
}

JetSpacePtr section_space(int k, int degree) { return JetSpace::make_total(section_vars(k), degree); }

cplx section_value(const std::vector<cplx>& t, cplx lambda) {
  // Horner from the lambda^k coefficient t^0
  cplx q = 0.0;
  for (cplx c : t) q = q * lambda + c;
  return q;
}

cplx split_g(const TwistorClass& G, const std::vector<cplx>& t, cplx lambda) {
  if (!(std::abs(lambda - G.contour.center) < G.contour.radius))
    throw Error(ErrorKind::InvalidArgument, "lambda must lie inside the contour");
  return split_g(G, t, lambda, G.contour);
}

cplx split_g(const TwistorClass& G, const std::vector<cplx>& t, cplx lambda, const ContourSpec& contour) {
  check_section(G, t);
  return integrate(G, G.representative, t, [lambda](cplx z) { return 1.0 / (z - lambda); }, contour);
}

cplx f_from_g_class(const TwistorClass& G, const std::vector<cplx>& t) {
  check_section(G, t);
  require_g(G);
  return integrate(G, G.representative, t, [](cplx z) { return 1.0 / (z * z); }, G.contour);
}

Jet f_from_g_jet(const TwistorClass& G, const JetSpacePtr& space, const std::vector<cplx>& t) {
  check_section(G, t);
  require_g(G);
  return integrate_jet(G, G.representative, space, t, [](cplx z) { return 1.0 / (z * z); });
}

cplx psi_field(const TwistorClass& f, const std::vector<cplx>& t, const std::vector<int>& indices) {
  check_section(f, t);
  require_f(f);
  if (f.k < 2) throw Error(ErrorKind::InvalidArgument, "the psi field needs k >= 2");
  const int m = count_primed_zero(indices, static_cast<size_t>(2 * f.k - 4), "psi field");
  return integrate(f, f.representative.diff(kQ), t, [m](cplx z) { return std::pow(z, m); }, f.contour);
}

Jet psi_field_jet(const TwistorClass& f, const JetSpacePtr& space, const std::vector<cplx>& t,
                  const std::vector<int>& indices) {
  check_section(f, t);
  require_f(f);
  if (f.k < 2) throw Error(ErrorKind::InvalidArgument, "the psi field needs k >= 2");
  const int m = count_primed_zero(indices, static_cast<size_t>(2 * f.k - 4), "psi field");
  return integrate_jet(f, f.representative.diff(kQ), space, t, [m](cplx z) { return std::pow(z, m); });
}

cplx constraint_field(const TwistorClass& f, const std::vector<cplx>& t, const std::vector<int>& indices) {
  check_section(f, t);
  require_f(f);
  if (f.k < 4) throw Error(ErrorKind::IndexRange, "constraint fields exist only for k >= 4");
  const int m = count_primed_zero(indices, static_cast<size_t>(f.k - 4), "constraint field");
  return integrate(f, f.representative, t, [m](cplx z) { return std::pow(z, m); }, f.contour);
}

std::vector<cplx> constraint_fields(const TwistorClass& f, const std::vector<cplx>& t) {
  std::vector<cplx> out;
  if (f.k < 4) {
    check_section(f, t);
    return out;
  }
  for (int m = 0; m <= f.k - 4; ++m) {
    std::vector<int> idx(static_cast<size_t>(f.k - 4), 1);
    std::fill(idx.begin(), idx.begin() + m, 0);
    out.push_back(constraint_field(f, t, idx));
  }
  return out;
}

Matrix<cplx> sigma_from_psi(const TwistorClass& f, const std::vector<cplx>& t, cplx lambda,
                            double constraint_tolerance) {
  check_section(f, t);
  require_f(f);
  const int k = f.k;
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "SD forms need k >= 2");
  if (!(std::abs(lambda - f.contour.center) < f.contour.radius))
    throw Error(ErrorKind::InvalidArgument, "lambda must lie inside the contour");
  if (k > 3 && lambda == cplx(0.0))
    throw Error(ErrorKind::InvalidArgument, "lambda = 0 is singular in the affine gauge for k > 3");
  for (cplx c : constraint_fields(f, t))
    if (std::abs(c) > constraint_tolerance)
      throw Error(ErrorKind::OffConstraint,
                  "section is off the constraint surface (|constraint| = " + std::to_string(std::abs(c)) + ")");

  const size_t n = static_cast<size_t>(k + 1) + (k == 2 ? 1 : 0);
  std::vector<cplx> dq(n, 0.0), dzeta(n, 0.0);
  const Expr fq = f.representative.diff(kQ);
  const cplx pre = std::pow(lambda, 3 - k);
  double split_size = 0.0;
  for (int b = 0; b <= k; ++b) {
    dq[static_cast<size_t>(b)] = std::pow(lambda, k - b);
    const int power = 2 * k - 3 - b;
    cplx v = integrate(f, fq, t, [&](cplx z) { return std::pow(z, power) / (z - lambda); }, f.contour);
    dzeta[static_cast<size_t>(b)] = pre * v;
    split_size = std::max(split_size, std::abs(v));
  }
  if (!(split_size > 1e-14))
    throw Error(ErrorKind::DegenerateSigma, "the splitting of f vanishes on this section; the forms are degenerate");
  if (k == 2) dzeta[3] = 1.0;

  Matrix<cplx> s = filled<cplx>(n, n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) s[i][j] = -(dq[i] * dzeta[j] - dq[j] * dzeta[i]);
  return s;
}

SigmaComponents sigma_components(const TwistorClass& f, const std::vector<cplx>& t, double constraint_tolerance) {
  const double r = 0.3 * f.contour.radius;
  const cplx l[4] = {f.contour.center + r, f.contour.center + cplx(0.0, r), f.contour.center - r,
                     f.contour.center + cplx(0.5 * r, 0.5 * r)};
  Matrix<cplx> v[4];
  for (int a = 0; a < 4; ++a) v[a] = sigma_from_psi(f, t, l[a], constraint_tolerance);
  const size_t n = v[0].size();
  // Lagrange basis through the first three nodes
  auto basis = [&](int a, cplx x) {
    cplx num = 1.0, den = 1.0;
    for (int b = 0; b < 3; ++b)
      if (b != a) {
        num *= x - l[b];
        den *= l[a] - l[b];
      }
    return num / den;
  };
  // coefficients of lambda^2, lambda^1, lambda^0 of each basis polynomial
  cplx coef[3][3];
  for (int a = 0; a < 3; ++a) {
    const cplx u = l[(a + 1) % 3], w = l[(a + 2) % 3];
    const cplx den = (l[a] - u) * (l[a] - w);
    coef[a][0] = 1.0 / den;
    coef[a][1] = -(u + w) / den;
    coef[a][2] = u * w / den;
  }
  SigmaComponents out;
  out.s00 = out.s01 = out.s11 = filled<cplx>(n, n, 0.0);
  double misfit = 0.0, scale = 1.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      cplx c2 = 0.0, c1 = 0.0, c0 = 0.0, at4 = 0.0;
      for (int a = 0; a < 3; ++a) {
        c2 += coef[a][0] * v[a][i][j];
        c1 += coef[a][1] * v[a][i][j];
        c0 += coef[a][2] * v[a][i][j];
        at4 += basis(a, l[3]) * v[a][i][j];
      }
      out.s00[i][j] = c2;
      out.s01[i][j] = 0.5 * c1;
      out.s11[i][j] = c0;
      misfit = std::max(misfit, std::abs(at4 - v[3][i][j]));
      scale = std::max(scale, std::abs(v[3][i][j]));
    }
  out.quadratic_residual = misfit / scale;
  if (n == 4) {
    Mat4 a{}, b{};
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) {
        a[i][j] = out.s00[i][j];
        b[i][j] = out.s11[i][j];
      }
    if (std::abs(wedge4(a, b)) < 1e-14 * std::max(1.0, max_abs(out.s00) * max_abs(out.s11)))
      throw Error(ErrorKind::DegenerateSigma, "S00 ^ S11 vanishes; the forms do not define a metric");
  }
  return out;
}

std::vector<cplx> gh_section(cplx w, cplx y, cplx p) { return {-p, y, w}; }

BridgeReport bridge_two_methods(const TwistorClass& G, const std::vector<cplx>& t) {
  check_section(G, t);
  require_g(G);
  const int k = G.k;
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "the bridge needs k >= 2");
  BridgeReport rep;
  rep.f = G;
  rep.f.weight = 2 - k;
  rep.f.representative = pow(Expr::var(kLambda), 2) * G.representative.diff(kQ);
  rep.gauge_note = "f = (pi.o)^2 dG/dQ with o = (0,1); in the affine gauge (pi.o)^2 = lambda^2";

  Jet F = f_from_g_jet(G, section_space(k, 2), t);
  for (int m = 0; m <= 2 * k - 4; ++m) {
    std::vector<int> idx(static_cast<size_t>(2 * k - 4), 1);
    std::fill(idx.begin(), idx.begin() + m, 0);
    rep.psi.push_back(psi_field(rep.f, t, idx));
    // psi_m pairs with F_ij, i + j = 2k - 4 - m
    const int s = 2 * k - 4 - m;
    const int i = std::min(k, s), j = s - i;
    rep.f_second.push_back(F.d(static_cast<size_t>(i), static_cast<size_t>(j)));
    rep.max_mismatch = std::max(rep.max_mismatch, std::abs(rep.psi.back() - rep.f_second.back()));
  }
  return rep;
}

}  // namespace hforge
