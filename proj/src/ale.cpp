#include "hforge/ale.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hforge/contour.hpp"
#include "hforge/errors.hpp"

namespace hforge {

namespace {

const std::string kLambda = "lambda";

Expr X() { return Expr::var("x"); }
Expr Y() { return Expr::var("y"); }
Expr Z() { return Expr::var("z"); }

void check_k(ALEKind kind, int k) {
  if (kind == ALEKind::A && k < 1) throw Error(ErrorKind::InvalidArgument, "A family needs k >= 1");
  if (kind == ALEKind::D && k < 3) throw Error(ErrorKind::InvalidArgument, "D family needs k >= 3");
}

cplx eval_lambda(const Expr& e, cplx lambda) { return e.evaluate({{kLambda, lambda}}); }

bool on_cut(cplx a) { return a.real() < 0.0 && std::abs(a.imag()) <= 1e-14 * std::abs(a); }

// Roots of a polynomial with coefficients highest first.
std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1 || c[0] == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "root finding needs a leading coefficient");
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -c[static_cast<size_t>(j + 1)] / c[0];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cplx> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return out;
}

cplx poly_eval(const std::vector<cplx>& c, cplx y) {
  cplx acc = 0.0;
  for (cplx a : c) acc = acc * y + a;
  return acc;
}

// R / (y - root), dropping the remainder.
std::vector<cplx> deflate(const std::vector<cplx>& c, cplx root) {
  std::vector<cplx> q;
  cplx acc = 0.0;
  for (size_t i = 0; i + 1 < c.size(); ++i) {
    acc = acc * root + c[i];
    q.push_back(acc);
  }
  return q;
}

cplx pick_root(const std::vector<cplx>& roots, const std::optional<cplx>& hint, const char* what) {
  if (!hint)
    throw Error(ErrorKind::LimitAmbiguous, std::string(what) + " has several roots; supply a hint");
  std::vector<std::pair<double, cplx>> d;
  for (cplx r : roots) d.emplace_back(std::abs(r - *hint), r);
  std::sort(d.begin(), d.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (d.size() > 1 && d[1].first - d[0].first <= 1e-9 * (1.0 + d[0].first))
    throw Error(ErrorKind::LimitAmbiguous, std::string(what) + ": two roots are equally close to the hint");
  return d[0].second;
}

Expr sum_a(const ALEFamily& f, std::initializer_list<std::pair<int, Expr>> terms) {
  Expr s(0.0);
  for (const auto& [i, m] : terms) s = s + f.a[static_cast<size_t>(i - 1)] * m;
  return s;
}

}  // namespace

ALEKind parse_ale_kind(const std::string& name) {
  if (name == "A") return ALEKind::A;
  if (name == "D") return ALEKind::D;
  if (name == "E6") return ALEKind::E6;
  if (name == "E7") return ALEKind::E7;
  if (name == "E8") return ALEKind::E8;
  throw Error(ErrorKind::InvalidArgument, "unknown ALE family '" + name + "' (expected A, D, E6, E7, E8)");
}

std::string ale_kind_name(ALEKind kind) {
  switch (kind) {
    case ALEKind::A: return "A";
    case ALEKind::D: return "D";
    case ALEKind::E6: return "E6";
    case ALEKind::E7: return "E7";
    case ALEKind::E8: return "E8";
  }
  return "?";
}

ALEDegrees ale_degrees(ALEKind kind, int k) {
  check_k(kind, k);
  switch (kind) {
    case ALEKind::A: return {k, k, 2, 2 * k};
    case ALEKind::D: return {2 * k, 2 * k - 2, 4, 4 * k};
    case ALEKind::E6: return {12, 8, 6, 24};
    case ALEKind::E7: return {18, 12, 8, 36};
    case ALEKind::E8: return {30, 20, 12, 60};
  }
  return {};
}

int parameter_count(ALEKind kind, int k) { return static_cast<int>(parameter_degrees(kind, k).size()); }

std::vector<int> parameter_degrees(ALEKind kind, int k) {
  check_k(kind, k);
  std::vector<int> d;
  switch (kind) {
    case ALEKind::A:
      // a_i multiplies z^{k-1-i}
      for (int i = 1; i <= k - 1; ++i) d.push_back(2 * i + 2);
      break;
    case ALEKind::D:
      d = {4, 2 * k + 2};
      for (int m = 0; m <= k - 2; ++m) d.push_back(8 + 4 * m);
      break;
    case ALEKind::E6: d = {4, 10, 16, 12, 18, 24}; break;
    case ALEKind::E7: d = {4, 12, 16, 24, 20, 28, 36}; break;
    case ALEKind::E8: d = {4, 16, 28, 40, 24, 36, 48, 60}; break;
  }
  return d;
}

std::optional<int> lambda_degree(const Expr& e, const std::string& var, double tol) {
  constexpr int N = 128;
  std::vector<cplx> v(N);
  for (int j = 0; j < N; ++j) v[static_cast<size_t>(j)] = e.evaluate({{var, std::polar(1.0, 2.0 * std::numbers::pi * j / N)}});
  std::vector<double> mag(N);
  double top = 1.0;
  for (int m = 0; m < N; ++m) {
    cplx c = 0.0;
    for (int j = 0; j < N; ++j) c += v[static_cast<size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * j * m / N);
    mag[static_cast<size_t>(m)] = std::abs(c) / N;
    top = std::max(top, mag[static_cast<size_t>(m)]);
  }
  for (int m = N / 2; m < N; ++m)
    if (mag[static_cast<size_t>(m)] > tol * top) return std::nullopt;
  int deg = 0;
  for (int m = 0; m < N / 2; ++m)
    if (mag[static_cast<size_t>(m)] > tol * top) deg = m;
  return deg;
}

ALEFamily make_ale_family(ALEKind kind, int k, std::vector<Expr> a) {
  ALEFamily f;
  f.kind = kind;
  f.k = k;
  f.degrees = ale_degrees(kind, k);
  f.a_degrees = parameter_degrees(kind, k);
  if (a.empty()) a.assign(f.a_degrees.size(), Expr(0.0));
  if (a.size() != f.a_degrees.size())
    throw Error(ErrorKind::DegreeMismatch, ale_kind_name(kind) + " needs " + std::to_string(f.a_degrees.size()) +
                                               " parameters a_i, got " + std::to_string(a.size()));
  for (size_t i = 0; i < a.size(); ++i) {
    for (const auto& v : a[i].variables())
      if (v != kLambda) throw Error(ErrorKind::DegreeMismatch, "a_" + std::to_string(i + 1) + " depends on " + v);
    auto d = lambda_degree(a[i]);
    if (!d || *d > f.a_degrees[i])
      throw Error(ErrorKind::DegreeMismatch, "a_" + std::to_string(i + 1) + " must be a polynomial in lambda of degree <= " +
                                                 std::to_string(f.a_degrees[i]));
  }
  f.a = std::move(a);
  return f;
}

Expr relation_polynomial(const ALEFamily& f) {
  const Expr x = X(), y = Y(), z = Z();
  switch (f.kind) {
    case ALEKind::A: {
      Expr r = x * y - pow(z, f.k);
      for (int i = 1; i <= f.k - 1; ++i) r = r - f.a[static_cast<size_t>(i - 1)] * pow(z, f.k - 1 - i);
      return r;
    }
    case ALEKind::D: {
      Expr r = pow(x, 2) + pow(y, 2) * z + pow(z, f.k) + f.a[0] * pow(y, 2) + f.a[1] * y;
      for (int m = 0; m <= f.k - 2; ++m) r = r + f.a[static_cast<size_t>(2 + m)] * pow(z, f.k - 2 - m);
      return r;
    }
    case ALEKind::E6:
      return pow(x, 2) + pow(y, 3) + pow(z, 4) + y * sum_a(f, {{1, pow(z, 2)}, {2, z}, {3, 1}}) +
             sum_a(f, {{4, pow(z, 2)}, {5, z}, {6, 1}});
    case ALEKind::E7:
      return pow(x, 2) + pow(y, 3) + y * pow(z, 3) + pow(y, 2) * sum_a(f, {{1, z}, {2, 1}}) +
             y * sum_a(f, {{3, z}, {4, 1}}) + sum_a(f, {{5, pow(z, 2)}, {6, z}, {7, 1}});
    case ALEKind::E8:
      return pow(x, 2) + pow(y, 3) + pow(z, 5) + y * sum_a(f, {{1, pow(z, 3)}, {2, pow(z, 2)}, {3, z}, {4, 1}}) +
             sum_a(f, {{5, pow(z, 3)}, {6, pow(z, 2)}, {7, z}, {8, 1}});
  }
  return Expr(0.0);
}

cplx relation_eval(const ALEFamily& fam, cplx x, cplx y, cplx z, cplx lambda) {
  return relation_polynomial(fam).evaluate({{"x", x}, {"y", y}, {"z", z}, {kLambda, lambda}});
}

// ---------------------------------------------------------------- A series

Expr ak_f_expr(const std::vector<Expr>& roots) {
  Expr f(0.0);
  for (const auto& p : roots) f = f + ln(Z() - p);
  return f;
}

Expr ak_g_expr(const std::vector<Expr>& roots) {
  Expr g(0.0);
  for (const auto& p : roots) g = g + (Z() - p) * (ln(Z() - p) - Expr(1.0));
  return g;
}

PatchValue ak_patching(const std::vector<Expr>& roots, cplx z, cplx lambda) {
  if (roots.empty()) throw Error(ErrorKind::InvalidArgument, "A patching needs at least one root");
  PatchValue out{0.0, 0.0};
  for (const auto& p : roots) {
    cplx d = z - eval_lambda(p, lambda);
    if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(z)))
      throw Error(ErrorKind::BranchPoint, "z coincides with a root p_j(lambda)");
    cplx l = std::log(d);
    out.f += l;
    out.G += d * (l - 1.0);
  }
  return out;
}

double ak_roots_mismatch(const ALEFamily& fam, const std::vector<Expr>& roots, cplx lambda) {
  if (fam.kind != ALEKind::A) throw Error(ErrorKind::InvalidArgument, "root data applies to the A family");
  if (static_cast<int>(roots.size()) != fam.k)
    throw Error(ErrorKind::DegreeMismatch, "A family with k = " + std::to_string(fam.k) + " needs k roots");
  // prod (z - p_j), coefficients highest first
  std::vector<cplx> c{1.0};
  for (const auto& p : roots) {
    cplx r = eval_lambda(p, lambda);
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= r * c[i];
    }
    c = next;
  }
  double worst = std::abs(c[1]);
  for (int i = 1; i <= fam.k - 1; ++i)
    worst = std::max(worst, std::abs(c[static_cast<size_t>(i + 1)] - eval_lambda(fam.a[static_cast<size_t>(i - 1)], lambda)));
  return worst;
}

cplx ak_patch_integral(const std::vector<Expr>& roots, cplx z, cplx lambda, int nodes, double orientation) {
  cplx P = 1.0;
  for (const auto& p : roots) P *= z - eval_lambda(p, lambda);
  if (P == cplx(0.0)) throw Error(ErrorKind::BranchPoint, "z coincides with a root p_j(lambda)");
  // x = P/y on the surface; F_x = y = 1 at the top, F_y = x = 1 gives y = P
  const cplx lo = P, hi = 1.0;
  cplx acc = 0.0;
  for (const auto& [t, w] : gauss_legendre(nodes)) {
    cplx y = lo + 0.5 * (t + 1.0) * (hi - lo);
    acc += 0.5 * w * (hi - lo) / y;
  }
  return orientation * acc;
}

TwistorClass ak_f_class(const std::vector<Expr>& roots) {
  Expr f(0.0);
  for (const auto& p : roots) f = f + ln(Expr::var("Q") - p);
  return {2, f, 0, {}, {}};
}

cplx ak_gh_potential(const std::vector<Expr>& roots, cplx p, cplx y, cplx w) {
  const auto t = gh_section(w, y, p);
  cplx psi = 0.0;
  for (const auto& r : roots) psi += psi_field(ak_f_class({r}), t, {});
  return psi;
}

// ---------------------------------------------------------------- D series

namespace {

cplx d_product(const std::vector<Expr>& roots, cplx z, cplx lambda) {
  if (roots.empty()) throw Error(ErrorKind::InvalidArgument, "D patching needs at least one root");
  if (z == cplx(0.0)) throw Error(ErrorKind::BranchPoint, "D patching is singular at z = 0");
  cplx P = 1.0;
  for (const auto& q : roots) P *= z - eval_lambda(q, lambda);
  if (std::abs(P) <= 1e-14 * std::max(1.0, std::pow(std::abs(z), static_cast<double>(roots.size()))))
    throw Error(ErrorKind::BranchPoint, "prod (z - q_j) vanishes; the denominator is zero");
  return P;
}

}  // namespace

cplx dk_patching(const std::vector<Expr>& roots, cplx z, cplx lambda) {
  const cplx P = d_product(roots, z, lambda);
  const cplx a1 = z - 4.0 * z * P, a2 = 1.0 + 4.0 * z * P;
  for (cplx a : {z, a1, a2})
    if (on_cut(a)) throw Error(ErrorKind::BranchPoint, "a square-root argument lies on the negative real axis");
  const cplx num = std::sqrt(a1) + std::sqrt(z), den = std::sqrt(a2) - 1.0;
  if (num == cplx(0.0) || den == cplx(0.0)) throw Error(ErrorKind::BranchPoint, "logarithm argument is 0 or infinite");
  const cplx arg = num / den;
  if (on_cut(arg)) throw Error(ErrorKind::BranchPoint, "logarithm argument lies on the negative real axis");
  return std::log(arg) / std::sqrt(z);
}

cplx dk_patch_integral(const std::vector<Expr>& roots, cplx z, cplx lambda, int nodes) {
  const cplx P = d_product(roots, z, lambda);
  // F = x^2 - y^2 z - P: F_x = 2x = 1 at the top, F_y = -2yz = 1 at the bottom
  const cplx hi = std::sqrt(z - 4.0 * z * P) / (2.0 * z), lo = -1.0 / (2.0 * z);
  auto rule = gauss_legendre(nodes);
  // walk from the top, where x = 1/2, continuing x
  cplx prev = 0.5, acc = 0.0;
  for (auto it = rule.rbegin(); it != rule.rend(); ++it) {
    const auto [t, w] = *it;
    cplx y = lo + 0.5 * (t + 1.0) * (hi - lo);
    cplx x = std::sqrt(y * y * z + P);
    if (std::abs(x + prev) < std::abs(x - prev)) x = -x;
    prev = x;
    acc += 0.5 * w * (hi - lo) / (2.0 * x);
  }
  return acc;
}

// ---------------------------------------------------------------- E series

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre needs at least one node");
  std::vector<std::pair<double, double>> out(static_cast<size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out[static_cast<size_t>(i)] = {-x, w};
    out[static_cast<size_t>(n - 1 - i)] = {x, w};
  }
  return out;
}

cplx sqrt_poly_integral(const std::vector<cplx>& coeffs, cplx a, cplx b, int nodes) {
  if (coeffs.size() < 2) throw Error(ErrorKind::InvalidArgument, "radicand must have degree >= 1");
  auto vanishes = [&](cplx y) {
    double scale = 0.0, p = 1.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it, p *= std::abs(y)) scale += std::abs(*it) * p;
    return std::abs(poly_eval(coeffs, y)) <= 1e-12 * std::max(scale, 1.0);
  };
  struct Piece {
    cplx c, d;
    int singular;  // 0 none, 1 at c, 2 at d
  };
  std::vector<Piece> pieces;
  const bool sa = vanishes(a), sb = vanishes(b);
  if (sa && sb) {
    cplx m = 0.5 * (a + b);
    pieces = {{a, m, 1}, {m, b, 2}};
  } else {
    pieces = {{a, b, sa ? 1 : (sb ? 2 : 0)}};
  }
  const auto rule = gauss_legendre(nodes);
  std::optional<cplx> prev;
  cplx acc = 0.0;
  for (const auto& pc : pieces) {
    const cplx len = pc.d - pc.c;
    const cplx s = std::sqrt(len);
    const std::vector<cplx> defl =
        pc.singular == 0 ? coeffs : deflate(coeffs, pc.singular == 1 ? pc.c : pc.d);
    // traversal order from c to d
    std::vector<std::pair<double, double>> ts;
    for (const auto& [x, w] : rule) ts.emplace_back(0.5 * (x + 1.0), 0.5 * w);
    if (pc.singular == 2) std::reverse(ts.begin(), ts.end());
    for (const auto& [t, w] : ts) {
      cplx y, dy, root;
      if (pc.singular == 0) {
        y = pc.c + t * len;
        dy = len;
        root = std::sqrt(poly_eval(coeffs, y));
      } else if (pc.singular == 1) {
        y = pc.c + t * t * len;
        dy = 2.0 * t * len;
        root = t * s * std::sqrt(poly_eval(defl, y));
      } else {
        y = pc.d - t * t * len;
        dy = 2.0 * t * len;  // orientation absorbed by traversing t downward
        root = t * s * std::sqrt(-poly_eval(defl, y));
      }
      if (!prev) {
        cplx principal = std::sqrt(poly_eval(coeffs, y));
        if (std::abs(root + principal) < std::abs(root - principal)) root = -root;
      } else if (std::abs(root + *prev) < std::abs(root - *prev)) {
        root = -root;
      }
      prev = root;
      if (root == cplx(0.0)) throw Error(ErrorKind::DegenerateElliptic, "radicand vanishes inside the path");
      acc += w * dy / root;
    }
  }
  return acc;
}

std::pair<Expr, Expr> weierstrass_form(const ALEFamily& f) {
  const Expr z = Z();
  Expr c2(0.0), c1, c0;
  switch (f.kind) {
    case ALEKind::E6:
      c1 = sum_a(f, {{1, pow(z, 2)}, {2, z}, {3, 1}});
      c0 = pow(z, 4) + sum_a(f, {{4, pow(z, 2)}, {5, z}, {6, 1}});
      break;
    case ALEKind::E7:
      c2 = sum_a(f, {{1, z}, {2, 1}});
      c1 = pow(z, 3) + sum_a(f, {{3, z}, {4, 1}});
      c0 = sum_a(f, {{5, pow(z, 2)}, {6, z}, {7, 1}});
      break;
    case ALEKind::E8:
      c1 = sum_a(f, {{1, pow(z, 3)}, {2, pow(z, 2)}, {3, z}, {4, 1}});
      c0 = pow(z, 5) + sum_a(f, {{5, pow(z, 3)}, {6, pow(z, 2)}, {7, z}, {8, 1}});
      break;
    default:
      throw Error(ErrorKind::InvalidArgument, "Weierstrass form applies to E6, E7, E8");
  }
  // x^2 = -(y^3 + c2 y^2 + c1 y + c0); y = eta - c2/3 removes y^2, eta = -4^{1/3} Y
  const Expr P = c1 - c2 * c2 / Expr(3.0);
  const Expr R = c0 - c1 * c2 / Expr(3.0) + Expr(2.0 / 27.0) * pow(c2, 3);
  return {Expr(std::cbrt(4.0)) * P, -R};
}

EllipticPatch ek_patching(cplx g1, cplx g2, const EllipticOptions& opts) {
  const double scale = std::max({std::pow(std::abs(g1), 3), 27.0 * std::norm(g2), 1e-300});
  const cplx disc = -g1 * g1 * g1 - 27.0 * g2 * g2;
  if (std::abs(disc) <= 1e-12 * scale)
    throw Error(ErrorKind::DegenerateElliptic, "4y^3 + g1 y + g2 has a repeated root");
  EllipticPatch out;
  out.y1 = pick_root(poly_roots({4.0, 0.0, g1, g2 - 0.25}), opts.y1_hint, "4y^3 + g1 y + g2 = 1/4");
  out.y0 = pick_root(poly_roots({12.0, 0.0, g1 - 1.0}), opts.y0_hint, "12y^2 + g1 = 1");
  out.f = 0.5 * sqrt_poly_integral({4.0, 0.0, g1, g2}, out.y0, out.y1, opts.nodes);
  return out;
}

EllipticPatch ek_patching(const ALEFamily& fam, cplx z, cplx lambda, const EllipticOptions& opts) {
  auto [g1, g2] = weierstrass_form(fam);
  const std::map<std::string, cplx> pt{{"z", z}, {kLambda, lambda}};
  return ek_patching(g1.evaluate(pt), g2.evaluate(pt), opts);
}

}  // namespace hforge
