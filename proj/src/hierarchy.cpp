#include "hforge/hierarchy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "hforge/errors.hpp"
#include "hforge/jet.hpp"

namespace hforge {

namespace {

size_t slot(int n, int A, int i) { return static_cast<size_t>(A * (n + 1) + i); }

void check_index(const HierarchyPotential& h, int A, int i) {
  if (h.n < 1) throw Error(ErrorKind::IndexRange, "hierarchy level must be at least 1");
  if (A < 0 || A > 1 || i < 1 || i > h.n)
    throw Error(ErrorKind::IndexRange, "index (A=" + std::to_string(A) + ", i=" + std::to_string(i) +
                                           ") outside 1 <= i <= " + std::to_string(h.n));
}

// Theta jet over the hierarchy variables, plus bracket helpers.
struct LevelJets {
  int n;
  JetSpacePtr space;
  Jet theta;
  size_t y, x;  // slots of x00 and x10

  LevelJets(const HierarchyPotential& h, const std::map<std::string, cplx>& point)
      : n(h.n), space(JetSpace::make_total(hierarchy_vars(h.n), 2)) {
    theta = jet_at(h.theta, space, point);
    y = slot(n, 0, 0);
    x = slot(n, 1, 0);
  }
  // {d_a Th, d_b Th}
  cplx bracket_dd(size_t a, size_t b) const {
    return theta.d(a, x) * theta.d(b, y) - theta.d(a, y) * theta.d(b, x);
  }
};

// Pseudo-random complex sample points, reproducible from a seed.
std::vector<Vec4> sample_points(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec4> out(static_cast<size_t>(count));
  for (auto& p : out)
    for (auto& c : p) c = cplx(u(rng), 0.25 * u(rng));
  return out;
}

cplx snap(cplx c, double scale) {
  const double eps = 1e-12 * std::max(1.0, scale);
  double re = c.real(), im = c.imag();
  if (std::abs(re) < eps) re = 0.0;
  if (std::abs(im) < eps) im = 0.0;
  if (std::abs(re - std::round(re)) < eps) re = std::round(re);
  if (std::abs(im - std::round(im)) < eps) im = std::round(im);
  return {re, im};
}

}  // namespace

std::string hierarchy_var(int A, int i) { return "x" + std::to_string(A) + std::to_string(i); }

std::vector<std::string> hierarchy_vars(int n) {
  std::vector<std::string> v;
  for (int A = 0; A < 2; ++A)
    for (int i = 0; i <= n; ++i) v.push_back(hierarchy_var(A, i));
  return v;
}

BracketPair hierarchy_bracket() { return {"x00", "x10", -1}; }

HierarchyPotential hierarchy_from_plebanski(const Expr& theta) {
  Expr t = theta.substitute({{"y", Expr::var("x00")},
                             {"x", -Expr::var("x10")},
                             {"w", Expr::var("x01")},
                             {"z", Expr::var("x11")}});
  return {1, t};
}

Expr plebanski_from_hierarchy(const HierarchyPotential& h) {
  if (h.n != 1) throw Error(ErrorKind::InvalidArgument, "only level 1 maps to (w, z, x, y)");
  return h.theta.substitute({{"x00", Expr::var("y")},
                             {"x10", -Expr::var("x")},
                             {"x01", Expr::var("w")},
                             {"x11", Expr::var("z")}});
}

cplx wave_operator(const Expr& theta, const Expr& phi, const Vec4& point) {
  auto space = JetSpace::make_total(plebanski_vars(), 2);
  auto at = plebanski_point(point);
  Jet t = jet_at(theta, space, at);
  Jet f = jet_at(phi, space, at);
  return f.d(kX, kW) + f.d(kY, kZ) + t.d(kY, kY) * f.d(kX, kX) + t.d(kX, kX) * f.d(kY, kY) -
         2.0 * t.d(kX, kY) * f.d(kX, kY);
}

std::vector<Expr> monomials(const std::vector<std::string>& vars, int max_degree) {
  std::vector<Expr> out;
  std::vector<int> e(vars.size(), 0);
  // odometer over exponents, filtered by total degree
  while (true) {
    int deg = 0;
    for (int v : e) deg += v;
    if (deg <= max_degree) {
      Expr m(1.0);
      for (size_t k = 0; k < vars.size(); ++k)
        if (e[k] > 0) m = m * pow(Expr::var(vars[k]), e[k]);
      out.push_back(m);
    }
    size_t k = 0;
    while (k < e.size() && e[k] == max_degree) e[k++] = 0;
    if (k == e.size()) break;
    ++e[k];
  }
  std::stable_sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) {
    return a.to_string().size() < b.to_string().size();
  });
  return out;
}

Expr recursion_step(const Expr& theta, const Expr& delta, const std::vector<Expr>& ansatz,
                    const RecursionOptions& opts) {
  std::vector<Expr> kept;
  for (const auto& m : ansatz)
    if (m.depends_on("x") || m.depends_on("y")) kept.push_back(m);
  if (kept.empty()) throw Error(ErrorKind::AnsatzInsufficient, "ansatz has no monomial involving x or y");

  const int npts = opts.sample_points > 0 ? opts.sample_points : static_cast<int>(kept.size()) + 12;
  auto pts = sample_points(npts, opts.seed);
  auto space = JetSpace::make_total(plebanski_vars(), 2);

  std::vector<Expr> dy, dx;
  for (const auto& m : kept) {
    dy.push_back(m.diff("y"));
    dx.push_back(m.diff("x"));
  }

  Eigen::MatrixXcd a(2 * npts, static_cast<Eigen::Index>(kept.size()));
  Eigen::VectorXcd b(2 * npts);
  for (int p = 0; p < npts; ++p) {
    auto at = plebanski_point(pts[static_cast<size_t>(p)]);
    Jet t = jet_at(theta, space, at);
    Jet f = jet_at(delta, space, at);
    cplx terms[5] = {f.d(kX, kW), f.d(kY, kZ), t.d(kY, kY) * f.d(kX, kX), t.d(kX, kX) * f.d(kY, kY),
                     -2.0 * t.d(kX, kY) * f.d(kX, kY)};
    cplx box = 0.0;
    double scale = 1.0;
    for (cplx c : terms) {
      box += c;
      scale = std::max(scale, std::abs(c));
    }
    if (std::abs(box) > opts.tolerance * scale)
      throw Error(ErrorKind::NotLinearizedSolution,
                  "not a linearized solution: wave operator gives " + std::to_string(std::abs(box)) +
                      " at sample point " + std::to_string(p));
    b(2 * p) = f.d(kW) - t.d(kX, kY) * f.d(kY) + t.d(kY, kY) * f.d(kX);
    b(2 * p + 1) = f.d(kZ) + t.d(kX, kX) * f.d(kY) - t.d(kX, kY) * f.d(kX);
    for (size_t k = 0; k < kept.size(); ++k) {
      a(2 * p, static_cast<Eigen::Index>(k)) = dy[k].evaluate(at);
      a(2 * p + 1, static_cast<Eigen::Index>(k)) = -dx[k].evaluate(at);
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols())
    throw Error(ErrorKind::AnsatzInsufficient,
                "ansatz insufficient: " + std::to_string(a.cols() - qr.rank()) +
                    " monomials are linearly dependent on the sample points");
  Eigen::VectorXcd c = qr.solve(b);
  const double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
  const double resid = (a * c - b).cwiseAbs().maxCoeff();
  if (!(resid <= opts.tolerance * bscale))
    throw Error(ErrorKind::InconsistentSystem,
                "inconsistent system: least-squares residual " + std::to_string(resid) + " exceeds tolerance");

  Expr out(0.0);
  const double cscale = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  for (size_t k = 0; k < kept.size(); ++k) {
    cplx v = snap(c(static_cast<Eigen::Index>(k)), cscale);
    if (v != cplx(0.0)) out = out + Expr(v) * kept[k];
  }
  return out;
}

std::vector<Expr> recursion_chain(const Expr& theta, const Expr& start, const std::vector<Expr>& ansatz,
                                  int steps, const RecursionOptions& opts) {
  std::vector<Expr> chain{start};
  for (int s = 0; s < steps; ++s) chain.push_back(recursion_step(theta, chain.back(), ansatz, opts));
  return chain;
}

cplx hierarchy_residual(const HierarchyPotential& h, int A, int i, int B, int j,
                        const std::map<std::string, cplx>& point) {
  check_index(h, A, i);
  check_index(h, B, j);
  LevelJets L(h, point);
  const int n = h.n;
  return L.theta.d(slot(n, A, i), slot(n, B, j - 1)) - L.theta.d(slot(n, B, j), slot(n, A, i - 1)) +
         L.bracket_dd(slot(n, A, i - 1), slot(n, B, j - 1));
}

cplx lax_apply(const HierarchyPotential& h, const Expr& phi, int A, int i, cplx lambda,
               const std::map<std::string, cplx>& point) {
  check_index(h, A, i);
  LevelJets L(h, point);
  std::map<std::string, cplx> consts = point;
  consts["lambda"] = lambda;
  Jet f = jet_at(phi, L.space, consts);
  const size_t prev = slot(h.n, A, i - 1), cur = slot(h.n, A, i);
  cplx br = L.theta.d(prev, L.x) * f.d(L.y) - L.theta.d(prev, L.y) * f.d(L.x);
  return f.d(prev) - lambda * (f.d(cur) + br);
}

std::vector<cplx> lax_series(const HierarchyPotential& h, const std::vector<Expr>& phi, int A, int i,
                             const std::map<std::string, cplx>& point) {
  check_index(h, A, i);
  LevelJets L(h, point);
  const size_t prev = slot(h.n, A, i - 1), cur = slot(h.n, A, i);
  std::vector<cplx> out(phi.size() + 1, 0.0);
  for (size_t k = 0; k < phi.size(); ++k) {
    Jet f = jet_at(phi[k], L.space, point);
    cplx br = L.theta.d(prev, L.x) * f.d(L.y) - L.theta.d(prev, L.y) * f.d(L.x);
    out[k] += f.d(prev);
    out[k + 1] -= f.d(cur) + br;
  }
  return out;
}

OmegaExpansion omega_expansion(const HierarchyPotential& h, int order) {
  const int n = h.n;
  if (n < 1) throw Error(ErrorKind::IndexRange, "hierarchy level must be at least 1");
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "negative truncation order");
  if (order > 2 * n + 1)
    throw Error(ErrorKind::TailUndetermined, "tail coefficients beyond lambda^" + std::to_string(2 * n + 1) +
                                                 " are not determined by the potential");
  OmegaExpansion out;
  out.n = n;
  out.order = order;
  for (int k = 0; k <= order; ++k) {
    if (k <= n) {
      out.omega0.push_back(Expr::var(hierarchy_var(0, n - k)));
      out.omega1.push_back(Expr::var(hierarchy_var(1, n - k)));
    } else {
      const int j = k - n - 1;
      out.omega0.push_back(h.theta.diff(hierarchy_var(1, j)));
      out.omega1.push_back(-h.theta.diff(hierarchy_var(0, j)));
    }
  }

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto vars = hierarchy_vars(n);
  try {
    for (int probe = 0; probe < 3; ++probe) {
      std::map<std::string, cplx> p;
      for (const auto& v : vars) p[v] = cplx(u(rng), 0.25 * u(rng));
      for (int A = 0; A < 2; ++A)
        for (int i = 1; i <= n; ++i)
          for (int B = 0; B < 2; ++B)
            for (int j = 1; j <= n; ++j)
              out.background_residual =
                  std::max(out.background_residual, std::abs(hierarchy_residual(h, A, i, B, j, p)));
    }
    if (out.background_residual > 1e-8)
      out.warning = "potential does not solve the hierarchy (max residual " +
                    std::to_string(out.background_residual) + "); coefficients are formal";
  } catch (const Error& e) {
    out.warning = std::string("background check skipped: ") + e.what();
  }
  return out;
}

std::vector<std::vector<cplx>> omega_sigma_coefficient(const HierarchyPotential& h, int k,
                                                       const std::map<std::string, cplx>& point) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative power of lambda");
  auto om = omega_expansion(h, std::min(k, 2 * h.n + 1));
  if (k > 2 * h.n + 1)
    throw Error(ErrorKind::TailUndetermined, "coefficient depends on undetermined tail terms");
  const auto vars = hierarchy_vars(h.n);
  const size_t N = vars.size();
  auto space = JetSpace::make_total(vars, 1);
  auto grad = [&](const Expr& e) {
    Jet j = jet_at(e, space, point);
    std::vector<cplx> g(N);
    for (size_t v = 0; v < N; ++v) g[v] = j.d(v);
    return g;
  };
  std::vector<std::vector<cplx>> out(N, std::vector<cplx>(N, 0.0));
  for (int a = 0; a <= k; ++a) {
    auto g0 = grad(om.omega0[static_cast<size_t>(a)]);
    auto g1 = grad(om.omega1[static_cast<size_t>(k - a)]);
    for (size_t p = 0; p < N; ++p)
      for (size_t q = 0; q < N; ++q) out[p][q] += g0[p] * g1[q] - g0[q] * g1[p];
  }
  return out;
}

}  // namespace hforge
