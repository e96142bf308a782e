#include <gtest/gtest.h>

#include <random>

#include "hforge/errors.hpp"
#include "hforge/legendre.hpp"
#include "hforge/twistor.hpp"

using namespace hforge;

namespace {

Expr P(const std::string& s) { return Expr::parse(s); }

void expect_error(const std::function<void()>& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

TwistorClass cls(int k, const std::string& rep, int weight) { return {k, P(rep), weight, {}, {}}; }

// Points where Q = w + y l - p l^2 has one root inside the unit circle.
struct GHPoint {
  cplx w, y, p;
};
GHPoint random_gh_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {cplx(0.2 * u(rng), 0.05 * u(rng)), cplx(1.0 + 0.2 * u(rng), 0.05 * u(rng)),
          cplx(0.2 * u(rng), 0.05 * u(rng))};
}

// Roots of w + y l - p l^2, enclosed one first.
std::pair<cplx, cplx> roots(const GHPoint& g) {
  cplx d = std::sqrt(g.y * g.y + 4.0 * g.p * g.w);
  cplx r1 = (g.y - d) / (2.0 * g.p), r2 = (g.y + d) / (2.0 * g.p);
  return std::abs(r1) < std::abs(r2) ? std::pair{r1, r2} : std::pair{r2, r1};
}
cplx inner_root(const GHPoint& g) { return roots(g).first; }

}  // namespace

TEST(SplitG, Examples) {
  std::vector<cplx> t{0.3, -0.2, 0.5};
  EXPECT_LT(std::abs(split_g(cls(2, "1", 0), t, 0.4) - 1.0), 1e-14);
  cplx l(0.2, -0.3);
  EXPECT_LT(std::abs(split_g(cls(2, "Q", 0), t, l) - section_value(t, l)), 1e-14);
  expect_error([&] { split_g(cls(2, "Q", 0), t, 1.5); }, ErrorKind::InvalidArgument);
  expect_error([&] { split_g(cls(2, "1/(lambda - 1)", 0), t, 0.1); }, ErrorKind::PoleOnContour);
}

TEST(SplitG, SplittingProperty) {
  // singular at lambda = 0 and lambda = 3, analytic on the annulus
  TwistorClass G = cls(2, "Q^2/lambda + Q/(lambda - 3)", 0);
  std::vector<cplx> t{0.3, -0.2, 0.5};
  ContourSpec inner;
  inner.radius = 0.3;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> r(0.45, 0.85), a(0.0, 6.28);
  for (int k = 0; k < 10; ++k) {
    cplx l = std::polar(r(rng), a(rng));
    cplx diff = split_g(G, t, l) - split_g(G, t, l, inner);
    cplx q = section_value(t, l);
    EXPECT_LT(std::abs(diff - (q * q / l + q / (l - 3.0))), 1e-10);
  }
}

TEST(FFromG, Examples) {
  std::vector<cplx> t{0.3, -0.2, 0.5};
  EXPECT_LT(std::abs(f_from_g_class(cls(2, "1", 0), t)), 1e-15);
  EXPECT_LT(std::abs(f_from_g_class(cls(2, "Q", 0), t) - t[1]), 1e-14);
  EXPECT_LT(std::abs(f_from_g_class(cls(2, "Q^2", 0), t) - 2.0 * t[1] * t[2]), 1e-14);
  expect_error([&] { f_from_g_class(cls(4, "Q", -2), {0, 0, 0, 0, 0}); }, ErrorKind::WeightMismatch);
  expect_error([&] { f_from_g_class(cls(4, "Q", 3), {0, 0, 0, 0, 0}); }, ErrorKind::WeightMismatch);
  expect_error([&] { f_from_g_class(cls(2, "Q", 0), {0, 0}); }, ErrorKind::InvalidArgument);
}

TEST(FFromG, WaveSystemForPowers) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 3; ++n)
    for (int m = 1; m <= 4; ++m) {
      const int k = 2 * n;
      std::vector<cplx> t;
      for (int a = 0; a <= k; ++a) t.emplace_back(u(rng), u(rng));
      Jet F = f_from_g_jet(cls(k, "Q^" + std::to_string(m), 0), section_space(k, 2), t);
      for (size_t i = 0; i + 1 < static_cast<size_t>(k); ++i)
        for (size_t j = i + 1; j < static_cast<size_t>(k); ++j)
          EXPECT_LT(std::abs(F.d(i + 1, j) - F.d(i, j + 1)), 1e-12) << n << " " << m;
    }
  // also through the symbolic route for G = Q^2, n = 1
  HierarchyF hf{1, P("2*t1*t2")};
  std::map<std::string, cplx> pt{{"t0", 0.1}, {"t1", 0.2}, {"t2", 0.3}};
  EXPECT_EQ(wave_system_residual(hf, 0, 1, pt), cplx(0.0));
}

TEST(PsiField, LogQResidueOracle) {
  std::mt19937 rng(7);
  TwistorClass f = cls(2, "ln(Q)", 0);
  for (int k = 0; k < 10; ++k) {
    GHPoint g = random_gh_point(rng);
    auto t = gh_section(g.w, g.y, g.p);
    cplx psi = psi_field(f, t, {});
    cplx oracle = 1.0 / (g.y - 2.0 * g.p * inner_root(g));
    EXPECT_LT(std::abs(psi - oracle), 1e-12);
    // sigma = +1 against the principal square root on this region
    EXPECT_LT(std::abs(psi - 1.0 / std::sqrt(g.y * g.y + 4.0 * g.p * g.w)), 1e-9);
    // psi_yy + psi_pw with p = -t0, y = t1, w = t2
    Jet j = psi_field_jet(f, section_space(2, 2), t, {});
    EXPECT_LT(std::abs(j.d(1, 1) - j.d(0, 2)), 1e-8);
  }
  EXPECT_EQ(psi_field(cls(2, "lambda^3", 0), {0.1, 1.0, 0.2}, {}), cplx(0.0));
  expect_error([&] { psi_field(f, {0.1, 1.0, 0.2}, {0}); }, ErrorKind::IndexRange);
  expect_error([&] { psi_field(cls(3, "ln(Q)", -1), {0.1, 1.0, 0.2, 0.3}, {0, 2}); }, ErrorKind::IndexRange);
}

TEST(PsiField, HigherKWaveSystemAndGauge) {
  // k = 3, f = 1/Q^2 (weight -1); psi has two indices
  TwistorClass f = cls(3, "1/Q", -1);
  std::vector<cplx> t{0.05, 0.1, 1.0, 0.3};  // roots: one near -0.3, two far out
  auto space = section_space(3, 2);
  for (const auto& idx : std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 1}}) {
    Jet j = psi_field_jet(f, space, t, idx);
    for (size_t a = 0; a + 1 < 3; ++a)
      for (size_t b = a + 1; b < 3; ++b) EXPECT_LT(std::abs(j.d(a + 1, b) - j.d(a, b + 1)), 1e-8);
    // symmetric in the index order
    std::vector<int> rev(idx.rbegin(), idx.rend());
    EXPECT_EQ(psi_field(f, t, idx), psi_field(f, t, rev));
    // a coboundary holomorphic inside the contour changes nothing
    TwistorClass g = f;
    g.representative = f.representative + P("Q^2*lambda^2");
    EXPECT_LT(std::abs(psi_field(g, t, idx) - psi_field(f, t, idx)), 1e-10);
    // linearity
    TwistorClass h = f;
    h.representative = Expr(3.0) * f.representative;
    EXPECT_LT(std::abs(psi_field(h, t, idx) - 3.0 * psi_field(f, t, idx)), 1e-13);
  }
}

TEST(Constraint, Examples) {
  EXPECT_TRUE(constraint_fields(cls(3, "ln(Q)", -1), {0.1, 0.2, 0.3, 0.4}).empty());
  auto c = constraint_fields(cls(4, "1", -2), {0.1, 0.2, 0.3, 0.4, 0.5});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_LT(std::abs(c[0]), 1e-15);
  // Q = (l - 0.2)(l + 0.3)(l - 3)(l + 4): two simple roots inside
  auto roots = std::vector<cplx>{0.2, -0.3, 3.0, -4.0};
  std::vector<cplx> coeff{1.0};  // highest power first
  for (cplx r : roots) {
    std::vector<cplx> next(coeff.size() + 1, 0.0);
    for (size_t i = 0; i < coeff.size(); ++i) {
      next[i] += coeff[i];
      next[i + 1] -= r * coeff[i];
    }
    coeff = next;
  }
  // t^a is the coefficient of l^{4-a}: exactly the highest-first order
  auto dq = [&](cplx l) {
    cplx s = 0.0;
    for (size_t i = 0; i < 4; ++i) s += static_cast<double>(4 - i) * coeff[i] * std::pow(l, 3 - static_cast<int>(i));
    return s;
  };
  cplx oracle = 1.0 / dq(0.2) + 1.0 / dq(-0.3);
  EXPECT_LT(std::abs(constraint_field(cls(4, "1/Q", -2), coeff, {}) - oracle), 1e-10);
  auto c6 = constraint_fields(cls(6, "1/Q", -4), {1, 0, 0, 0, 0, 0, 2});
  EXPECT_EQ(c6.size(), 3u);
  expect_error([&] { constraint_field(cls(3, "1", -1), {0, 0, 0, 1}, {}); }, ErrorKind::IndexRange);
}

TEST(Sigma, ReproducesGHForms) {
  std::mt19937 rng(11);
  TwistorClass f = cls(2, "ln(Q)", 0);
  for (int k = 0; k < 5; ++k) {
    GHPoint g = random_gh_point(rng);
    auto t = gh_section(g.w, g.y, g.p);
    // f = ln Q comes from G_QQ = l^{-2}/Q, so F_{t^i t^j} = oint l^{-i-j}/Q,
    // minus the residue at the outer root
    cplx R = roots(g).second, dq = g.y - 2.0 * g.p * R;
    auto Ft = [&](int i, int j) { return -std::pow(R, -(i + j)) / dq; };
    // GH Hessian over (w, y, p): w = t2, y = t1, p = -t0
    const int map[3] = {2, 1, 0};
    const double sgn[3] = {1, 1, -1};
    Hessian3 h{};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) h[a][b] = sgn[a] * sgn[b] * Ft(map[a], map[b]);
    Forms3 gh = gh_sd_forms_from_hessian(h);

    auto sc = sigma_components(f, t);
    EXPECT_LT(sc.quadratic_residual, 1e-10);
    // sigma coordinates (t0, t1, t2, z) -> GH positions (w, y, p, z)
    const size_t pos[4] = {gP, gY, gW, gZ};
    const double s4[4] = {-1, 1, 1, 1};
    const Matrix<cplx>* comp[3] = {&sc.s00, &sc.s01, &sc.s11};
    for (int c = 0; c < 3; ++c)
      for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j)
          EXPECT_LT(std::abs(s4[i] * s4[j] * (*comp[c])[i][j] - gh[static_cast<size_t>(c)][pos[i]][pos[j]]), 1e-8)
              << c << " " << i << j;

    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int q = 0; q < 10; ++q) {
      auto s = sigma_from_psi(f, t, cplx(u(rng), u(rng)));
      Mat4 m{};
      for (size_t i = 0; i < 4; ++i)
        for (size_t j = 0; j < 4; ++j) m[i][j] = s[i][j];
      EXPECT_LT(std::abs(wedge4(m, m)), 1e-10);
    }
  }
}

TEST(Sigma, Errors) {
  std::vector<cplx> t{0.1, 1.0, 0.2};
  expect_error([&] { sigma_from_psi(cls(2, "0", 0), t, 0.3); }, ErrorKind::DegenerateSigma);
  expect_error([&] { sigma_components(cls(2, "0", 0), t); }, ErrorKind::DegenerateSigma);
  expect_error([&] { sigma_from_psi(cls(2, "ln(Q)", 0), t, 2.0); }, ErrorKind::InvalidArgument);
  // k = 4 with f = 1/Q: the constraint is a nonzero residue sum
  // roots 0.2 and -0.3 inside, 3 and -4 outside
  std::vector<cplx> q4{1.0, 1.1, -11.96, -1.26, 0.72};
  expect_error([&] { sigma_from_psi(cls(4, "1/Q", -2), q4, 0.3); }, ErrorKind::OffConstraint);
}

TEST(Bridge, PsiEqualsFpp) {
  std::mt19937 rng(13);
  for (const char* g : {"(Q - 0.05)*(ln(Q - 0.05) - 1)", "Q^3*lambda^-1 + (Q + 0.1)*(ln(Q + 0.1) - 1)"}) {
    TwistorClass G = cls(2, g, 0);
    for (int k = 0; k < 10; ++k) {
      GHPoint p = random_gh_point(rng);
      auto rep = bridge_two_methods(G, gh_section(p.w, p.y, p.p));
      ASSERT_EQ(rep.psi.size(), 1u);
      EXPECT_LT(rep.max_mismatch, 1e-8) << g;
      EXPECT_EQ(rep.f.weight, 0);
    }
  }
  std::vector<cplx> t{0.1, 0.7, 0.2};
  auto sq = bridge_two_methods(cls(2, "Q^2", 0), t);
  EXPECT_LT(std::abs(sq.psi[0]), 1e-14);
  EXPECT_LT(std::abs(sq.f_second[0]), 1e-14);
  auto c = bridge_two_methods(cls(2, "5", 0), t);
  EXPECT_TRUE(c.f.representative.is_zero());
  EXPECT_EQ(c.psi[0], cplx(0.0));
  // level 2: five psi components against the F_ij block
  auto l2 = bridge_two_methods(cls(4, "Q^3", 0), {0.1, 0.2, 0.3, 0.4, 0.5});
  EXPECT_EQ(l2.psi.size(), 5u);
  EXPECT_LT(l2.max_mismatch, 1e-12);
  expect_error([&] { bridge_two_methods(cls(4, "Q", -2), {0, 0, 0, 0, 1}); }, ErrorKind::WeightMismatch);
}
