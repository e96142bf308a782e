#include <gtest/gtest.h>

#include <random>

#include "hforge/errors.hpp"
#include "hforge/hierarchy.hpp"

using namespace hforge;

namespace {

Expr P(const std::string& s) { return Expr::parse(s); }

std::map<std::string, cplx> random_level_point(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::map<std::string, cplx> p;
  for (const auto& v : hierarchy_vars(n)) p[v] = cplx(u(rng), 0.3 * u(rng));
  return p;
}

Vec4 random_vec4(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec4 p;
  for (auto& c : p) c = cplx(u(rng), 0.3 * u(rng));
  return p;
}

// Polynomial solutions of the level-n hierarchy (found by undetermined
// coefficients): -x10 x00^2 + 4/3 x00^3 x11 - 2 x00^4 x12 + 16/5 x00^5 x13.
HierarchyPotential level_solution(int n) {
  std::string s = "-x10*x00^2 + 4/3*x00^3*x11";
  if (n >= 2) s += " - 2*x00^4*x12";
  if (n >= 3) s += " + 16/5*x00^5*x13";
  return {n, P(s)};
}

void expect_error(const std::function<void()>& f, ErrorKind kind) {
  try {
    f();
    ADD_FAILURE() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Wave, Examples) {
  Vec4 p{0.2, 0.4, -0.1, 0.7};
  EXPECT_EQ(wave_operator(P("0"), P("w*x"), p), cplx(1.0));
  EXPECT_EQ(wave_operator(P("0"), P("w"), p), cplx(0.0));
  EXPECT_EQ(wave_operator(P("x*y*w"), P("y^2"), Vec4{1.0, 1.0, 1.0, 1.0}), cplx(0.0));
}

TEST(Recursion, FlatChain) {
  auto ans = monomials({"w", "z", "x", "y"}, 3);
  Expr a = recursion_step(P("0"), P("w"), ans);
  Expr b = recursion_step(P("0"), P("z"), ans);
  Expr c = recursion_step(P("0"), P("y"), ans);
  std::mt19937 rng(3);
  for (int k = 0; k < 5; ++k) {
    auto at = plebanski_point(random_vec4(rng));
    EXPECT_LT(std::abs(a.evaluate(at) - at["y"]), 1e-12) << a.to_string();
    EXPECT_LT(std::abs(b.evaluate(at) + at["x"]), 1e-12) << b.to_string();
  }
  EXPECT_TRUE(c.is_zero()) << c.to_string();
  EXPECT_EQ(a.to_string(), "y");
}

TEST(Recursion, CurvedBackgroundKernel) {
  Expr theta = P("x*y^2 + 4/3*y^3*z");
  auto ans = monomials({"w", "z", "x", "y"}, 5);
  Expr r1 = recursion_step(theta, P("y"), ans);  // -Th_x
  Expr r2 = recursion_step(theta, theta.diff("z"), ans);
  std::mt19937 rng(5);
  for (int k = 0; k < 20; ++k) {
    Vec4 p = random_vec4(rng);
    auto at = plebanski_point(p);
    EXPECT_LT(std::abs(r1.evaluate(at) + at["y"] * at["y"]), 1e-11);
    EXPECT_LT(std::abs(r2.evaluate(at) + 2.0 * std::pow(at["y"], 4)), 1e-11);
    EXPECT_LT(std::abs(wave_operator(theta, r1, p)), 1e-10);
    EXPECT_LT(std::abs(wave_operator(theta, r2, p)), 1e-10);
  }
  auto chain = recursion_chain(P("0"), P("w"), monomials({"w", "z", "x", "y"}, 2), 2);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain[1].to_string(), "y");
  EXPECT_TRUE(chain[2].is_zero());
}

TEST(Recursion, Errors) {
  auto ans = monomials({"w", "z", "x", "y"}, 2);
  expect_error([&] { recursion_step(P("0"), P("x*w"), ans); }, ErrorKind::NotLinearizedSolution);
  expect_error([&] { recursion_step(P("0"), P("w"), {P("x")}); }, ErrorKind::InconsistentSystem);
  expect_error([&] { recursion_step(P("0"), P("w"), {P("y"), P("2*y")}); }, ErrorKind::AnsatzInsufficient);
  expect_error([&] { recursion_step(P("0"), P("w"), {P("w*z")}); }, ErrorKind::AnsatzInsufficient);
}

TEST(Hierarchy, ZeroPotential) {
  std::mt19937 rng(7);
  for (int n = 1; n <= 3; ++n) {
    auto p = random_level_point(n, rng);
    for (int A = 0; A < 2; ++A)
      for (int B = 0; B < 2; ++B)
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j) EXPECT_EQ(hierarchy_residual({n, P("0")}, A, i, B, j, p), cplx(0.0));
  }
}

TEST(Hierarchy, LevelOneIsMinusHeavenly) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Expr quartic(0.0);
  for (const auto& m : monomials({"w", "z", "x", "y"}, 4)) quartic = quartic + Expr(cplx(u(rng), u(rng))) * m;
  for (const Expr& th : {quartic, P("x*y^2 + 4/3*y^3*z"), P("ln(2 + x*y) + w*z^2")}) {
    auto h = hierarchy_from_plebanski(th);
    EXPECT_TRUE((plebanski_from_hierarchy(h) - th).is_zero() ||
                std::abs((plebanski_from_hierarchy(h) - th).evaluate({{"w", 0.1}, {"z", 0.2}, {"x", 0.3}, {"y", 0.4}})) < 1e-14);
    for (int k = 0; k < 20; ++k) {
      Vec4 p = random_vec4(rng);
      std::map<std::string, cplx> q{{"x00", p[kY]}, {"x10", -p[kX]}, {"x01", p[kW]}, {"x11", p[kZ]}};
      cplx lhs = hierarchy_residual(h, 0, 1, 1, 1, q);
      EXPECT_LT(std::abs(lhs + heavenly_residual(th, p)), 1e-12);
    }
  }
}

TEST(Hierarchy, BilinearLevelTwo) {
  // d01 d11 Th - d12 d00 Th + {2 x12, 3 x01} = 3 - 2 + 0
  HierarchyPotential h{2, P("2*x00*x12 + 3*x01*x11 - x10*x02")};
  std::mt19937 rng(13);
  EXPECT_LT(std::abs(hierarchy_residual(h, 0, 1, 1, 2, random_level_point(2, rng)) - 1.0), 1e-15);
  // x00*x12 alone: 0 - 1 + 0
  EXPECT_LT(std::abs(hierarchy_residual({2, P("x00*x12")}, 0, 1, 1, 2, random_level_point(2, rng)) + 1.0), 1e-15);
}

TEST(Hierarchy, Antisymmetry) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Expr cubic(0.0);
  for (const auto& m : monomials(hierarchy_vars(2), 3)) cubic = cubic + Expr(cplx(u(rng), 0.0)) * m;
  HierarchyPotential h{2, cubic};
  auto p = random_level_point(2, rng);
  for (int A = 0; A < 2; ++A)
    for (int B = 0; B < 2; ++B)
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
          EXPECT_LT(std::abs(hierarchy_residual(h, A, i, B, j, p) + hierarchy_residual(h, B, j, A, i, p)), 1e-12);
}

TEST(Hierarchy, IndexRange) {
  std::mt19937 rng(19);
  auto p = random_level_point(1, rng);
  HierarchyPotential h{1, P("x00")};
  expect_error([&] { hierarchy_residual(h, 0, 0, 1, 1, p); }, ErrorKind::IndexRange);
  expect_error([&] { hierarchy_residual(h, 0, 1, 1, 2, p); }, ErrorKind::IndexRange);
  expect_error([&] { hierarchy_residual(h, 2, 1, 1, 1, p); }, ErrorKind::IndexRange);
  expect_error([&] { lax_apply(h, P("x00"), 0, 2, 0.5, p); }, ErrorKind::IndexRange);
}

TEST(Hierarchy, PolynomialSolutions) {
  std::mt19937 rng(23);
  for (int n = 1; n <= 3; ++n) {
    auto h = level_solution(n);
    for (int k = 0; k < 3; ++k) {
      auto p = random_level_point(n, rng);
      for (int A = 0; A < 2; ++A)
        for (int B = 0; B < 2; ++B)
          for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) EXPECT_LT(std::abs(hierarchy_residual(h, A, i, B, j, p)), 1e-12);
    }
  }
}

TEST(Lax, FlatExamples) {
  std::mt19937 rng(29);
  for (int n = 1; n <= 3; ++n) {
    auto p = random_level_point(n, rng);
    HierarchyPotential h{n, P("0")};
    for (int A = 0; A < 2; ++A) {
      std::string s;
      for (int k = 0; k <= n; ++k) s += (k ? " + lambda^" + std::to_string(k) + "*" : "") + hierarchy_var(A, n - k);
      for (int B = 0; B < 2; ++B)
        for (int i = 1; i <= n; ++i)
          for (cplx lam : {cplx(0.3, 0.1), cplx(-1.2, 0.0), cplx(2.0, -0.5)}) {
            EXPECT_LT(std::abs(lax_apply(h, P(s), B, i, lam, p)), 1e-14) << s;
            EXPECT_EQ(lax_apply(h, P("lambda"), B, i, lam, p), cplx(0.0));
          }
    }
  }
  HierarchyPotential flat{1, P("0")};
  auto q = random_level_point(1, rng);
  for (int A = 0; A < 2; ++A) EXPECT_LT(std::abs(lax_apply(flat, P("x01 + lambda*x00"), A, 1, 0.7, q)), 1e-15);
}

TEST(Lax, AnnihilatesOmegaThroughDeterminedOrder) {
  std::mt19937 rng(31);
  for (int n = 1; n <= 3; ++n) {
    auto h = level_solution(n);
    auto om = omega_expansion(h, 2 * n + 1);
    EXPECT_TRUE(om.warning.empty()) << om.warning;
    for (int k = 0; k < 3; ++k) {
      auto p = random_level_point(n, rng);
      for (int A = 0; A < 2; ++A)
        for (int i = 1; i <= n; ++i)
          for (const auto* series : {&om.omega0, &om.omega1}) {
            auto img = lax_series(h, *series, A, i, p);
            for (int m = 0; m <= 2 * n + 1; ++m) EXPECT_LT(std::abs(img[static_cast<size_t>(m)]), 1e-11) << n;
          }
    }
  }
}

TEST(Omega, Truncation) {
  // Th_z = 0: omega^0 = w + lambda y - lambda^2 Th_x
  auto h = hierarchy_from_plebanski(P("x^2*w*y + y^3*x"));
  auto om = omega_expansion(h, 3);
  EXPECT_TRUE(om.omega0[3].is_zero());
  std::map<std::string, cplx> q{{"x00", 0.4}, {"x10", -0.3}, {"x01", 0.2}, {"x11", 0.1}};
  // -Th_x at x = 0.3, y = 0.4, w = 0.2
  EXPECT_LT(std::abs(om.omega0[2].evaluate(q) + (2.0 * 0.3 * 0.2 * 0.4 + 0.064)), 1e-15);
  EXPECT_EQ(om.omega0[0].to_string(), "x01");
  EXPECT_EQ(om.omega0[1].to_string(), "x00");
  EXPECT_FALSE(om.warning.empty());

  auto flat = omega_expansion({1, P("0")}, 3);
  EXPECT_EQ(flat.omega1[0].to_string(), "x11");
  EXPECT_EQ(flat.omega1[1].to_string(), "x10");
  EXPECT_TRUE(flat.omega1[2].is_zero());
  EXPECT_TRUE(flat.omega1[3].is_zero());
  expect_error([&] { omega_expansion({1, P("0")}, 4); }, ErrorKind::TailUndetermined);
}

TEST(Omega, SigmaTruncates) {
  std::mt19937 rng(37);
  for (int n = 1; n <= 3; ++n) {
    auto h = level_solution(n);
    auto p = random_level_point(n, rng);
    auto c = omega_sigma_coefficient(h, 2 * n + 1, p);
    double worst = 0.0;
    for (const auto& row : c)
      for (cplx v : row) worst = std::max(worst, std::abs(v));
    EXPECT_LT(worst, 1e-10);
    auto low = omega_sigma_coefficient(h, 2 * n, p);
    double top = 0.0;
    for (const auto& row : low)
      for (cplx v : row) top = std::max(top, std::abs(v));
    EXPECT_GT(top, 1e-6);
    expect_error([&] { omega_sigma_coefficient(h, 2 * n + 2, p); }, ErrorKind::TailUndetermined);
  }
}
