#include <gtest/gtest.h>

#include <random>

#include "hforge/errors.hpp"
#include "hforge/expr.hpp"

using hforge::cplx;
using hforge::Expr;

namespace {

std::map<std::string, cplx> random_point(std::mt19937& rng, const std::vector<std::string>& vars) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::map<std::string, cplx> p;
  for (const auto& v : vars) p[v] = cplx(u(rng), u(rng));
  return p;
}

}  // namespace

TEST(Expr, ParsesComplexLiterals) {
  Expr e = Expr::parse("2+3i");
  EXPECT_EQ(e.evaluate({}), cplx(2, 3));
  EXPECT_EQ(Expr::parse("-1.5-0.25i").evaluate({}), cplx(-1.5, -0.25));
  EXPECT_EQ(Expr::parse("i*i").evaluate({}), cplx(-1, 0));
  EXPECT_EQ(Expr::parse("1e-3").evaluate({}), cplx(1e-3, 0));
}

TEST(Expr, OperatorPrecedence) {
  std::map<std::string, cplx> p{{"x", 2.0}, {"y", 3.0}};
  EXPECT_EQ(Expr::parse("-x^2").evaluate(p), cplx(-4));
  EXPECT_EQ(Expr::parse("x*y^2/2").evaluate(p), cplx(9));
  EXPECT_EQ(Expr::parse("x - y - 1").evaluate(p), cplx(-2));
  EXPECT_EQ(Expr::parse("x^(-2)").evaluate(p), cplx(0.25));
  EXPECT_EQ(Expr::parse("x^-1").evaluate(p), cplx(0.5));
  EXPECT_NEAR(std::abs(Expr::parse("ln(x)+sqrt(y)").evaluate(p) - (std::log(2.0) + std::sqrt(3.0))), 0.0,
              1e-15);
}

TEST(Expr, ParseErrorsCarryColumn) {
  try {
    Expr::parse("x + * y");
    FAIL();
  } catch (const hforge::ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 5);
  }
  EXPECT_THROW(Expr::parse("x^1.5"), hforge::ParseError);
  EXPECT_THROW(Expr::parse("ln(x"), hforge::ParseError);
  EXPECT_THROW(Expr::parse(""), hforge::ParseError);
}

TEST(Expr, PrintParseRoundTrip) {
  std::mt19937 rng(7);
  const char* sources[] = {"x^3*y - 2*x/(y+1)", "-(x - y)^2 + ln(x*y) - sqrt(1 + x)",
                           "(1+2i)*x - (0.5-1i)/y", "x/(y/x) - x*(y - x)", "-x^(-3) + -2*y"};
  for (const char* src : sources) {
    Expr a = Expr::parse(src);
    Expr b = Expr::parse(a.to_string());
    for (int k = 0; k < 5; ++k) {
      auto p = random_point(rng, {"x", "y"});
      EXPECT_NEAR(std::abs(a.evaluate(p) - b.evaluate(p)), 0.0, 1e-12) << src << " -> " << a.to_string();
    }
  }
}

TEST(Expr, SymbolicDerivatives) {
  Expr f = Expr::parse("x^3*y + ln(y) + sqrt(x)");
  std::map<std::string, cplx> p{{"x", 4.0}, {"y", 2.0}};
  EXPECT_NEAR(std::abs(f.diff("x").evaluate(p) - (3.0 * 16 * 2 + 0.25)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(f.diff("y").diff("y").evaluate(p) - (-0.25)), 0.0, 1e-14);
  EXPECT_TRUE(f.diff("z").is_zero());
}

TEST(Expr, UnboundAndSingular) {
  try {
    Expr::parse("x + q").evaluate({{"x", 1.0}});
    FAIL();
  } catch (const hforge::Error& e) {
    EXPECT_EQ(e.kind(), hforge::ErrorKind::UnboundVariable);
  }
  try {
    Expr::parse("1/(x-1)").evaluate({{"x", 1.0}});
    FAIL();
  } catch (const hforge::Error& e) {
    EXPECT_EQ(e.kind(), hforge::ErrorKind::SingularEvaluation);
    EXPECT_NE(std::string(e.what()).find("1/(x - 1)"), std::string::npos);
  }
}

TEST(Expr, Substitute) {
  Expr f = Expr::parse("x*y + x");
  Expr g = f.substitute({{"x", Expr::parse("y^2")}});
  EXPECT_EQ(g.variables(), std::set<std::string>{"y"});
  EXPECT_EQ(g.evaluate({{"y", 2.0}}), cplx(12.0));
}

TEST(PoissonBracket, CanonicalPair) {
  Expr y = Expr::var("y");
  Expr x = Expr::var("x");
  EXPECT_EQ(hforge::poisson_bracket(y, x).evaluate({}), cplx(1.0));
  EXPECT_EQ(hforge::poisson_bracket(x, y).evaluate({}), cplx(-1.0));
}

TEST(PoissonBracket, HessianExample) {
  Expr th = Expr::parse("x^2*y^2");
  Expr b = hforge::poisson_bracket(th.diff("y"), th.diff("x"));
  std::mt19937 rng(3);
  for (int k = 0; k < 5; ++k) {
    auto p = random_point(rng, {"x", "y"});
    cplx x = p["x"], y = p["y"];
    cplx oracle = (2.0 * x * x) * (2.0 * y * y) - (4.0 * x * y) * (4.0 * x * y);
    EXPECT_NEAR(std::abs(b.evaluate(p) - oracle), 0.0, 1e-12);
  }
}

TEST(PoissonBracket, BilinearAntisymmetricLeibniz) {
  std::mt19937 rng(11);
  Expr f = Expr::parse("x^2*y + w*x - z*y^3");
  Expr g = Expr::parse("x*y*w + ln(1 + x^2) - y");
  Expr h = Expr::parse("sqrt(2 + y) + x^3*z");
  cplx a(0.3, -1.1), c(-2.0, 0.4);
  for (int k = 0; k < 10; ++k) {
    auto p = random_point(rng, {"x", "y", "w", "z"});
    auto br = [&](const Expr& u, const Expr& v) { return hforge::poisson_bracket(u, v).evaluate(p); };
    EXPECT_NEAR(std::abs(br(f, a * g + c * h) - (a * br(f, g) + c * br(f, h))), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(br(f, g) + br(g, f)), 0.0, 1e-12);
    cplx lhs = br(f, g * h);
    cplx rhs = br(f, g) * h.evaluate(p) + g.evaluate(p) * br(f, h);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12 * (1.0 + std::abs(lhs)));
  }
}
