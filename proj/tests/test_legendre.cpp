#include <gtest/gtest.h>

#include <random>

#include "hforge/errors.hpp"
#include "hforge/legendre.hpp"

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

// Theta = (x + y^2)^2 / (4w) and its transform F = p^2 w - p y^2.
const char* kTheta = "(x + y^2)^2/(4*w)";
const char* kF = "p^2*w - p*y^2";

// Cubic wave-system solution at level 2: [l^4] of Q^3/6 + Q^2/2,
// Q = t0 + l t1 + ... + l^4 t4.
Expr hankel_cubic() {
  // coefficients of l^m in Q^2 and Q^3 by direct expansion
  Expr q2(0.0), q3(0.0);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b) {
      if (a + b == 4) q2 = q2 + Expr::var(t_var(a)) * Expr::var(t_var(b));
      for (int c = 0; c <= 4; ++c)
        if (a + b + c == 4) q3 = q3 + Expr::var(t_var(a)) * Expr::var(t_var(b)) * Expr::var(t_var(c));
    }
  return Expr(1.0 / 6.0) * q3 + Expr(0.5) * q2;
}

}  // namespace

TEST(LegendreGH, QuadraticExamples) {
  auto r = legendre_gh(P("x^2/2"), 0.3, 0.2, 0.7, 0.0);
  EXPECT_LT(std::abs(r.F - 0.49 / 2.0), 1e-14);
  EXPECT_LT(r.identity_residual, 1e-12);
  auto s = legendre_gh(P("3*x^2 + y*x"), 0.3, 0.2, 0.7, 0.0);
  // x = (p - y)/6, F = (p - y)^2/12
  EXPECT_LT(std::abs(s.F - 0.25 / 12.0), 1e-14);
  EXPECT_LT(std::abs(s.F_y + s.theta_y), 1e-12);
  expect_error([] { legendre_gh(P("x^2*z"), 0.1, 0.1, 0.1, 1.0); }, ErrorKind::InvalidArgument);
  expect_error([] { legendre_gh(P("y*x"), 0.1, 0.1, 0.1, 1.0); }, ErrorKind::DegenerateLegendre);
}

TEST(LegendreGH, Involution) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    cplx w = u(rng), y = u(rng) - 1.0, p = u(rng);
    auto f = legendre_gh(P(kTheta), w, y, p, 1.0);
    EXPECT_LT(std::abs(f.F - P(kF).evaluate({{"w", w}, {"y", y}, {"p", p}})), 1e-12);
    auto back = legendre_gh_inverse(P(kF), w, y, f.x, 0.5);
    EXPECT_LT(std::abs(back.p - p), 1e-12);
    EXPECT_LT(std::abs(back.theta - P(kTheta).evaluate({{"w", w}, {"y", y}, {"x", f.x}})), 1e-12);
  }
}

TEST(GH, FlatPotential) {
  Vec4 pt{0.3, -0.2, 0.5, 0.1};
  auto rep = gh_metric(P("p^2/2"), pt);
  EXPECT_FALSE(rep.non_monopole);
  Mat4 g2 = metric_from_tetrad(rep.sample.tetrad);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) EXPECT_LT(std::abs(g2[i][j] - rep.sample.g[i][j]), 1e-14);
  auto c = curvature_from_jets(gh_metric_field(P("p^2/2")), pt);
  EXPECT_LT(c.max_ricci, 1e-14);
}

TEST(GH, LegendreSolution) {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> u(0.4, 1.2);
  for (int k = 0; k < 5; ++k) {
    Vec4 pt{u(rng), u(rng) - 0.8, u(rng), u(rng)};
    auto rep = gh_metric(P(kF), pt);
    EXPECT_LT(std::abs(rep.psi - 2.0 * pt[gW]), 1e-13);
    EXPECT_LT(std::abs(rep.wave), 1e-13);
    EXPECT_LT(rep.monopole_max, 1e-13);
    EXPECT_FALSE(rep.non_monopole);
    Mat4 g2 = metric_from_tetrad(rep.sample.tetrad);
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) EXPECT_LT(std::abs(g2[i][j] - rep.sample.g[i][j]), 1e-12);

    auto forms = gh_sd_forms(P(kF), pt);
    auto jc = curvature_from_jets(gh_metric_field(P(kF)), pt, forms);
    EXPECT_LT(jc.max_ricci, 1e-8);
    EXPECT_LT(jc.max_weyl, 1e-8);
    auto fd = curvature_finite_difference(
        [](const Vec4& q) { return gh_metric(P(kF), q).sample.g; }, pt, forms);
    EXPECT_LT(fd.max_ricci, 1e-5);
    EXPECT_LT(fd.max_weyl, 1e-5);
    // Sigma(l) ^ Sigma(l) = 0 for every l
    for (cplx l : {cplx(0.3), cplx(-1.0, 0.5)}) {
      Mat4 s = sigma_at(forms, l);
      EXPECT_LT(std::abs(wedge4(s, s)), 1e-12);
    }
  }
}

TEST(GH, FormsMatchPlebanskiPullback) {
  // Plebanski forms of Theta at x = F_p, pulled back to (w, y, p, z).
  Vec4 pt{0.7, -0.3, 0.9, 0.2};
  auto forms = gh_sd_forms(P(kF), pt);
  cplx x = 2.0 * pt[gP] * pt[gW] - pt[gY] * pt[gY];
  auto pl = sd_two_forms(P(kTheta), Vec4{pt[gW], pt[gZ], x, pt[gY]});
  // d x = 2p dw - 2y dy + 2w dp
  Mat4 J{};  // J[pleb][gh]
  J[kW][gW] = 1.0;
  J[kZ][gZ] = 1.0;
  J[kY][gY] = 1.0;
  J[kX][gW] = 2.0 * pt[gP];
  J[kX][gY] = -2.0 * pt[gY];
  J[kX][gP] = 2.0 * pt[gW];
  for (int f = 0; f < 3; ++f) {
    Mat4 pb{};
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j)
        for (size_t a = 0; a < 4; ++a)
          for (size_t b = 0; b < 4; ++b) pb[i][j] += J[a][i] * J[b][j] * pl[static_cast<size_t>(f)][a][b];
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j)
        EXPECT_LT(std::abs(pb[i][j] - forms[static_cast<size_t>(f)][i][j]), 1e-12) << f << " " << i << j;
  }
}

TEST(GH, NonMonopoleControl) {
  // F = p^2 y^2: wave = 2 p^2, monopole residual -4p
  Vec4 pt{0.3, 0.5, 0.7, 0.1};
  auto rep = gh_metric(P("p^2*y^2"), pt);
  EXPECT_TRUE(rep.non_monopole);
  EXPECT_LT(std::abs(rep.wave - 2.0 * 0.49), 1e-13);
  EXPECT_LT(std::abs(rep.monopole[0] + 4.0 * 0.7), 1e-13);
  EXPECT_LT(std::abs(rep.monopole[1]), 1e-13);
  EXPECT_LT(std::abs(rep.monopole[2]), 1e-13);
  auto c = curvature_from_jets(gh_metric_field(P("p^2*y^2")), pt);
  EXPECT_GT(c.max_ricci, 1e-3);
  expect_error([&] { gh_metric(P("p*y"), pt); }, ErrorKind::DegenerateGH);
}

TEST(WaveSystem, Examples) {
  std::map<std::string, cplx> pt{{"t0", 0.1}, {"t1", 0.2}, {"t2", 0.3}};
  HierarchyF a{1, P("t0*t2 + t1^2/2")};
  EXPECT_EQ(wave_system_residual(a, 0, 1, pt), cplx(0.0));
  HierarchyF b{1, P("t1^2")};
  EXPECT_LT(std::abs(wave_system_residual(b, 0, 1, pt) - 2.0), 1e-15);
  EXPECT_EQ(wave_system_residual(b, 1, 1, pt), cplx(0.0));
  expect_error([&] { wave_system_residual(b, 0, 2, pt); }, ErrorKind::IndexRange);
  // n(2n-1) independent pairs; all vanish for the Hankel cubic
  for (int n = 1; n <= 4; ++n) {
    int count = 0;
    for (int i = 0; i <= 2 * n - 1; ++i)
      for (int j = i + 1; j <= 2 * n - 1; ++j) ++count;
    EXPECT_EQ(count, n * (2 * n - 1));
  }
  std::map<std::string, cplx> q;
  for (int a2 = 0; a2 <= 4; ++a2) q[t_var(a2)] = 0.1 * (a2 + 1);
  EXPECT_LT(wave_system_max_residual({2, hankel_cubic()}, q), 1e-14);
}

TEST(HierarchyLegendre, LevelOneMatchesGH) {
  auto h = hierarchy_from_plebanski(P(kTheta));
  const cplx w = 0.8, y = -0.3, p = 0.6;
  auto gh = legendre_gh(P(kTheta), w, y, p, 1.0);
  // t0 = d_{10} Theta = -p, t1 = y, t2 = w
  auto hl = hierarchy_legendre(h, {y, w}, {-p}, {-gh.x});
  EXPECT_LT(std::abs(hl.F - gh.F), 1e-12);
  EXPECT_LT(std::abs(hl.x1[0] + gh.x), 1e-12);
  EXPECT_LT(hl.wave_residual, 1e-12);
  EXPECT_LT(std::abs(hl.gradient[0] - hl.x1[0]), 1e-12);

  auto flat = hierarchy_legendre({1, P("x10^2/2")}, {0.1, 0.2}, {0.5}, {0.0});
  EXPECT_LT(std::abs(flat.F - 0.125), 1e-14);
  expect_error([] { hierarchy_legendre({1, P("0")}, {0.1, 0.2}, {0.5}, {0.0}); }, ErrorKind::DegenerateLegendre);
  expect_error([] { hierarchy_legendre({1, P("x11*x10^2")}, {0.1, 0.2}, {0.5}, {0.1}); },
               ErrorKind::InvalidArgument);
}

TEST(Leaf, LevelOneMatchesPlebanski) {
  Expr th = P("x*y^2 + 4/3*y^3*z");
  auto h = hierarchy_from_plebanski(th);
  Vec4 pl{0.3, 0.4, -0.2, 0.6};
  std::map<std::string, cplx> q{{"x00", pl[kY]}, {"x01", pl[kW]}, {"x10", -pl[kX]}, {"x11", pl[kZ]}};
  auto s = leaf_metric(h, q);
  auto ref = metric_from_theta(th, pl);
  // leaf position -> Plebanski position, with sign of x
  const size_t map[4] = {kY, kW, kX, kZ};
  const double sgn[4] = {1, 1, -1, 1};
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j)
      EXPECT_LT(std::abs(s.g[i][j] - sgn[i] * sgn[j] * ref.g[map[i]][map[j]]), 1e-14);
  Mat4 g2 = metric_from_tetrad(s.tetrad);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) EXPECT_LT(std::abs(g2[i][j] - s.g[i][j]), 1e-14);
  auto c = curvature_from_jets(leaf_metric_field(h, {}), Vec4{q["x00"], q["x01"], q["x10"], q["x11"]}, leaf_sd_forms(h, q));
  EXPECT_LT(c.max_ricci, 1e-10);
}

TEST(Leaf, ImplicitLevelTwo) {
  HierarchyF hf{2, hankel_cubic()};
  // Pick momenta, then read x^{1i} off the gradient so the seeds are exact.
  std::map<std::string, cplx> t{{"t0", 0.4}, {"t1", 0.7}, {"t2", 0.5}, {"t3", -0.3}, {"t4", 0.6}};
  auto space = JetSpace::make_total(t_vars(2), 1);
  Jet f = jet_at(hf.F, space, t);
  std::map<std::string, cplx> pt{{"x00", t["t2"]}, {"x01", t["t3"]}, {"x02", t["t4"]},
                                 {"x10", f.d(1)},  {"x11", f.d(0)}};
  auto leaf = leaf_from_f(hf, pt, {t["t1"] + 0.01, t["t0"] - 0.01});
  EXPECT_LT(std::abs(leaf.p[0] - t["t1"]), 1e-12);
  EXPECT_LT(std::abs(leaf.p[1] - t["t0"]), 1e-12);

  auto n2 = n2_second_derivatives(hf, t);
  EXPECT_LT(std::abs(n2.th_xx - leaf.th_10_10), 1e-10);
  EXPECT_LT(std::abs(n2.th_xy - leaf.th_00_10), 1e-10);
  EXPECT_LT(std::abs(n2.th_yy - leaf.th_00_00), 1e-10);

  Vec4 lp{pt["x00"], pt["x01"], pt["x10"], pt["x11"]};
  auto c = curvature_from_jets(leaf_metric_field_from_f(hf, pt, leaf.p), lp, leaf.sd);
  EXPECT_LT(c.max_ricci, 1e-8);
}

TEST(N2Metric, SymmetryScalingErrors) {
  HierarchyF hf{2, hankel_cubic()};
  // F_4 = t0^2/2 + t0, so t0 = -2 lies on the surface; M = t3^2 - t2 t4
  std::map<std::string, cplx> t{{"t0", -2.0}, {"t1", 0.7}, {"t2", 0.5}, {"t3", -0.3}, {"t4", 0.6}};
  auto s = n2_metric(hf, t);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) EXPECT_EQ(s.g[i][j], s.g[j][i]);
  HierarchyF scaled{2, Expr(3.0) * hankel_cubic()};
  auto s3 = n2_metric(scaled, t);
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) EXPECT_LT(std::abs(s3.g[i][j] - 3.0 * s.g[i][j]), 1e-12);

  auto off = t;
  off["t0"] += 0.1;
  expect_error([&] { n2_metric(hf, off); }, ErrorKind::OffSurface);
  expect_error([&] { n2_metric({2, P("t0^2")}, t); }, ErrorKind::DegenerateM);
  expect_error([&] { n2_second_derivatives({2, P("t2^3")}, t); }, ErrorKind::DegenerateM);
  expect_error([&] { n2_metric({1, P("t0^2")}, t); }, ErrorKind::InvalidArgument);
}
