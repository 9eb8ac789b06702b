#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bosegas/errors.hpp"
#include "bosegas/nls_system.hpp"
#include "bosegas/special_integrals.hpp"

using namespace bosegas;
using std::numbers::pi;
static const cplx I(0.0, 1.0);

static FourPointConfig generic_a() {
  FourPointConfig c;
  c.y = {-0.4, 0.3, -0.9, 0.8};
  c.t = {0.0, 0.2, 0.7, 1.0};
  return c;
}
static FourPointConfig generic_b() {
  FourPointConfig c;
  c.y = {0.2, -0.5, 0.4, 1.1};
  c.t = {0.1, -0.2, 0.6, 0.9};
  return c;
}

static double max_abs(const Vec4& a, const Vec4& b) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

TEST_CASE("aux fields: coincident pair, specialization and PV quadrature") {
  FourPointConfig c;
  c.y = {0.3, 0.3, -0.2, 0.5};
  c.t = {0.4, 0.4, 0.0, 0.6};
  AuxField a(c, 1);
  CHECK(a.vanishing());
  CHECK(a.G(0.7) == cplx(0.0));

  auto s = FourPointConfig::correlation(0.4, 1.1, 0.5);
  AuxField g1(s, 1), g2(s, 2);
  CHECK(g1.y() == doctest::Approx(0.8));
  CHECK(g1.t() == 0.0);
  CHECK(g2.y() == doctest::Approx(2.2));
  CHECK(g2.t() == 0.0);
  for (double l : {-1.3, 0.2, 2.5}) {
    CHECK(std::abs(g1.G(l) - (-0.5 * I) * std::exp(-I * 0.8 * l)) < 1e-14);
    CHECK(std::abs(g2.G(l) - (-0.5 * I) * std::exp(-I * 2.2 * l)) < 1e-14);
  }

  AuxField ga(generic_a(), 2);
  RegularizationPolicy pol;
  for (double l : {-0.8, 0.35, 1.9}) {
    auto f = [&](double s) { return std::exp(tau(s, ga.y(), ga.t())); };
    auto ref = damped_pv_integral(f, l, pol);
    CHECK(std::abs(ga.G(l) - ref.value / (2.0 * pi)) < 1e-7);
  }
}

TEST_CASE("K_p diagonal is the limit of the off-diagonal kernel") {
  AuxField a(generic_b(), 1);
  for (double l : {-1.1, 0.4}) {
    // Richardson on offsets h, h/2 removes the O(h) term
    double h = 1e-3;
    cplx k1 = 0.5 * (a.K(l, l + h) + a.K(l, l - h));
    cplx k2 = 0.5 * (a.K(l, l + h / 2) + a.K(l, l - h / 2));
    cplx lim = (4.0 * k2 - k1) / 3.0;
    CHECK(std::abs(a.K(l, l) - lim) < 1e-9);
  }
  auto q = build_grid(-1.0, 1.0, 6);
  auto op = build_K_p(a, q);
  CHECK(op.scale == doctest::Approx(-2.0 / pi));
  CHECK(std::abs(op.matrix(1, 4) - a.K(q.nodes[1], q.nodes[4])) < 1e-15);
}

TEST_CASE("E vectors: first components and degenerate first pair") {
  FourPointConfig c = generic_a();
  EVectors ev(c, 2.0);
  const AuxField& a1 = ev.aux(1);
  for (double l : {-1.7, 0.0, 0.9}) {
    Vec4 L = ev.left(l);
    auto e = a1.eL(l);
    CHECK(std::abs(L[0] - e[0]) == 0.0);
    CHECK(std::abs(L[1] - e[1]) == 0.0);
    Vec4 R = ev.right(l);
    auto r = ev.aux(2).eR(l);
    CHECK(std::abs(R[2] - r[0]) == 0.0);
    CHECK(std::abs(R[3] - r[1]) == 0.0);
  }
  FourPointConfig d = c;
  d.y[1] = d.y[0];
  d.t[1] = d.t[0];
  EVectors ed(d, 2.0);
  for (double l : {-1.2, 0.6}) {
    Vec4 L = ed.left(l);
    auto e2 = ed.aux(2).eL(l);
    CHECK(std::abs(L[2] - e2[0]) < 1e-15);
    CHECK(std::abs(L[3] - e2[1]) < 1e-15);
  }
}

TEST_CASE("E vectors agree with damped whole-line quadrature") {
  for (auto c : {generic_a(), generic_b()}) {
    EVectors ev(c, 2.0);
    const AuxField &a1 = ev.aux(1), &a2 = ev.aux(2);
    auto chi = [&](double nu) { return std::exp(I * ((c.t[2] - c.t[1]) * nu * nu + (c.y[1] - c.y[2]) * nu)); };
    auto dq = [](const AuxField& a, double l, double nu) {
      if (std::abs(nu - l) < 1e-7) return a.dG(l);
      return (a.G(nu) - a.G(l)) / (nu - l);
    };
    RegularizationPolicy pol;
    for (double l : {-1.4, 0.3}) {
      auto Ia = damped_integral([&](double nu) { return chi(nu) * dq(a1, l, nu); }, l, pol).value;
      auto Ib = damped_integral([&](double nu) { return chi(nu) * dq(a1, l, nu) * a2.G(nu); }, l, pol).value;
      Vec4 L = ev.left(l);
      cplx A1 = a1.left_phase(l), A2 = a2.left_phase(l);
      CHECK(std::abs(L[2] - (-A2 - (2.0 / pi) * A1 * Ia)) < 1e-6);
      CHECK(std::abs(L[3] - (A2 * a2.G(l) + (2.0 / pi) * A1 * Ib)) < 1e-6);

      auto Ic = damped_integral([&](double nu) { return chi(nu) * a1.G(nu) * dq(a2, l, nu); }, l, pol).value;
      Vec4 R = ev.right(l);
      cplx B1 = a1.right_phase(l), B2 = a2.right_phase(l);
      double k = 2.0 / pi;
      CHECK(std::abs(R[0] - (k * B1 * a1.G(l) + k * k * B2 * Ic)) < 1e-6);
    }
    auto q13 = damped_integral([&](double nu) { return chi(nu) * a1.G(nu) * a2.G(nu); }, 0.0, pol).value;
    CHECK(std::abs(ev.line_integral(3) - q13) < 1e-6);
  }
}

TEST_CASE("right derivative matches central differences") {
  EVectors ev(generic_b(), 2.0);
  for (double m : {-1.0, 0.45}) {
    double h = 1e-4;
    Vec4 p = ev.right(m + h), q = ev.right(m - h), d = ev.right_derivative(m);
    Vec4 fd;
    for (int k = 0; k < 4; ++k) fd[k] = (p[k] - q[k]) / (2.0 * h);
    CHECK(max_abs(fd, d) < 1e-7);
  }
}

static FourPointConfig moved(FourPointConfig c, int var, double d) {
  (var < 4 ? c.y[var] : c.t[var - 4]) += d;
  return c;
}

// max over mu of |dE^R - (generator) E^R| for the y_j (kind 0) or t_j (kind 1) flow
static double flow_residual(const FourPointConfig& c, int j, int kind, double h) {
  EVectors e0(c, 2.0);
  Mat4 Q = e0.Q();
  Mat4 P = NlsMatrices::P(j + 1);
  Mat4 dQ = (EVectors(moved(c, j, h), 2.0).Q() - EVectors(moved(c, j, -h), 2.0).Q()) / (2.0 * h);
  int var = kind == 0 ? j : j + 4;
  EVectors ep(moved(c, var, h), 2.0), em(moved(c, var, -h), 2.0);
  double worst = 0.0;
  for (double mu : {-1.3, 0.2, 1.6}) {
    Mat4 l = mu * P + (Q * P - P * Q);
    Mat4 g = kind == 0 ? l : Mat4(-mu * l + dQ);
    Vec4 r = e0.right(mu), rp = ep.right(mu), rm = em.right(mu);
    for (int a = 0; a < 4; ++a) {
      cplx lhs = (rp[a] - rm[a]) / (2.0 * h), rhs = 0.0;
      for (int b = 0; b < 4; ++b) rhs += g(a, b) * r[b];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

TEST_CASE("closed differential equations of E^R converge at second order") {
  FourPointConfig c = generic_a();
  for (int kind : {0, 1})
    for (int j = 0; j < 4; ++j) {
      double r1 = flow_residual(c, j, kind, 2e-2), r2 = flow_residual(c, j, kind, 1e-2);
      INFO("kind " << kind << " j " << j << " " << r1 << " " << r2);
      CHECK(r2 < 1e-2);
      CHECK(r1 / r2 > 3.5);
    }
}

TEST_CASE("Q: block structure and coincident pairs") {
  Mat4 q = build_Q(generic_a());
  for (int a = 2; a < 4; ++a)
    for (int b = 0; b < 2; ++b) CHECK(q(a, b) == cplx(0.0));
  CHECK(q(0, 0) == cplx(0.0));
  CHECK(q(1, 0) == cplx(0.0));
  CHECK(std::abs(q(0, 1) + gaussian_fresnel(0.7, 0.2)) < 1e-15);
  CHECK(std::abs(q(1, 2) - (2.0 / pi) * 2.0 * pi * gaussian_fresnel(-1.2, 0.5)) < 1e-14);

  FourPointConfig d = generic_a();
  d.y[1] = d.y[0];
  d.t[1] = d.t[0];
  CHECK_THROWS_AS(build_Q(d), DegenerateDelta);

  // specialization: t2 = t1 and y2 - y1 = 2 x1 > 0, so the block is -G(2 x1, 0) = 0
  Mat4 s = build_Q(FourPointConfig::correlation(0.4, 1.1, 0.5));
  CHECK(s(0, 1) == cplx(0.0));
  CHECK(s(2, 3) == cplx(0.0));
}

TEST_CASE("M at the correlation specialization is the gauged transpose of L") {
  for (auto p : {std::array<double, 3>{0.4, 1.1, 0.5}, {0.9, 0.3, 0.8}, {0.25, 1.7, 0.3}}) {
    EVectors ev(FourPointConfig::correlation(p[0], p[1], p[2]), 3.2);
    GeometryParams g{p[0], p[1], p[2]};
    double worst = 0.0;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) {
        double l = -3.1 + 6.2 * i / 15.0, m = -3.1 + 6.2 * j / 15.0;
        cplx want = std::exp(0.5 * I * p[2] * (l * l - m * m)) * kernel_L(m, l, g);
        worst = std::max(worst, std::abs(ev.M(l, m) - want));
      }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("b_14 equals the trace form of the correlation factor") {
  for (auto p : {std::array<double, 3>{0.4, 1.1, 0.5}, {0.9, 0.3, 0.8}, {0.0, 1.2, 0.6}}) {
    double x1 = p[0], x2 = p[1], t = p[2], q = pi;
    NlsEnsemble ens;
    ens.n = 24;
    auto r = build_b(FourPointConfig::correlation(x1, x2, t), ens);
    auto grid = mirror_grid(build_grid(0.0, q, ens.n));
    GeometryParams g{x1, x2, t};
    auto op = assemble(grid, [&](double l, double m) { return kernel_L(l, m, g); }, 2.0 / pi);
    CMat S = resolvent_kernel(op);
    int n = grid.size();
    cplx tr = 0.0;
    for (int i = 0; i < n; ++i) {
      double li = grid.nodes[i];
      cplx p21 = kernel_P(li, x2, x1, t);
      tr += grid.weights[i] * kernel_P(li, x1, x2, t) * p21;
      for (int j = 0; j < n; ++j)
        tr += (2.0 / pi) * grid.weights[i] * grid.weights[j] * S(i, j) * kernel_P(grid.nodes[j], x1, x2, t) * p21;
    }
    cplx lhs = gaussian_fresnel(x1 + x2, t) - tr / (2.0 * pi);
    CHECK(std::abs(lhs - r.b(0, 3)) < 1e-10);
  }
}

TEST_CASE("build_b: F^L and F^R give the same B; small domain leaves Q") {
  NlsEnsemble ens;
  ens.n = 16;
  auto line = nls_spectral_line(ens);
  auto r = build_b(generic_a(), ens);
  EVectors ev(generic_a(), line.extent);
  auto es = build_E_vectors(ev, line.quad);
  double worst = 0.0;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      cplx s = 0.0;
      for (int i = 0; i < line.quad.size(); ++i) s -= line.quad.weights[i] * es.right[i][j] * r.FL(i, k);
      worst = std::max(worst, std::abs(s - r.B(j, k)));
    }
  CHECK(worst < 1e-11);
  CHECK((r.b - (r.B + r.Q)).norm() == 0.0);

  ens.D = 1e-7;
  auto small = build_b(generic_a(), ens);
  CHECK(small.B.norm() < 1e-5);
  CHECK((small.b - small.Q).norm() < 1e-5);
}

TEST_CASE("Lax compatibility residual converges at second order") {
  NlsEnsemble ground;
  ground.n = 16;
  NlsEnsemble thermal = ground;
  thermal.thermal = ThermalParams{1.0, 0.5};
  for (const auto& ens : {ground, thermal}) {
    auto r1 = lax_compatibility_residual(generic_b(), 2e-2, ens);
    auto r2 = lax_compatibility_residual(generic_b(), 1e-2, ens);
    INFO(r1.max() << " " << r2.max());
    CHECK(r1.max() / r2.max() > 3.5);
    for (int j = 1; j <= 4; ++j)
      for (int k = 1; k <= 4; ++k) CHECK(r2.coefficient[j - 1][k - 1][2] < 1e-12);
  }
  CHECK_THROWS_AS(lax_compatibility_residual(generic_b(), 0.0, ground), InvalidConfig);
}

TEST_CASE("invalid inputs") {
  FourPointConfig c = generic_a();
  c.y[2] = NAN;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  FourPointConfig d = generic_a();
  d.y[2] = d.y[1];
  d.t[2] = d.t[1];
  CHECK_THROWS_AS(EVectors(d, 1.0), DegenerateDelta);
  EVectors ev(generic_a(), 1.0);
  CHECK_THROWS_AS(ev.left(1.5), InvalidConfig);
  CHECK_THROWS_AS(AuxField(generic_a(), 3), InvalidConfig);
}
