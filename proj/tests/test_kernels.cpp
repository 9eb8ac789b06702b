#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bosegas/kernels.hpp"

using namespace bosegas;
using std::numbers::pi;
static const cplx I(0.0, 1.0);

namespace {

// Neville extrapolation to h = 0 of samples f(h_k)
template <class T>
T extrapolate_zero(const std::vector<double>& h, std::vector<T> v) {
  for (size_t m = 1; m < v.size(); ++m)
    for (size_t i = v.size() - 1; i >= m; --i)
      v[i] = (h[i - m] * v[i] - h[i] * v[i - 1]) / (h[i - m] - h[i]);
  return v.back();
}

std::vector<double> offsets() { return {1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4}; }

// L with the PV bracket rewritten as a regular integral, damped
cplx L_oracle(double lam, double mu, const GeometryParams& g) {
  RegularizationPolicy pol;
  double d = lam - mu;
  auto f = [&](double s) {
    return std::exp(I * (g.t * s * s)) * sinc_scaled(g.x1, s - mu) * sinc_scaled(g.x2, s - lam);
  };
  cplx integral = damped_integral(f, 0.5 * (lam + mu), pol).value;
  cplx brace = std::exp(I * (g.t * lam * lam)) * std::sin(g.x1 * d) +
               std::exp(I * (g.t * mu * mu)) * std::sin(g.x2 * d) + (2.0 / pi) * (-d) * integral;
  return std::exp(-0.5 * I * (g.t * (lam * lam + mu * mu))) * brace / d;
}

cplx P_oracle(double lam, double x1, double x2, double t) {
  RegularizationPolicy pol;
  auto f = [&](double s) { return std::exp(tau(s, x1, t)) * sinc_scaled(x2, s - lam); };
  cplx integral = damped_integral(f, lam, pol).value;
  return std::exp(-0.5 * I * (t * lam * lam)) * (std::exp(tau(lam, x1, t)) - (2.0 / pi) * integral);
}

double sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

TEST_CASE("fermi_weight") {
  ThermalParams p{2.0, 0.3};
  CHECK(fermi_weight(std::sqrt(2.0), p) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fermi_weight(0.0, ThermalParams{1.0, 1.0}) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
  CHECK(fermi_weight(0.5, ThermalParams{1.0, 0.0}) == 1.0);
  CHECK(fermi_weight(1.0, ThermalParams{1.0, 0.0}) == 0.5);
  CHECK(fermi_weight(1.5, ThermalParams{1.0, 0.0}) == 0.0);
  double prev = 2.0;
  for (int k = 0; k <= 200; ++k) {
    double l = 0.02 * k, v = fermi_weight(l, ThermalParams{1.0, 0.7});
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("kernel_L matches the direct damped integral") {
  GeometryParams gs[] = {{0.3, 0.7, 0.5}, {0.9, 0.2, -0.8}, {0.5, 1.0, 1.3}};
  for (auto& g : gs)
    for (auto [l, m] : {std::pair{0.4, 1.1}, std::pair{-0.7, 0.2}, std::pair{1.5, -1.3}}) {
      CAPTURE(l);
      CAPTURE(m);
      cplx a = kernel_L(l, m, g), b = L_oracle(l, m, g);
      CHECK(std::abs(a - b) <= 1e-8 * (1 + std::abs(a)));
    }
}

TEST_CASE("kernel_L boundary-point specialization x1 = 0") {
  GeometryParams g{0.0, 1.3, 0.7};
  for (auto [l, m] : {std::pair{0.4, 1.1}, std::pair{-0.7, 0.2}, std::pair{1.5, 1.5}}) {
    double d = l - m;
    cplx expect = std::exp(0.5 * I * (g.t * (m * m - l * l))) * sinc_scaled(g.x2, d);
    CHECK(std::abs(kernel_L(l, m, g) - expect) < 1e-12);
  }
}

TEST_CASE("kernel_L reflection identity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  GeometryParams gs[] = {{0.3, 0.7, 0.5}, {1.1, 0.4, -0.9}, {0.6, 0.6, 1.7}};
  double worst = 0;
  for (auto& g : gs)
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        double l = u(rng), m = u(rng);
        worst = std::max(worst, std::abs(kernel_L(l, -m, g) - kernel_L(-l, m, g)));
      }
  CHECK(worst <= 1e-10);
}

TEST_CASE("kernel_L diagonal equals offset limit") {
  GeometryParams gs[] = {{0.3, 0.7, 0.5}, {1.1, 0.4, -0.9}, {0.6, 0.6, 0.0}, {0.8, 0.3, 0.0}};
  for (auto& g : gs)
    for (double l : {0.0, 0.45, -1.2}) {
      std::vector<cplx> v;
      for (double h : offsets()) v.push_back(kernel_L(l, l + h, g));
      cplx lim = extrapolate_zero(offsets(), v);
      CHECK(std::abs(lim - kernel_L_diagonal(l, g)) < 1e-8);
      CHECK(kernel_L(l, l, g) == kernel_L_diagonal(l, g));
    }
}

TEST_CASE("kernel_L at t = 0 from the definition") {
  // the PV bracket evaluates by Dirichlet integrals to an interval kernel
  GeometryParams gs[] = {{0.3, 0.9, 0.0}, {1.2, 0.5, 0.0}, {0.0, 0.7, 0.0}};
  for (auto& g : gs)
    for (auto [l, m] : {std::pair{0.4, 1.1}, std::pair{-0.7, 0.2}, std::pair{2.0, 0.1}}) {
      double d = l - m;
      double expect = (g.x1 == 0.0 ? 1.0 : sgn(g.x1 - g.x2)) * (std::sin(g.x1 * d) - std::sin(g.x2 * d)) / d;
      if (g.x1 == 0.0) expect = std::sin(g.x2 * d) / d;
      CHECK(std::abs(kernel_L(l, m, g) - expect) < 1e-12);
    }
}

TEST_CASE("kernel_P") {
  // reflection
  for (double l : {0.3, -1.4})
    for (double t : {0.0, 0.6, -1.1})
      CHECK(std::abs(kernel_P(-l, 0.4, 0.9, t) - kernel_P(l, -0.4, 0.9, t)) < 1e-12);
  // generic value against the damped integral of the definition
  cplx v = kernel_P(1.0, 0.3, 0.7, 0.5);
  CHECK(std::abs(v - P_oracle(1.0, 0.3, 0.7, 0.5)) < 1e-8);
  CHECK(std::abs(kernel_P(-0.6, 1.1, 0.2, -0.9) - P_oracle(-0.6, 1.1, 0.2, -0.9)) < 1e-8);
  // t = 0 from the definition: sgn(x1 - x2) e^{-i x1 lambda}
  for (double l : {0.2, 1.7}) {
    CHECK(std::abs(kernel_P(l, 0.3, 0.9, 0.0) + std::exp(-I * (0.3 * l))) < 1e-12);
    CHECK(std::abs(kernel_P(l, 0.9, 0.3, 0.0) - std::exp(-I * (0.9 * l))) < 1e-12);
  }
}

TEST_CASE("kernel_V and rank-one factors") {
  GeometryParams g{0.4, 1.1, 0.6};
  CHECK(std::abs(kernel_V(0, 0, BoundaryKind::Neumann, g) - 2.0 * kernel_L(0, 0, g)) < 1e-15);
  CHECK(std::abs(kernel_V(0.7, 0, BoundaryKind::Dirichlet, g)) < 1e-15);
  auto rd = rank_one_factors(BoundaryKind::Dirichlet, g);
  CHECK(std::abs(rd.f(0.0)) < 1e-14);
  auto rn = rank_one_factors(BoundaryKind::Neumann, g);
  double l = 0.3, m = 1.2, mp = -0.4, lp = 0.9;
  CHECK(std::abs(rn(l, m) * rn(mp, lp) - rn(l, lp) * rn(mp, m)) < 1e-12);
  // t = 0: f(lambda) = sgn(x1 - x2)(e^{-i x1 lambda} + eps e^{i x1 lambda})
  GeometryParams g0{0.4, 1.1, 0.0};
  for (auto b : {BoundaryKind::Neumann, BoundaryKind::Dirichlet}) {
    auto r = rank_one_factors(b, g0);
    double e = eps(b);
    cplx expect = -(std::exp(-I * (0.4 * l)) + e * std::exp(I * (0.4 * l)));
    CHECK(std::abs(r.f(l) - expect) < 1e-12);
  }
}

TEST_CASE("kernel_W") {
  CHECK(kernel_W(0.3, 0.8, 0.0) == 0.0);
  CHECK(kernel_W(0.6, 0.6, 1.3) == doctest::Approx(1.3 + std::sin(2 * 1.3 * 0.6) / (2 * 0.6)).epsilon(1e-14));
  CHECK(kernel_W(0.0, 0.0, 1.3) == doctest::Approx(2.6).epsilon(1e-15));
  CHECK(kernel_W(0.2, 1.7, 0.9) == kernel_W(1.7, 0.2, 0.9));
  for (double l : {0.3, 1.1}) {
    std::vector<double> v;
    for (double h : offsets()) v.push_back(kernel_W(l, l + h, 1.3));
    CHECK(std::abs(extrapolate_zero(offsets(), v) - kernel_W(l, l, 1.3)) < 1e-8);
  }
}

TEST_CASE("kernel_theta") {
  ThermalParams p0{1.7, 0.0};
  double q = std::sqrt(1.7);
  for (double xi : {0.3, 1.4}) {
    CHECK(kernel_theta(xi, xi, BoundaryKind::Neumann, p0) ==
          doctest::Approx(q + std::sin(2 * q * xi) / (2 * xi)).epsilon(1e-14));
    // closed form against quadrature of the nu-integral over the Fermi sphere
    for (double eta : {0.1, 0.9}) {
      auto f = [&](double nu) { return cplx(std::cos((xi - eta) * nu) + std::cos((xi + eta) * nu)); };
      double num = integrate_panels(f, 0.0, q, 8, 20).real();
      CHECK(std::abs(num - kernel_theta(xi, eta, BoundaryKind::Neumann, p0)) < 1e-13);
    }
  }
  ThermalParams p{1.0, 0.4};
  CHECK(std::abs(kernel_theta(0, 0, BoundaryKind::Dirichlet, p)) < 1e-15);
  CHECK(kernel_theta(0.3, 1.2, BoundaryKind::Neumann, p) == kernel_theta(1.2, 0.3, BoundaryKind::Neumann, p));
  // thermal value against adaptive integration
  double xi = 0.7, eta = 0.2;
  auto f = [&](double nu) {
    return cplx(fermi_weight(nu, p) * (std::cos((xi - eta) * nu) - std::cos((xi + eta) * nu)));
  };
  double ref = integrate_adaptive(f, 0.0, 12.0, 1e-15).real();
  CHECK(std::abs(ref - kernel_theta(xi, eta, BoundaryKind::Dirichlet, p)) < 1e-12);
  // small temperature is close to the ground state
  ThermalParams pc{1.0, 1e-4};
  CHECK(std::abs(kernel_theta(xi, eta, BoundaryKind::Neumann, pc) -
                 kernel_theta(xi, eta, BoundaryKind::Neumann, ThermalParams{1.0, 0.0})) < 1e-6);
}

TEST_CASE("kernel_K_static") {
  ThermalParams p0{2.3, 0.0};
  double D = std::sqrt(2.3);
  double worst = 0;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      for (auto b : {BoundaryKind::Neumann, BoundaryKind::Dirichlet}) {
        double xi = 0.25 * i, eta = 0.25 * j;
        worst = std::max(worst, std::abs(kernel_K_static(xi, eta, b, D) - kernel_theta(xi, eta, b, p0)));
      }
  CHECK(worst <= 1e-10);
  CHECK(std::abs(kernel_K_static(0.4, 0.9, BoundaryKind::Neumann, 1e-12)) < 1e-11);
  double xi = 0.8, d = 1.3;
  std::vector<double> v;
  for (double h : offsets()) v.push_back(kernel_K_static(xi, -xi + h, BoundaryKind::Dirichlet, d));
  double lim = extrapolate_zero(offsets(), v);
  CHECK(std::abs(lim - (std::sin(2 * d * xi) / (2 * xi) - d)) < 1e-8);
  CHECK(std::abs(kernel_K_static(xi, -xi, BoundaryKind::Dirichlet, d) - lim) < 1e-8);
}

TEST_CASE("step_weight") {
  CHECK(step_weight(0.5, 0.9, 0.2) == 2);
  CHECK(step_weight(0.5, 0.9, 1.2) == 0);
  CHECK(step_weight(0.5, 0.9, 0.5) == 2);
  CHECK(step_weight(0.5, 0.9, 0.7) == 1);
}
