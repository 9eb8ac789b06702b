// Stated t = 0 simplifications and static minor formulas, checked as stated.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bosegas/correlators.hpp"
#include "bosegas/kernels.hpp"

using namespace bosegas;
using std::numbers::pi;
static const cplx I(0.0, 1.0);

TEST_CASE("kernel_L at t = 0 is [sin x1 d + sin x2 d]/d") {
  GeometryParams g{0.3, 0.7, 0.0};
  double worst = 0.0;
  for (double l : {0.2, 0.9, 1.7})
    for (double m : {0.1, 0.5, 1.3}) {
      double d = l - m;
      cplx claim = (std::sin(g.x1 * d) + std::sin(g.x2 * d)) / d;
      worst = std::max(worst, std::abs(kernel_L(l, m, g) - claim));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("kernel_P at t = 0 is exp(-i x1 lambda)") {
  double worst = 0.0;
  for (double l : {0.2, 0.9, 1.7})
    worst = std::max(worst, std::abs(kernel_P(l, 0.3, 0.7, 0.0) - std::exp(-I * 0.3 * l)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("rank-one factor at t = 0 is exp(-i x1 lambda) + eps exp(i x1 lambda)") {
  double worst = 0.0;
  for (auto b : {BoundaryKind::Neumann, BoundaryKind::Dirichlet}) {
    auto rf = rank_one_factors(b, GeometryParams{0.3, 0.7, 0.0});
    for (double l : {0.2, 0.9, 1.7})
      worst = std::max(worst, std::abs(rf.f(l) - (std::exp(-I * 0.3 * l) + eps(b) * std::exp(I * 0.3 * l))));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("thermal correlation tends to the static minor as t -> 0") {
  ThermalParams p{1.0, 0.3};
  for (auto b : {BoundaryKind::Neumann, BoundaryKind::Dirichlet}) {
    cplx st = correlation_static(0.3, 0.9, b, p).value;
    double prev = 1e300;
    for (int k = 2; k <= 4; ++k) {
      PhysicalPoint pt{0.3, 0.9, std::pow(10.0, -k), b, p, 1.0};
      double err = std::abs(correlation_thermal(pt).value - st);
      MESSAGE("eps " << eps(b) << " t=1e-" << k << " |thermal - static| = " << err);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 1e-4);
  }
}

TEST_CASE("static minor at T -> 0 coincides with the sine-kernel minor at D = sqrt(h)/pi") {
  double h = 1.0;
  for (auto b : {BoundaryKind::Neumann, BoundaryKind::Dirichlet}) {
    cplx a = correlation_static(0.3, 0.9, b, ThermalParams{h, 0.0}).value;
    cplx k = static_ground_K(0.3, 0.9, b, std::sqrt(h) / pi).value;
    MESSAGE("eps " << eps(b) << " static " << a.real() << " sine-kernel " << k.real());
    CHECK(std::abs(a - k) <= 1e-8);
  }
}
