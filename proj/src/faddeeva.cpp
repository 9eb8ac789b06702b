#include <array>
#include <cmath>
#include <numbers>

#include "bosegas/special_integrals.hpp"

namespace bosegas {

namespace {

constexpr int kN = 40;

// Weideman's rational expansion coefficients, a_1..a_N.
struct WeidemanCoeffs {
  std::array<double, kN + 1> a{};
  double L = 0.0;
  WeidemanCoeffs() {
    const int M = 2 * kN, n = 2 * M;
    L = std::sqrt(kN / std::sqrt(2.0));
    std::array<double, 2 * 2 * kN> f{};
    f[0] = 0.0;
    for (int k = -M + 1; k <= M - 1; ++k) {
      double theta = k * std::numbers::pi / M;
      double t = L * std::tan(theta / 2);
      f[k + M] = std::exp(-t * t) * (L * L + t * t);
    }
    std::array<double, 2 * 2 * kN> g{};
    for (int i = 0; i < n; ++i) g[i] = f[(i + n / 2) % n];
    for (int j = 1; j <= kN; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += g[m] * std::cos(2.0 * std::numbers::pi * j * m / n);
      a[j] = s / n;
    }
  }
};

const WeidemanCoeffs& coeffs() {
  static const WeidemanCoeffs c;
  return c;
}

cplx w_upper(cplx z) {
  const cplx I(0.0, 1.0);
  if (std::abs(z) > 6.0) {
    // Laplace continued fraction, backward evaluation
    cplx r = 0.0;
    for (int k = 40; k >= 1; --k) r = (0.5 * k) / (z - r);
    return I / std::sqrt(std::numbers::pi) / (z - r);
  }
  const auto& c = coeffs();
  cplx Z = (c.L + I * z) / (c.L - I * z);
  cplx p = 0.0;
  for (int j = kN; j >= 1; --j) p = p * Z + c.a[j];
  cplx d = c.L - I * z;
  return 2.0 * p / (d * d) + (1.0 / std::sqrt(std::numbers::pi)) / d;
}

}  // namespace

cplx faddeeva(cplx z) {
  if (z.imag() >= 0.0) return w_upper(z);
  return 2.0 * std::exp(-z * z) - w_upper(-z);
}

cplx erf_complex(cplx z) {
  const cplx I(0.0, 1.0);
  // erfc(z) = exp(-z^2) w(iz); use the half-plane where w(iz) is evaluated directly
  if (z.real() >= 0.0) return 1.0 - std::exp(-z * z) * w_upper(I * z);
  return std::exp(-z * z) * w_upper(-I * z) - 1.0;
}

}  // namespace bosegas
