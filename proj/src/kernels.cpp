#include "bosegas/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bosegas {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);
}  // namespace

void ThermalParams::validate() const {
  if (!(h > 0.0)) throw std::invalid_argument("ThermalParams: h must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("ThermalParams: T must be non-negative");
}

double sinc_scaled(double x, double d) {
  double z = x * d;
  if (std::abs(z) < 1e-4) return x * (1.0 - z * z / 6.0 + z * z * z * z / 120.0);
  return std::sin(z) / d;
}

double fermi_weight(double lambda, const ThermalParams& p) {
  double e = lambda * lambda - p.h;
  if (p.T == 0.0) return e < 0 ? 1.0 : (e > 0 ? 0.0 : 0.5);
  double a = e / p.T;
  if (a > 0) {
    double q = std::exp(-a);
    return q / (1.0 + q);
  }
  return 1.0 / (1.0 + std::exp(a));
}

double thermal_cutoff(const ThermalParams& p, double tol, double c) {
  return std::sqrt(p.h + c * p.T * std::log(1.0 / tol));
}

namespace {

// PV int e^{its^2} sin((s-mu)x1) sin((s-lambda)x2) / (s-nu) ds
cplx sin_sin_pv(double nu, double lambda, double mu, const GeometryParams& g) {
  double a = g.x1 + g.x2, b = g.x1 - g.x2;
  double P = mu * g.x1 + lambda * g.x2, M = mu * g.x1 - lambda * g.x2;
  return -0.25 * (pv_fresnel_hilbert(nu, -a, g.t) * std::exp(-I * P) -
                  pv_fresnel_hilbert(nu, -b, g.t) * std::exp(-I * M) -
                  pv_fresnel_hilbert(nu, b, g.t) * std::exp(I * M) +
                  pv_fresnel_hilbert(nu, a, g.t) * std::exp(I * P));
}

}  // namespace

cplx kernel_L(double lambda, double mu, const GeometryParams& g) {
  if (lambda == mu) return kernel_L_diagonal(lambda, g);
  double d = lambda - mu, t = g.t;
  cplx brace = std::exp(I * (t * lambda * lambda)) * std::sin(g.x1 * d) +
               std::exp(I * (t * mu * mu)) * std::sin(g.x2 * d) +
               (2.0 / kPi) * (sin_sin_pv(mu, lambda, mu, g) - sin_sin_pv(lambda, lambda, mu, g));
  return std::exp(-0.5 * I * (t * (lambda * lambda + mu * mu))) * brace / d;
}

cplx kernel_L_diagonal(double lambda, const GeometryParams& g) {
  // int e^{its^2} sin(u x1) sin(u x2) / u^2 ds, u = s - lambda, written as
  // a combination of lambda-derivatives of the PV transform
  const double as[4] = {g.x1 + g.x2, g.x1 - g.x2, -(g.x1 - g.x2), -(g.x1 + g.x2)};
  const double cs[4] = {1.0, -1.0, -1.0, 1.0};
  cplx J2 = 0.0;
  for (int k = 0; k < 4; ++k)
    J2 += cs[k] * std::exp(-I * (as[k] * lambda)) * pv_fresnel_hilbert_dlambda(lambda, -as[k], g.t);
  J2 *= -0.25;
  return (g.x1 + g.x2) - (2.0 / kPi) * std::exp(-I * (g.t * lambda * lambda)) * J2;
}

cplx kernel_P(double lambda, double x1, double x2, double t) {
  cplx pv = (std::exp(-I * (x2 * lambda)) * pv_fresnel_hilbert(lambda, x1 - x2, t) -
             std::exp(I * (x2 * lambda)) * pv_fresnel_hilbert(lambda, x1 + x2, t)) /
            (2.0 * I);
  return std::exp(-0.5 * I * (t * lambda * lambda)) *
         (std::exp(tau(lambda, x1, t)) - (2.0 / kPi) * pv);
}

cplx kernel_V(double lambda, double mu, BoundaryKind e, const GeometryParams& g) {
  return kernel_L(lambda, mu, g) + eps(e) * kernel_L(lambda, -mu, g);
}

RankOneFactors rank_one_factors(BoundaryKind e, const GeometryParams& g) {
  double s = eps(e);
  RankOneFactors r;
  r.sign = s;
  r.f = [g, s](double l) { return kernel_P(l, g.x1, g.x2, g.t) + s * kernel_P(-l, g.x1, g.x2, g.t); };
  r.g = [g, s](double m) { return kernel_P(m, g.x2, g.x1, g.t) + s * kernel_P(-m, g.x2, g.x1, g.t); };
  return r;
}

double kernel_W(double lambda, double mu, double x) {
  return sinc_scaled(x, lambda - mu) + sinc_scaled(x, lambda + mu);
}

double kernel_theta(double xi, double eta, BoundaryKind e, const ThermalParams& p) {
  double s = eps(e);
  if (p.T == 0.0) {
    double q = std::sqrt(p.h);
    return sinc_scaled(q, xi - eta) + s * sinc_scaled(q, xi + eta);
  }
  double Lam = thermal_cutoff(p);
  double a = xi - eta, b = xi + eta;
  auto f = [&](double nu) {
    return cplx(fermi_weight(nu, p) * (std::cos(a * nu) + s * std::cos(b * nu)), 0.0);
  };
  // finer panels across the Fermi edge, oscillation-limited elsewhere
  double kf = std::sqrt(p.h);
  double edge = std::min(kf, 40.0 * p.T / kf);
  double osc = std::min(0.5, 2.0 / (std::abs(a) + std::abs(b) + 1e-300));
  double cuts[4] = {0.0, kf - edge, std::min(kf + edge, Lam), Lam};
  double widths[3] = {osc, std::min(osc, 2.0 * p.T / kf), osc};
  double total = 0.0;
  for (int k = 0; k < 3; ++k) {
    double len = cuts[k + 1] - cuts[k];
    if (len <= 0) continue;
    int panels = static_cast<int>(std::ceil(len / widths[k]));
    total += integrate_panels(f, cuts[k], cuts[k + 1], panels, 20).real();
  }
  return total;
}

double kernel_K_static(double xi, double eta, BoundaryKind e, double D) {
  return sinc_scaled(D, xi - eta) + eps(e) * sinc_scaled(D, xi + eta);
}

int step_weight(double y1, double y2, double xi) {
  return (y1 - xi >= 0 ? 1 : 0) + (y2 - xi >= 0 ? 1 : 0);
}

}  // namespace bosegas
