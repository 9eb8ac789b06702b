#pragma once
#include <complex>
#include <functional>

#include "bosegas/special_integrals.hpp"

namespace bosegas {

enum class BoundaryKind { Neumann = 1, Dirichlet = -1 };
inline double eps(BoundaryKind b) { return b == BoundaryKind::Neumann ? 1.0 : -1.0; }

struct ThermalParams {
  double h = 1.0;
  double T = 0.0;
  void validate() const;
};

struct GeometryParams {
  double x1 = 0.0, x2 = 0.0, t = 0.0;
};

// sin(x d)/d with the value x at d = 0
double sinc_scaled(double x, double d);

double fermi_weight(double lambda, const ThermalParams& p);

// Upper end of the thermal spectral domain: theta(Lambda) ~ tol.
double thermal_cutoff(const ThermalParams& p, double tol = 1e-14, double c = 1.0);

cplx kernel_L(double lambda, double mu, const GeometryParams& g);
cplx kernel_L_diagonal(double lambda, const GeometryParams& g);

cplx kernel_P(double lambda, double x1, double x2, double t);

cplx kernel_V(double lambda, double mu, BoundaryKind e, const GeometryParams& g);

// A_eps(lambda, mu) = eps * f(lambda) * g(mu)
struct RankOneFactors {
  std::function<cplx(double)> f, g;
  double sign = 1.0;
  cplx operator()(double lambda, double mu) const { return sign * f(lambda) * g(mu); }
};
RankOneFactors rank_one_factors(BoundaryKind e, const GeometryParams& g);

double kernel_W(double lambda, double mu, double x);

double kernel_theta(double xi, double eta, BoundaryKind e, const ThermalParams& p);

double kernel_K_static(double xi, double eta, BoundaryKind e, double D);

int step_weight(double y1, double y2, double xi);

}  // namespace bosegas
