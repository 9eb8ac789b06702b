#pragma once
#include <complex>

#include "bosegas/fredholm.hpp"
#include "bosegas/kernels.hpp"

namespace bosegas {

struct PhysicalPoint {
  double x1 = 0.0, x2 = 0.0, t = 0.0;
  BoundaryKind boundary = BoundaryKind::Neumann;
  ThermalParams thermal;  // T = 0 selects the ground state at density D
  double D = 1.0;
  void validate() const;
  bool ground() const { return thermal.T == 0.0; }
  double fermi_momentum() const;  // pi D at T = 0
};

struct NumericsPolicy {
  int n = 64;
  double truncation_tol = 1e-14;
  bool node_doubling = true;
  void validate() const;
};

struct CorrelationResult {
  cplx value = 0.0;
  cplx det_part = 0.0;         // det(1 - (2/pi) V)
  cplx derivative_part = 0.0;  // d/dalpha det(1 - (2/pi) V - alpha A) at 0
  cplx g_part = 0.0;           // G(x1 - x2) + eps G(x1 + x2)
  int grid_size = 0;
  double truncation = 0.0;     // upper end of the spectral domain
  double error_estimate = 0.0; // change under node doubling
};

double density_of_temperature(const ThermalParams& p);

CorrelationResult correlation_ground(const PhysicalPoint& pt, const NumericsPolicy& num = {});
CorrelationResult correlation_thermal(const PhysicalPoint& pt, const NumericsPolicy& num = {});
// Dispatches on pt.ground().
CorrelationResult correlation(const PhysicalPoint& pt, const NumericsPolicy& num = {});

struct BoundaryResult {
  cplx value = 0.0;
  cplx det_W = 0.0;  // det(1 - (2/pi) W), t-independent
  cplx b14 = 0.0;    // b_{1,4}(0, 0, -x, x; 0, 0, t, t)
  int grid_size = 0;
  double error_estimate = 0.0;
};

// <psi(0,0) psi^dag(x,t)> for Neumann boundaries through the integrable
// system; requires x1 = 0 and x = x2.
BoundaryResult correlation_boundary_neumann(const PhysicalPoint& pt, const NumericsPolicy& num = {});

enum class StaticPath {
  Interval,    // Delta equation on [-x1, x2]
  StepWeight,  // step-weighted theta operator on [0, max(x1, x2)]
};

struct StaticResult {
  cplx value = 0.0;
  cplx det = 0.0;
  cplx minor = 0.0;
  int grid_size = 0;
  double error_estimate = 0.0;
};

StaticResult correlation_static(double x1, double x2, BoundaryKind e, const ThermalParams& p,
                                StaticPath path = StaticPath::Interval, const NumericsPolicy& num = {});

StaticResult static_ground_K(double x1, double x2, BoundaryKind e, double D, const NumericsPolicy& num = {});

}  // namespace bosegas
