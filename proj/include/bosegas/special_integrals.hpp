#pragma once
#include <complex>
#include <functional>
#include <vector>

#include "bosegas/errors.hpp"
#include "bosegas/quadrature.hpp"

namespace bosegas {

struct PhasePoint {
  double s = 0.0, x = 0.0, t = 0.0;
};

// Damping for conditionally convergent integrals and sums. The weight is
// (1 + x + x^2/2) exp(-x) with x = d s^2; its O(d) and O(d^2) terms vanish,
// so the bias is O(d^3) and halving d shrinks it eightfold.
struct RegularizationPolicy {
  double damping = 1e-2;
  int extrapolation_orders = 3;
  double tail_cut = 60.0;
  double consistency_tol = 1e-6;

  void validate() const;
  std::vector<double> schedule() const;  // damping, damping/2, ...
  double weight(double delta, double s2) const;
  double window(double delta) const;  // half-width where the weight is < 1e-18
};

// Result of a damped evaluation extrapolated to zero damping.
struct Extrapolated {
  cplx value = 0.0;
  std::vector<double> deltas;
  std::vector<cplx> estimates;
  double error_estimate = 0.0;
  // min over i of |R_i - R_{i-1}| / |R_{i+1} - R_i|; infinity when the
  // differences sit at roundoff
  double shrink_ratio = 0.0;
};

// Richardson table for an error expansion c3 d^3 + c4 d^4 + ... with d halved.
Extrapolated richardson(const std::vector<double>& deltas, const std::vector<cplx>& estimates);

cplx tau(double s, double x, double t);
inline cplx tau(const PhasePoint& p) { return tau(p.s, p.x, p.t); }

// (1/2pi) int exp(i t s^2 - i x s) ds
cplx gaussian_fresnel(double x, double t);

// Faddeeva w(z) = exp(-z^2) erfc(-iz)
cplx faddeeva(cplx z);
cplx erf_complex(cplx z);

// PV int exp(i t s^2 - i y s) / (s - lambda) ds. Entire in lambda, so the
// complex overload is the analytic continuation.
cplx pv_fresnel_hilbert(double lambda, double y, double t);
cplx pv_fresnel_hilbert(cplx lambda, double y, double t);
cplx pv_fresnel_hilbert_dlambda(cplx lambda, double y, double t);
// t = 0 and y = 0: the integral is the bare PV of 1/(s-lambda), value 0
inline bool pv_fresnel_hilbert_degenerate(double y, double t) { return y == 0.0 && t == 0.0; }

using RealFn = std::function<cplx(double)>;

// int_R f(s) ds with damping centred at `center`.
Extrapolated damped_integral(const RealFn& f, double center, const RegularizationPolicy& policy);
// PV int_R f(s)/(s-lambda) ds with damping centred at lambda.
Extrapolated damped_pv_integral(const RealFn& f, double lambda, const RegularizationPolicy& policy);
cplx pv_quadrature(const RealFn& f, double lambda, const RegularizationPolicy& policy);
// PV over a finite window, which must be symmetric about lambda.
cplx pv_window(const RealFn& f, double lambda, double a, double b, double tol = 1e-13);

enum class Lattice { Natural, Integer };

// (pi/L) sum_{s in (pi/L) lattice} g(s), damped and extrapolated.
Extrapolated regularized_lattice_sum(const RealFn& g, double L, Lattice lattice,
                                     const RegularizationPolicy& policy);

}  // namespace bosegas
