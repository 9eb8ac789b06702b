#include "bosegas/special_integrals.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bosegas {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

double sgn(double v) { return (v > 0) - (v < 0); }
}  // namespace

void RegularizationPolicy::validate() const {
  if (!(damping > 0.0) || !std::isfinite(damping))
    throw std::invalid_argument("RegularizationPolicy: damping must be positive");
  if (!(tail_cut > 0.0)) throw std::invalid_argument("RegularizationPolicy: tail_cut must be positive");
  if (extrapolation_orders < 1)
    throw std::invalid_argument("RegularizationPolicy: extrapolation_orders must be >= 1");
}

std::vector<double> RegularizationPolicy::schedule() const {
  std::vector<double> d;
  double v = damping;
  for (int k = 0; k < extrapolation_orders; ++k, v *= 0.5) d.push_back(v);
  return d;
}

double RegularizationPolicy::weight(double delta, double s2) const {
  double x = delta * s2;
  return (1.0 + x + 0.5 * x * x) * std::exp(-x);
}

double RegularizationPolicy::window(double delta) const {
  return std::max(tail_cut, std::sqrt(50.0 / delta));
}

Extrapolated richardson(const std::vector<double>& deltas, const std::vector<cplx>& est) {
  Extrapolated r;
  r.deltas = deltas;
  r.estimates = est;
  const size_t m = est.size();
  if (m == 0) return r;
  std::vector<cplx> col = est;
  cplx prev_diag = col[m - 1];
  r.value = col[m - 1];
  for (size_t j = 1; j < m; ++j) {
    double f = std::pow(2.0, j + 2);
    std::vector<cplx> next(m - j);
    for (size_t i = 0; i < m - j; ++i) next[i] = (f * col[i + 1] - col[i]) / (f - 1.0);
    prev_diag = r.value;
    r.value = next.back();
    col = std::move(next);
  }
  r.error_estimate = m > 1 ? std::abs(r.value - prev_diag) : 0.0;
  double floor = 1e-13 * (1.0 + std::abs(r.value));
  r.shrink_ratio = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i + 1 < m; ++i) {
    double d0 = std::abs(est[i] - est[i - 1]), d1 = std::abs(est[i + 1] - est[i]);
    if (d1 <= floor) continue;
    r.shrink_ratio = std::min(r.shrink_ratio, d0 / d1);
  }
  return r;
}

cplx tau(double s, double x, double t) { return cplx(0.0, t * s * s - x * s); }

cplx gaussian_fresnel(double x, double t) {
  if (t == 0.0) {
    if (x == 0.0) throw DegenerateDelta("gaussian_fresnel: t=0, x=0 is a delta function");
    return 0.0;
  }
  double sigma = sgn(t);
  cplx phase = std::exp(I * (sigma * kPi / 4.0 - x * x / (4.0 * t)));
  return std::sqrt(kPi / std::abs(t)) / (2.0 * kPi) * phase;
}

cplx pv_fresnel_hilbert(double lambda, double y, double t) {
  return pv_fresnel_hilbert(cplx(lambda, 0.0), y, t);
}

cplx pv_fresnel_hilbert(cplx lambda, double y, double t) {
  if (t == 0.0) {
    if (y == 0.0) return 0.0;
    return I * kPi * (-sgn(y)) * std::exp(-I * y * lambda);
  }
  double sigma = sgn(t);
  cplx phase0 = std::exp(I * (t * lambda * lambda - y * lambda));
  cplx c = std::exp(-I * (y * y / (4.0 * t)));
  cplx z = std::exp(I * (sigma * kPi / 4.0)) * (2.0 * t * lambda - y) / (2.0 * std::sqrt(std::abs(t)));
  if (z.real() >= 0.0) return I * kPi * (phase0 - c * faddeeva(I * z));
  return I * kPi * (c * faddeeva(-I * z) - phase0);
}

cplx pv_fresnel_hilbert_dlambda(cplx lambda, double y, double t) {
  cplx H = pv_fresnel_hilbert(lambda, y, t);
  cplx dphi = I * (2.0 * t * lambda - y);
  if (t == 0.0) return dphi * H;
  double sigma = sgn(t);
  cplx c = std::exp(-I * (y * y / (4.0 * t)));
  return dphi * H + 2.0 * I * std::sqrt(kPi) * c * std::exp(I * (sigma * kPi / 4.0)) * sigma *
                        std::sqrt(std::abs(t));
}

namespace {

// Nodes, weights and values of g on an adaptive Gauss-Legendre partition of
// [a,b]. The damping weight is smooth on the scale of the partition, so one
// partition of the undamped integrand serves every damping value.
struct Sampled {
  std::vector<double> u, w;
  std::vector<cplx> g;
};

void refine(const RealFn& g, double a, double b, const cplx whole[20], double tol, int depth,
            Sampled& out) {
  const GLRule& r = gauss_legendre(20);
  double m = 0.5 * (a + b), h = 0.25 * (b - a);
  cplx left[20], right[20];
  cplx sl = 0.0, sr = 0.0, sw = 0.0;
  for (int i = 0; i < 20; ++i) {
    left[i] = g(0.5 * (a + m) + h * r.x[i]);
    right[i] = g(0.5 * (m + b) + h * r.x[i]);
    sl += r.w[i] * left[i];
    sr += r.w[i] * right[i];
    sw += r.w[i] * whole[i];
  }
  cplx both = h * (sl + sr);
  if (depth <= 0 || std::abs(both - 2.0 * h * sw) <= tol * (b - a)) {
    for (int i = 0; i < 20; ++i) {
      out.u.push_back(0.5 * (a + m) + h * r.x[i]);
      out.w.push_back(h * r.w[i]);
      out.g.push_back(left[i]);
    }
    for (int i = 0; i < 20; ++i) {
      out.u.push_back(0.5 * (m + b) + h * r.x[i]);
      out.w.push_back(h * r.w[i]);
      out.g.push_back(right[i]);
    }
    return;
  }
  refine(g, a, m, left, tol, depth - 1, out);
  refine(g, m, b, right, tol, depth - 1, out);
}

Sampled sample(const RealFn& g, double a, double b, double tol) {
  Sampled out;
  const GLRule& r = gauss_legendre(20);
  int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h, hi = lo + h;
    cplx whole[20];
    for (int i = 0; i < 20; ++i) whole[i] = g(0.5 * (lo + hi) + 0.5 * h * r.x[i]);
    refine(g, lo, hi, whole, tol, 9, out);
  }
  return out;
}

Extrapolated damp_sampled(const Sampled& s, const RegularizationPolicy& policy) {
  auto deltas = policy.schedule();
  std::vector<cplx> est;
  for (double d : deltas) {
    double W = policy.window(d);
    cplx acc = 0.0;
    for (size_t i = 0; i < s.u.size(); ++i)
      if (s.u[i] <= W) acc += s.w[i] * policy.weight(d, s.u[i] * s.u[i]) * s.g[i];
    est.push_back(acc);
  }
  return richardson(deltas, est);
}

}  // namespace

Extrapolated damped_integral(const RealFn& f, double center, const RegularizationPolicy& policy) {
  policy.validate();
  double W = policy.window(policy.schedule().back());
  auto g = [&](double u) { return f(center + u) + f(center - u); };
  return damp_sampled(sample(g, 0.0, W, 1e-13), policy);
}

namespace {
void check_pv_point(const RealFn& f, double lambda) {
  cplx f0 = f(lambda);
  if (!std::isfinite(f0.real()) || !std::isfinite(f0.imag()))
    throw InvalidIntegrand("pv: f(lambda) is not finite");
}
}  // namespace

cplx pv_window(const RealFn& f, double lambda, double a, double b, double tol) {
  double left = lambda - a, right = b - lambda;
  if (!(left > 0.0) || std::abs(left - right) > 1e-12 * std::max(1.0, std::abs(left)))
    throw InvalidIntegrand("pv_window: window not symmetric about lambda");
  check_pv_point(f, lambda);
  auto g = [&](double u) { return (f(lambda + u) - f(lambda - u)) / u; };
  Sampled s = sample(g, 0.0, left, tol);
  cplx acc = 0.0;
  for (size_t i = 0; i < s.u.size(); ++i) acc += s.w[i] * s.g[i];
  return acc;
}

Extrapolated damped_pv_integral(const RealFn& f, double lambda, const RegularizationPolicy& policy) {
  policy.validate();
  check_pv_point(f, lambda);
  double W = policy.window(policy.schedule().back());
  auto g = [&](double u) { return (f(lambda + u) - f(lambda - u)) / u; };
  return damp_sampled(sample(g, 0.0, W, 1e-13), policy);
}

cplx pv_quadrature(const RealFn& f, double lambda, const RegularizationPolicy& policy) {
  return damped_pv_integral(f, lambda, policy).value;
}

Extrapolated regularized_lattice_sum(const RealFn& g, double L, Lattice lattice,
                                     const RegularizationPolicy& policy) {
  policy.validate();
  if (!(L > 0.0)) throw std::invalid_argument("regularized_lattice_sum: L must be positive");
  auto deltas = policy.schedule();
  double step = kPi / L;
  double lam = policy.window(deltas.back());
  long nmax = static_cast<long>(std::floor(lam / step));
  // evaluate the summand once; the damping only reweights
  std::vector<cplx> vals;
  std::vector<double> s2;
  long nmin = lattice == Lattice::Natural ? 0 : -nmax;
  for (long n = nmin; n <= nmax; ++n) {
    double s = n * step;
    vals.push_back(g(s));
    s2.push_back(s * s);
  }
  std::vector<cplx> est;
  for (double d : deltas) {
    cplx acc = 0.0;
    for (size_t i = 0; i < vals.size(); ++i) acc += vals[i] * policy.weight(d, s2[i]);
    est.push_back(step * acc);
  }
  Extrapolated r = richardson(deltas, est);
  if (r.error_estimate > policy.consistency_tol * (1.0 + std::abs(r.value)))
    throw ConvergenceFailure("regularized_lattice_sum: extrapolation inconsistent",
                             {r.error_estimate});
  return r;
}

}  // namespace bosegas
