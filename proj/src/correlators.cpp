#include "bosegas/correlators.hpp"

#include <algorithm>
#include <cmath>

#include "bosegas/errors.hpp"
#include "bosegas/nls_system.hpp"
#include "bosegas/quadrature.hpp"

namespace bosegas {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I1(0.0, 1.0);

Quadrature concat(const Quadrature& a, const Quadrature& b) {
  Quadrature q = a;
  q.nodes.insert(q.nodes.end(), b.nodes.begin(), b.nodes.end());
  q.weights.insert(q.weights.end(), b.weights.begin(), b.weights.end());
  q.b = b.b;
  return q;
}

struct Spectral {
  Quadrature quad;
  std::vector<double> measure;
};

Spectral spectral_grid(const PhysicalPoint& pt, int n, double tol) {
  Spectral s;
  if (pt.ground()) {
    s.quad = build_grid(0.0, pt.fermi_momentum(), n);
  } else {
    s.quad = build_thermal_grid(pt.thermal, n, tol);
    for (double l : s.quad.nodes) s.measure.push_back(fermi_weight(l, pt.thermal));
  }
  return s;
}

CorrelationResult evaluate(const PhysicalPoint& pt, int n, double tol) {
  GeometryParams g{pt.x1, pt.x2, pt.t};
  BoundaryKind b = pt.boundary;
  double e = eps(b);
  Spectral sp = spectral_grid(pt, n, tol);
  auto op = assemble(sp.quad, [&](double l, double m) { return kernel_V(l, m, b, g); }, 2.0 / kPi,
                     sp.measure);
  auto rf = rank_one_factors(b, g);
  RankOnePerturbation pert;
  pert.sign = rf.sign;
  int m = sp.quad.size();
  pert.f.resize(m);
  pert.g.resize(m);
  for (int i = 0; i < m; ++i) {
    pert.f[i] = rf.f(sp.quad.nodes[i]);
    pert.g[i] = rf.g(sp.quad.nodes[i]);
  }
  auto dd = det_with_rank_one_derivative(op, pert);
  CorrelationResult r;
  r.det_part = dd.det;
  r.derivative_part = dd.alpha_derivative;
  r.g_part = gaussian_fresnel(pt.x1 - pt.x2, pt.t) + e * gaussian_fresnel(pt.x1 + pt.x2, pt.t);
  r.value = std::exp(-I1 * pt.thermal.h * pt.t) * (r.g_part * r.det_part + r.derivative_part / (2.0 * kPi));
  if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
    throw NumericalFailure("correlation: non-finite value on a grid of " + std::to_string(m) + " nodes");
  r.grid_size = m;
  r.truncation = sp.quad.b;
  return r;
}

CorrelationResult with_doubling(const PhysicalPoint& pt, const NumericsPolicy& num) {
  CorrelationResult r = evaluate(pt, num.n, num.truncation_tol);
  if (num.node_doubling) {
    CorrelationResult r2 = evaluate(pt, 2 * num.n, num.truncation_tol);
    r.error_estimate = std::abs(r2.value - r.value);
  }
  return r;
}

}  // namespace

void PhysicalPoint::validate() const {
  thermal.validate();
  if (!(x1 >= 0.0) || !(x2 >= 0.0) || !std::isfinite(x1) || !std::isfinite(x2))
    throw InvalidConfig("PhysicalPoint: positions must be finite and >= 0");
  if (!std::isfinite(t)) throw InvalidConfig("PhysicalPoint: t must be finite");
  if (ground() && !(D > 0.0)) throw InvalidConfig("PhysicalPoint: D must be positive at T = 0");
}

double PhysicalPoint::fermi_momentum() const { return kPi * D; }

void NumericsPolicy::validate() const {
  if (n < 2) throw InvalidGrid("NumericsPolicy: n must be >= 2");
  if (!(truncation_tol > 0.0 && truncation_tol < 1.0))
    throw InvalidConfig("NumericsPolicy: truncation tolerance must lie in (0, 1)");
}

double density_of_temperature(const ThermalParams& p) {
  p.validate();
  if (p.T == 0.0) return std::sqrt(std::max(p.h, 0.0)) / kPi;
  double Lam = thermal_cutoff(p);
  auto f = [&](double l) { return cplx(fermi_weight(l, p), 0.0); };
  double kf = p.h > 0.0 ? std::min(std::sqrt(p.h), Lam) : 0.0;
  double v = 0.0;
  if (kf > 0.0) v += integrate_adaptive(f, 0.0, kf, 1e-15).real();
  v += integrate_adaptive(f, kf, Lam, 1e-15).real();
  return v / kPi;
}

CorrelationResult correlation_ground(const PhysicalPoint& pt, const NumericsPolicy& num) {
  pt.validate();
  num.validate();
  if (!pt.ground()) throw InvalidConfig("correlation_ground: T must be 0");
  return with_doubling(pt, num);
}

CorrelationResult correlation_thermal(const PhysicalPoint& pt, const NumericsPolicy& num) {
  pt.validate();
  num.validate();
  if (pt.ground()) throw InvalidConfig("correlation_thermal: T must be positive");
  return with_doubling(pt, num);
}

CorrelationResult correlation(const PhysicalPoint& pt, const NumericsPolicy& num) {
  return pt.ground() ? correlation_ground(pt, num) : correlation_thermal(pt, num);
}

namespace {

BoundaryResult boundary_once(const PhysicalPoint& pt, int n, double tol) {
  double x = pt.x2;
  Spectral sp = spectral_grid(pt, n, tol);
  auto op = assemble(sp.quad, [x](double l, double m) { return cplx(kernel_W(l, m, x), 0.0); }, 2.0 / kPi,
                     sp.measure);
  NlsEnsemble ens;
  ens.thermal = pt.thermal;
  ens.D = pt.D;
  ens.n = n;
  BoundaryResult r;
  r.det_W = fredholm_det(op);
  r.b14 = build_b(FourPointConfig::correlation(0.0, x, pt.t), ens).b(0, 3);
  r.value = 2.0 * std::exp(-I1 * pt.thermal.h * pt.t) * r.det_W * r.b14;
  r.grid_size = sp.quad.size();
  return r;
}

StaticResult static_once(double x1, double x2, BoundaryKind e, const ThermalParams& p, StaticPath path,
                         int n) {
  auto theta = [e, p](double a, double b) { return cplx(kernel_theta(a, b, e, p), 0.0); };
  StaticResult r;
  if (path == StaticPath::Interval) {
    auto q = build_grid(-x1, x2, n);
    auto op = assemble(q, theta, 2.0 / kPi);
    auto m = fredholm_minor_first(op, x2, x1, theta);
    r.det = m.det;
    r.minor = m.minor;
    r.grid_size = q.size();
  } else {
    double lo = std::min(x1, x2), hi = std::max(x1, x2);
    int n1 = std::max(2, static_cast<int>(std::lround(n * (hi > 0 ? lo / hi : 0.5))));
    int n2 = std::max(2, n - n1);
    Quadrature q;
    if (lo > 0.0 && hi > lo) q = concat(build_grid(0.0, lo, n1), build_grid(lo, hi, n2));
    else q = build_grid(0.0, hi, n);
    auto kernel = [&](double a, double b) { return double(step_weight(x1, x2, b)) * theta(a, b); };
    // nodes sit strictly inside the pieces, so the step weight is constant on each
    auto op = assemble(q, kernel, 2.0 / kPi);
    // the column argument is the farther point, where the step weight is 1
    auto m = fredholm_minor_first(op, lo, hi, kernel);
    r.det = m.det;
    r.minor = m.minor;
    r.grid_size = q.size();
  }
  r.value = 0.5 * r.minor;
  return r;
}

StaticResult K_once(double x1, double x2, BoundaryKind e, double D, int n) {
  auto K = [e, D](double a, double b) { return cplx(kernel_K_static(a, b, e, D), 0.0); };
  auto q = x1 == x2 ? build_grid(x1, x2, 2) : build_grid(x1, x2, n);
  auto op = assemble(q, K, 2.0 / kPi);
  auto m = fredholm_minor_first(op, x2, x1, K);
  StaticResult r;
  r.det = m.det;
  r.minor = m.minor;
  r.grid_size = q.size();
  r.value = 0.5 * r.minor;
  return r;
}

}  // namespace

BoundaryResult correlation_boundary_neumann(const PhysicalPoint& pt, const NumericsPolicy& num) {
  pt.validate();
  num.validate();
  if (pt.x1 != 0.0) throw InvalidConfig("correlation_boundary_neumann: x1 must be 0");
  if (pt.boundary != BoundaryKind::Neumann) throw InvalidConfig("correlation_boundary_neumann: Neumann only");
  BoundaryResult r = boundary_once(pt, num.n, num.truncation_tol);
  if (num.node_doubling)
    r.error_estimate = std::abs(boundary_once(pt, 2 * num.n, num.truncation_tol).value - r.value);
  return r;
}

StaticResult correlation_static(double x1, double x2, BoundaryKind e, const ThermalParams& p,
                                StaticPath path, const NumericsPolicy& num) {
  p.validate();
  num.validate();
  if (!(x1 >= 0.0) || !(x2 >= 0.0)) throw InvalidConfig("correlation_static: positions must be >= 0");
  StaticResult r = static_once(x1, x2, e, p, path, num.n);
  if (num.node_doubling) r.error_estimate = std::abs(static_once(x1, x2, e, p, path, 2 * num.n).value - r.value);
  return r;
}

StaticResult static_ground_K(double x1, double x2, BoundaryKind e, double D, const NumericsPolicy& num) {
  num.validate();
  if (!(x1 >= 0.0) || x2 < x1) throw InvalidConfig("static_ground_K: need 0 <= x1 <= x2");
  if (!(D > 0.0)) throw InvalidConfig("static_ground_K: D must be positive");
  StaticResult r = K_once(x1, x2, e, D, num.n);
  if (num.node_doubling) r.error_estimate = std::abs(K_once(x1, x2, e, D, 2 * num.n).value - r.value);
  return r;
}

}  // namespace bosegas
