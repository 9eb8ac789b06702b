#include "bosegas/fredholm.hpp"

#include <algorithm>
#include <cmath>

#include "bosegas/errors.hpp"

namespace bosegas {

namespace {

bool finite(const CMat& m) { return m.allFinite(); }

void check_finite(const DiscretizedOperator& op) {
  if (!finite(op.matrix)) throw NumericalFailure("fredholm: non-finite kernel matrix entries");
}

constexpr double kCondLimit = 1e12;

}  // namespace

Quadrature build_grid(double a, double b, int n) {
  if (n < 2) throw InvalidGrid("build_grid: n must be at least 2");
  if (!(b >= a)) throw InvalidGrid("build_grid: empty or reversed interval");
  Quadrature q;
  q.a = a;
  q.b = b;
  if (a == b) return q;
  const GLRule& r = gauss_legendre(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(c + h * r.x[i]);
    q.weights.push_back(h * r.w[i]);
  }
  return q;
}

Quadrature build_thermal_grid(const ThermalParams& p, int n, double tol, double c) {
  if (n < 2) throw InvalidGrid("build_thermal_grid: n must be at least 2");
  p.validate();
  double kf = std::sqrt(p.h);
  Quadrature q;
  if (p.T == 0.0) {
    q = build_grid(0.0, kf, n);
    return q;
  }
  double Lam = thermal_cutoff(p, tol, c);
  // nodes in proportion to segment length; the Fermi-weight poles sit near kf on both sides
  int n_in = std::clamp(static_cast<int>(std::lround(n * kf / Lam)), std::max(2, n / 4), std::max(2, n - n / 4));
  int n_out = std::max(2, n - n_in);
  Quadrature lo = build_grid(0.0, kf, n_in), hi = build_grid(kf, Lam, n_out);
  q.a = 0.0;
  q.b = Lam;
  q.truncated = true;
  q.nodes = lo.nodes;
  q.weights = lo.weights;
  q.nodes.insert(q.nodes.end(), hi.nodes.begin(), hi.nodes.end());
  q.weights.insert(q.weights.end(), hi.weights.begin(), hi.weights.end());
  // int_Lam^inf theta <= T/(2 Lam) exp(-(Lam^2 - h)/T)
  q.tail_bound = p.T / (2.0 * Lam) * std::exp(-(Lam * Lam - p.h) / p.T);
  return q;
}

Quadrature mirror_grid(const Quadrature& half) {
  Quadrature q;
  int n = half.size();
  q.a = -half.b;
  q.b = half.b;
  q.truncated = half.truncated;
  q.tail_bound = 2.0 * half.tail_bound;
  for (int i = n - 1; i >= 0; --i) {
    q.nodes.push_back(-half.nodes[i]);
    q.weights.push_back(half.weights[i]);
  }
  for (int i = 0; i < n; ++i) {
    q.nodes.push_back(half.nodes[i]);
    q.weights.push_back(half.weights[i]);
  }
  return q;
}

std::vector<double> DiscretizedOperator::effective_weights() const {
  std::vector<double> w = quad.weights;
  if (!measure.empty())
    for (size_t i = 0; i < w.size(); ++i) w[i] *= measure[i];
  return w;
}

CMat DiscretizedOperator::system_matrix() const {
  auto w = effective_weights();
  int n = size();
  CMat A = CMat::Identity(n, n);
  for (int j = 0; j < n; ++j) A.col(j) -= scale * w[j] * matrix.col(j);
  return A;
}

DiscretizedOperator assemble_serial(const Quadrature& q, const KernelFn& k, double scale,
                                    std::vector<double> measure) {
  DiscretizedOperator op{q, CMat(q.size(), q.size()), std::move(measure), scale};
  const int n = q.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) op.matrix(i, j) = k(q.nodes[i], q.nodes[j]);
  return op;
}

DiscretizedOperator assemble_parallel(const Quadrature& q, const KernelFn& k, double scale,
                                      std::vector<double> measure) {
  DiscretizedOperator op{q, CMat(q.size(), q.size()), std::move(measure), scale};
  const int n = q.size();
#pragma omp parallel for collapse(2) schedule(dynamic, 16)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) op.matrix(i, j) = k(q.nodes[i], q.nodes[j]);
  return op;
}

cplx fredholm_det(const DiscretizedOperator& op) {
  check_finite(op);
  int n = op.size();
  if (n == 0) return 1.0;
  auto w = op.effective_weights();
  CMat S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S(i, j) = (i == j ? 1.0 : 0.0) - op.scale * std::sqrt(w[i]) * op.matrix(i, j) * std::sqrt(w[j]);
  return S.partialPivLu().determinant();
}

cplx fredholm_det_unsymmetrized(const DiscretizedOperator& op) {
  check_finite(op);
  if (op.size() == 0) return 1.0;
  return op.system_matrix().partialPivLu().determinant();
}

namespace {

Eigen::PartialPivLU<CMat> factor_checked(const DiscretizedOperator& op) {
  check_finite(op);
  Eigen::PartialPivLU<CMat> lu(op.system_matrix());
  double rc = lu.rcond();
  if (!(rc > 1.0 / kCondLimit))
    throw SingularOperator("resolvent: system matrix is singular or ill-conditioned",
                           rc > 0 ? 1.0 / rc : INFINITY);
  return lu;
}

}  // namespace

CVec resolvent_apply(const DiscretizedOperator& op, const CVec& rhs) {
  if (rhs.size() != op.size()) throw std::invalid_argument("resolvent_apply: size mismatch");
  if (op.size() == 0) return rhs;
  return factor_checked(op).solve(rhs);
}

CMat resolvent_kernel(const DiscretizedOperator& op) {
  if (op.size() == 0) return op.matrix;
  return factor_checked(op).solve(op.matrix);
}

DetDerivative det_with_rank_one_derivative(const DiscretizedOperator& op,
                                           const RankOnePerturbation& pert) {
  int n = op.size();
  if (pert.f.size() != n || pert.g.size() != n)
    throw std::invalid_argument("det_with_rank_one_derivative: size mismatch");
  DetDerivative r;
  r.det = fredholm_det(op);
  if (n == 0) return r;
  CVec u = resolvent_apply(op, pert.f);
  auto w = op.effective_weights();
  cplx ip = 0.0;
  for (int j = 0; j < n; ++j) ip += pert.g[j] * w[j] * u[j];
  r.trace_term = pert.sign * ip;
  r.alpha_derivative = -r.det * r.trace_term;
  return r;
}

MinorResult fredholm_minor_first(const DiscretizedOperator& op, double xi, double eta,
                                 const KernelFn& kernel) {
  double len = op.quad.b - op.quad.a;
  for (double p : {xi, eta})
    if (p < op.quad.a - len - 1e-12 || p > op.quad.b + len + 1e-12)
      throw ExtrapolationWarning("fredholm_minor_first: evaluation point far outside the domain");
  MinorResult r;
  r.det = fredholm_det(op);
  int n = op.size();
  cplx k_xe = kernel(xi, eta);
  if (n == 0) {
    r.delta = -op.scale * k_xe;
    r.minor = r.det * r.delta;
    return r;
  }
  CVec rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = -op.scale * kernel(op.quad.nodes[i], eta);
  CVec d = resolvent_apply(op, rhs);
  auto w = op.effective_weights();
  cplx acc = 0.0;
  for (int j = 0; j < n; ++j) acc += kernel(xi, op.quad.nodes[j]) * w[j] * d[j];
  r.delta = -op.scale * k_xe + op.scale * acc;
  r.minor = r.det * r.delta;
  return r;
}

}  // namespace bosegas
