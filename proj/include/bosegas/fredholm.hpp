#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "bosegas/kernels.hpp"

namespace bosegas {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using KernelFn = std::function<cplx(double, double)>;

struct Quadrature {
  std::vector<double> nodes, weights;
  double a = 0.0, b = 0.0;
  bool truncated = false;       // [0, b] standing for [0, inf)
  double tail_bound = 0.0;      // bound on the discarded thermal mass
  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre on [a, b]; a == b gives an empty rule.
Quadrature build_grid(double a, double b, int n);
// [0, Lambda] with Lambda = sqrt(h + c T ln(1/tol)), split at the Fermi edge.
Quadrature build_thermal_grid(const ThermalParams& p, int n, double tol = 1e-14, double c = 1.0);
// Reflect a grid on [0, q] to [-q, q]; node i of the input maps to n-1-i and n+i.
Quadrature mirror_grid(const Quadrature& half);

// Operator (K f)(x_i) = sum_j K(x_i, x_j) m_j w_j f_j, applied as 1 - scale K.
struct DiscretizedOperator {
  Quadrature quad;
  CMat matrix;                  // K(x_i, x_j)
  std::vector<double> measure;  // extra weight at nodes (Fermi weight), 1 by default
  double scale = 1.0;

  int size() const { return quad.size(); }
  std::vector<double> effective_weights() const;
  CMat system_matrix() const;   // I - scale K diag(m w)
};

DiscretizedOperator assemble_serial(const Quadrature& q, const KernelFn& k, double scale,
                                    std::vector<double> measure = {});
DiscretizedOperator assemble_parallel(const Quadrature& q, const KernelFn& k, double scale,
                                      std::vector<double> measure = {});
inline DiscretizedOperator assemble(const Quadrature& q, const KernelFn& k, double scale,
                                    std::vector<double> measure = {}) {
  return assemble_parallel(q, k, scale, std::move(measure));
}

// det(1 - scale K) through the sqrt(w)-symmetrized matrix
cplx fredholm_det(const DiscretizedOperator& op);
// the same determinant from I - scale K diag(w), for similarity checks
cplx fredholm_det_unsymmetrized(const DiscretizedOperator& op);

// u with (1 - scale K) u = rhs at the nodes
CVec resolvent_apply(const DiscretizedOperator& op, const CVec& rhs);
// R = (1 - scale K)^{-1} K as a kernel matrix at the nodes
CMat resolvent_kernel(const DiscretizedOperator& op);

struct RankOnePerturbation {
  CVec f, g;
  double sign = 1.0;
};

struct DetDerivative {
  cplx det = 0.0;
  cplx alpha_derivative = 0.0;
  cplx trace_term = 0.0;  // sign <g, (1 - scale K)^{-1} f>_w
};

// det(1 - scale K - alpha A) and its alpha-derivative at 0, A = sign f g^T
DetDerivative det_with_rank_one_derivative(const DiscretizedOperator& op,
                                           const RankOnePerturbation& pert);

struct MinorResult {
  cplx minor = 0.0;
  cplx det = 0.0;
  cplx delta = 0.0;  // minor / det
};

// First Fredholm minor det(1 - scale K | xi / eta), with Nystrom
// interpolation at off-grid points. `kernel` must reproduce op.matrix on
// the nodes (including any weight folded into the kernel).
MinorResult fredholm_minor_first(const DiscretizedOperator& op, double xi, double eta,
                                 const KernelFn& kernel);

}  // namespace bosegas
