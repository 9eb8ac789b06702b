#pragma once
#include <complex>
#include <vector>

#include "bosegas/fredholm.hpp"
#include "bosegas/kernels.hpp"
#include "bosegas/special_integrals.hpp"

namespace bosegas {

struct FiniteSystem {
  double L = 1.0;
  BoundaryKind boundary = BoundaryKind::Neumann;
  std::vector<int> I;  // strictly increasing quantum numbers
  int N() const { return static_cast<int>(I.size()); }
  void validate() const;
};

FiniteSystem ground_state(double L, int N, BoundaryKind b);

std::vector<double> bethe_momenta(const FiniteSystem& sys);
double energy(const std::vector<double>& lambda, double h);

// Normalized so that the integral of |psi|^2 over [0,L]^N is (2L)^N.
cplx wave_function(const std::vector<double>& z, const FiniteSystem& sys);

// <Psi(lambda)|Psi(mu)> by tensor Gauss-Legendre quadrature, N <= 2
cplx orthogonality_check(const FiniteSystem& lambda, const FiniteSystem& mu);

struct IdentityPair {
  cplx lhs, rhs;
};
// f: N+1 entries, g: (N+1) x N, row-major g[j*N + k]
IdentityPair permutation_identity_check(int N, const std::vector<cplx>& f, const std::vector<cplx>& g);

// C_eps(x|lambda) and I_eps(x|lambda,mu) on the pi/L lattice, by quantum number
cplx C_eps(double x, int a, double L, BoundaryKind b);
double I_eps(double x, int a, int c, double L, BoundaryKind b);

struct FormFactorInput {
  std::vector<int> lambda;  // N+1 quantum numbers
  std::vector<int> mu;      // N quantum numbers
  double x = 0.0;
  double L = 1.0;
  BoundaryKind boundary = BoundaryKind::Neumann;
};

// Determinant formula for <Psi_{N+1}(lambda)| psi^dag(x) |Psi_N(mu)>.
cplx form_factor_determinant(const FormFactorInput& in);
// The matrix element itself, i.e. the determinant formula times (-1)^N, which
// is what the overlap integral of the wave functions gives.
cplx form_factor(const FormFactorInput& in);
// Overlap integral oracle sqrt(N+1) int psi*_{N+1}(z, x) psi_N(z), N <= 2.
cplx form_factor_direct(const FormFactorInput& in, int nodes = 24);

// <psi(x1,0) psi^dag(x2,t)> in the state sys, summing intermediate states with
// momenta pi I / L <= lambda_max. The sum is only conditionally convergent,
// even at t = 0 where it carries delta(x1 - x2), so it is damped in the
// intermediate energy and extrapolated; lambda_max must cover the window.
cplx finite_L_correlation(const FiniteSystem& sys, double x1, double x2, double t, double h,
                          double lambda_max, const RegularizationPolicy& policy);
// The same sum, undamped and cut at lambda_max.
cplx finite_L_correlation_truncated(const FiniteSystem& sys, double x1, double x2, double t, double h,
                                    double lambda_max);

// Finite-size determinant representation: value = e^{-iht}(A0 + d/dalpha) det(M - alpha eps u v^T / 2L)
struct PropositionParts {
  cplx A0;
  CMat M;
  CVec u, v;
  cplx det, alpha_derivative, value;
};

// Mode sums truncated to momenta <= lambda_max (same set as finite_L_correlation).
PropositionParts proposition_truncated(const FiniteSystem& sys, double x1, double x2, double t,
                                       double h, double lambda_max);
// Mode sums through the Z-lattice forms, regularized and extrapolated.
PropositionParts proposition_determinant(const FiniteSystem& sys, double x1, double x2, double t,
                                         double h, const RegularizationPolicy& policy);

// The three Z-lattice forms, each equal to the corresponding N-lattice mode sum.
cplx lattice_prefactor_rhs(double x1, double x2, double t, double L, BoundaryKind b,
                           const RegularizationPolicy& policy);
cplx lattice_vector_rhs(double x1, double x2, double t, int mu, double L, BoundaryKind b,
                        const RegularizationPolicy& policy);
cplx lattice_matrix_rhs(double x1, double x2, double t, int lambda, int mu, double L, BoundaryKind b,
                        const RegularizationPolicy& policy);

// The same three objects as plain truncated N-lattice mode sums.
cplx lattice_prefactor_lhs(double x1, double x2, double t, double L, BoundaryKind b, int i_max);
cplx lattice_vector_lhs(double x1, double x2, double t, int mu, double L, BoundaryKind b, int i_max);
cplx lattice_matrix_lhs(double x1, double x2, double t, int lambda, int mu, double L, BoundaryKind b,
                        int i_max);
// Z-lattice forms truncated symmetrically at |I| <= i_max.
cplx lattice_prefactor_rhs_truncated(double x1, double x2, double t, double L, BoundaryKind b, int i_max);
cplx lattice_vector_rhs_truncated(double x1, double x2, double t, int mu, double L, BoundaryKind b,
                                  int i_max);
cplx lattice_matrix_rhs_truncated(double x1, double x2, double t, int lambda, int mu, double L,
                                  BoundaryKind b, int i_max);

}  // namespace bosegas
