#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace bosegas {

using cplx = std::complex<double>;

// Gauss-Legendre rule on [-1,1], cached per n.
struct GLRule {
  std::vector<double> x, w;
};
const GLRule& gauss_legendre(int n);

// Composite Gauss-Legendre over [a,b] with `panels` equal panels of `order` nodes.
cplx integrate_panels(const std::function<cplx(double)>& f, double a, double b,
                      int panels, int order = 20);

// Adaptive bisection on [a,b] comparing one order-20 panel with its two halves.
cplx integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, double rel_tol = 1e-13, int max_depth = 40);

}  // namespace bosegas
