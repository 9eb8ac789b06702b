#include "bosegas/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace bosegas {

namespace {

void legendre(int n, double z, double& p, double& dp) {
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = (n == 0) ? 1.0 : p1;
  dp = n * (z * p1 - p0) / (z * z - 1.0);
}

GLRule make_rule(int n) {
  GLRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  if (n == 1) {
    r.w[0] = 2.0;
    return r;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it) {
      legendre(n, z, p, dp);
      double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    legendre(n, z, p, dp);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

}  // namespace

const GLRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  static std::mutex mu;
  static std::map<int, GLRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

cplx integrate_panels(const std::function<cplx(double)>& f, double a, double b,
                      int panels, int order) {
  const GLRule& r = gauss_legendre(order);
  double h = (b - a) / panels;
  cplx total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double c = a + (p + 0.5) * h;
    cplx s = 0.0;
    for (int i = 0; i < order; ++i) s += r.w[i] * f(c + 0.5 * h * r.x[i]);
    total += 0.5 * h * s;
  }
  return total;
}

namespace {

cplx gl_panel(const std::function<cplx(double)>& f, double a, double b) {
  const GLRule& r = gauss_legendre(20);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx s = 0.0;
  for (int i = 0; i < 20; ++i) s += r.w[i] * f(c + h * r.x[i]);
  return h * s;
}

cplx adapt(const std::function<cplx(double)>& f, double a, double b, cplx whole,
           double abs_tol, double rel_tol, int depth) {
  double m = 0.5 * (a + b);
  cplx left = gl_panel(f, a, m), right = gl_panel(f, m, b);
  cplx both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= std::max(abs_tol, rel_tol * std::abs(both)))
    return both;
  return adapt(f, a, m, left, 0.5 * abs_tol, rel_tol, depth - 1) +
         adapt(f, m, b, right, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

cplx integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                        double abs_tol, double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, gl_panel(f, a, b), abs_tol, rel_tol, max_depth);
}

}  // namespace bosegas
