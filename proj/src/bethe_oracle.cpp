#include "bosegas/bethe_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bosegas/errors.hpp"
#include "bosegas/quadrature.hpp"

namespace bosegas {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I1(0.0, 1.0);

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// sin(x u) / u, continuous at u = 0
double sinc(double x, double u) {
  double xu = x * u;
  if (std::abs(xu) < 1e-4) return x * (1.0 - xu * xu / 6.0 + xu * xu * xu * xu / 120.0);
  return std::sin(xu) / u;
}

int lowest_mode(BoundaryKind b) { return b == BoundaryKind::Neumann ? 0 : 1; }

std::vector<int> modes_upto(double lambda_max, double L, BoundaryKind b) {
  int top = static_cast<int>(std::floor(lambda_max * L / kPi + 1e-9));
  std::vector<int> m;
  for (int a = lowest_mode(b); a <= top; ++a) m.push_back(a);
  return m;
}

cplx det_of(const CMat& m) {
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

// Sum of a vector in a fixed pairwise order.
cplx pairwise_sum(const std::vector<cplx>& v, size_t lo, size_t hi) {
  if (hi - lo <= 8) {
    cplx acc = 0.0;
    for (size_t i = lo; i < hi; ++i) acc += v[i];
    return acc;
  }
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

// det [[G, u], [w^T, c]] = c det G + d/dalpha det(G - alpha u w^T)
cplx bordered_det(const CMat& G, const CVec& u, const CVec& w, cplx c) {
  Eigen::Index n = G.rows();
  CMat B(n + 1, n + 1);
  B.topLeftCorner(n, n) = G;
  B.topRightCorner(n, 1) = u;
  B.bottomLeftCorner(1, n) = w.transpose();
  B(n, n) = c;
  return det_of(B);
}

}  // namespace

void FiniteSystem::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidState("FiniteSystem: L must be positive");
  int lo = lowest_mode(boundary);
  for (size_t j = 0; j < I.size(); ++j) {
    if (I[j] < lo) throw InvalidState("FiniteSystem: quantum number below the lowest mode");
    if (j > 0 && I[j] == I[j - 1]) throw InvalidState("FiniteSystem: duplicate quantum numbers");
    if (j > 0 && I[j] < I[j - 1]) throw InvalidState("FiniteSystem: quantum numbers must increase");
  }
}

FiniteSystem ground_state(double L, int N, BoundaryKind b) {
  FiniteSystem s;
  s.L = L;
  s.boundary = b;
  for (int j = 0; j < N; ++j) s.I.push_back(lowest_mode(b) + j);
  return s;
}

std::vector<double> bethe_momenta(const FiniteSystem& sys) {
  sys.validate();
  std::vector<double> lam;
  for (int a : sys.I) lam.push_back(kPi * a / sys.L);
  return lam;
}

double energy(const std::vector<double>& lambda, double h) {
  double e = 0.0;
  for (double l : lambda) e += l * l - h;
  return e;
}

cplx wave_function(const std::vector<double>& z, const FiniteSystem& sys) {
  int n = sys.N();
  if (static_cast<int>(z.size()) != n) throw std::invalid_argument("wave_function: size mismatch");
  auto lam = bethe_momenta(sys);
  double sign = 1.0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) sign *= sgn(z[j] - z[k]);
  if (sign == 0.0) return 0.0;
  CMat m(n, n);
  bool neumann = sys.boundary == BoundaryKind::Neumann;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      m(j, k) = neumann ? std::cos(lam[j] * z[k]) : std::sin(lam[j] * z[k]);
  double fact = std::tgamma(n + 1.0);
  cplx cons;
  if (neumann) {
    double zero = (n > 0 && sys.I[0] == 0) ? 2.0 : 1.0;
    cons = std::pow(2.0, n) / std::sqrt(zero * fact);
  } else {
    cons = std::pow(2.0 * I1, n) / std::sqrt(fact);
  }
  return cons * sign * det_of(m);
}

cplx orthogonality_check(const FiniteSystem& a, const FiniteSystem& b) {
  if (a.N() != b.N()) return 0.0;
  if (a.N() > 2) throw std::invalid_argument("orthogonality_check: N <= 2");
  a.validate();
  b.validate();
  int n = a.N();
  if (n == 0) return 1.0;
  int top = 0;
  for (int v : a.I) top = std::max(top, v);
  for (int v : b.I) top = std::max(top, v);
  // the integrand is a trigonometric polynomial with frequencies below 2 pi top / L
  int panels = std::max(2, top);
  const GLRule& r = gauss_legendre(20);
  std::vector<double> zs, ws;
  double hw = a.L / panels;
  for (int p = 0; p < panels; ++p)
    for (size_t i = 0; i < r.x.size(); ++i) {
      zs.push_back(hw * p + 0.5 * hw * (r.x[i] + 1.0));
      ws.push_back(0.5 * hw * r.w[i]);
    }
  cplx acc = 0.0;
  if (n == 1) {
    for (size_t i = 0; i < zs.size(); ++i)
      acc += ws[i] * std::conj(wave_function({zs[i]}, a)) * wave_function({zs[i]}, b);
  } else {
    for (size_t i = 0; i < zs.size(); ++i)
      for (size_t j = 0; j < zs.size(); ++j) {
        std::vector<double> z{zs[i], zs[j]};
        acc += ws[i] * ws[j] * std::conj(wave_function(z, a)) * wave_function(z, b);
      }
  }
  return acc;
}

IdentityPair permutation_identity_check(int N, const std::vector<cplx>& f, const std::vector<cplx>& g) {
  if (N < 0 || N > 5) throw std::invalid_argument("permutation_identity_check: 0 <= N <= 5");
  if (static_cast<int>(f.size()) != N + 1 || static_cast<int>(g.size()) != (N + 1) * N)
    throw std::invalid_argument("permutation_identity_check: size mismatch");
  auto G = [&](int j, int k) { return g[static_cast<size_t>(j) * N + k]; };
  std::vector<int> perm(N + 1);
  std::iota(perm.begin(), perm.end(), 0);
  cplx lhs = 0.0;
  do {
    int inv = 0;
    for (int a = 0; a <= N; ++a)
      for (int b = a + 1; b <= N; ++b) inv += perm[a] > perm[b];
    cplx term = (inv % 2 ? -1.0 : 1.0) * f[perm[N]];
    for (int j = 0; j < N; ++j) term *= G(perm[j], j);
    lhs += term;
  } while (std::next_permutation(perm.begin(), perm.end()));

  // rhs: f_{N+1} det(g) - sum_{jk} f_j g_{N+1,k} cof_{jk}(g)
  CMat M(N, N);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) M(j, k) = G(j, k);
  cplx rhs = f[N] * det_of(M);
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      CMat minor(N - 1, N - 1);
      for (int a = 0, ra = 0; a < N; ++a) {
        if (a == j) continue;
        for (int b = 0, rb = 0; b < N; ++b) {
          if (b == k) continue;
          minor(ra, rb++) = M(a, b);
        }
        ++ra;
      }
      double s = (j + k) % 2 ? -1.0 : 1.0;
      rhs -= f[j] * G(N, k) * s * det_of(minor);
    }
  return {lhs, rhs};
}

cplx C_eps(double x, int a, double L, BoundaryKind b) {
  double lam = kPi * a / L;
  double e = eps(b);
  double norm = (b == BoundaryKind::Neumann && a == 0) ? std::sqrt(2.0) : 1.0;
  return (std::exp(-I1 * lam * x) + e * std::exp(I1 * lam * x)) / norm;
}

double I_eps(double x, int a, int c, double L, BoundaryKind b) {
  double e = eps(b);
  double lam = kPi * a / L, mu = kPi * c / L;
  double v = (a == c) ? 4.0 * x : 4.0 * std::sin(x * (lam - mu)) / (lam - mu);
  v += e * ((a + c == 0) ? 4.0 * x : 4.0 * std::sin(x * (lam + mu)) / (lam + mu));
  v -= 2.0 * L * ((a == c ? 1.0 : 0.0) + e * (a == 0 && c == 0 ? 1.0 : 0.0));
  double norm = 1.0;
  if (b == BoundaryKind::Neumann) {
    if (a == 0) norm *= 2.0;
    if (c == 0) norm *= 2.0;
  }
  return v / std::sqrt(norm);
}

namespace {

void check_input(const FormFactorInput& in) {
  if (in.lambda.size() != in.mu.size() + 1)
    throw std::invalid_argument("form_factor: need N+1 and N quantum numbers");
  FiniteSystem a{in.L, in.boundary, in.lambda}, b{in.L, in.boundary, in.mu};
  a.validate();
  b.validate();
}

// Determinant formula from precomputed tables: C[a] and I[a][k] for the
// quantum numbers lambda (indexed positionally) against mu.
cplx ff_from_tables(int n, const std::vector<cplx>& C, const std::vector<std::vector<double>>& Itab) {
  if (n == 0) return C[0];
  CMat G(n, n);
  CVec u(n), w(n);
  for (int j = 0; j < n; ++j) {
    u(j) = C[j];
    w(j) = Itab[n][j];
    for (int k = 0; k < n; ++k) G(j, k) = Itab[j][k];
  }
  return bordered_det(G, u, w, C[n]);
}

}  // namespace

cplx form_factor_determinant(const FormFactorInput& in) {
  check_input(in);
  int n = static_cast<int>(in.mu.size());
  std::vector<cplx> C;
  std::vector<std::vector<double>> Itab(n + 1, std::vector<double>(n));
  for (int j = 0; j <= n; ++j) {
    C.push_back(C_eps(in.x, in.lambda[j], in.L, in.boundary));
    for (int k = 0; k < n; ++k) Itab[j][k] = I_eps(in.x, in.lambda[j], in.mu[k], in.L, in.boundary);
  }
  return ff_from_tables(n, C, Itab);
}

cplx form_factor(const FormFactorInput& in) {
  double s = in.mu.size() % 2 ? -1.0 : 1.0;
  return s * form_factor_determinant(in);
}

cplx form_factor_direct(const FormFactorInput& in, int nodes) {
  check_input(in);
  int n = static_cast<int>(in.mu.size());
  if (n > 2) throw std::invalid_argument("form_factor_direct: N <= 2");
  if (in.x < 0.0 || in.x > in.L) throw std::invalid_argument("form_factor_direct: x outside [0,L]");
  FiniteSystem big{in.L, in.boundary, in.lambda}, small{in.L, in.boundary, in.mu};
  if (n == 0) return std::conj(wave_function({in.x}, big));

  int top = 0;
  for (int v : in.lambda) top = std::max(top, v);
  for (int v : in.mu) top = std::max(top, v);
  const GLRule& r = gauss_legendre(nodes);
  double max_panel = in.L / std::max(2, top);
  // composite rule on [a,b] with panels no longer than max_panel
  auto rule = [&](double a, double b, std::vector<double>& zs, std::vector<double>& ws) {
    zs.clear();
    ws.clear();
    if (b <= a) return;
    int p = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    double hw = (b - a) / p;
    for (int q = 0; q < p; ++q)
      for (size_t i = 0; i < r.x.size(); ++i) {
        zs.push_back(a + hw * q + 0.5 * hw * (r.x[i] + 1.0));
        ws.push_back(0.5 * hw * r.w[i]);
      }
  };
  auto integrand = [&](const std::vector<double>& z) {
    std::vector<double> zz = z;
    zz.push_back(in.x);
    return std::conj(wave_function(zz, big)) * wave_function(z, small);
  };
  std::vector<double> z1, w1, z2, w2;
  cplx acc = 0.0;
  double cuts[2][2] = {{0.0, in.x}, {in.x, in.L}};
  if (n == 1) {
    for (auto& c : cuts) {
      rule(c[0], c[1], z1, w1);
      for (size_t i = 0; i < z1.size(); ++i) acc += w1[i] * integrand({z1[i]});
    }
  } else {
    for (auto& c : cuts) {
      rule(c[0], c[1], z1, w1);
      for (size_t i = 0; i < z1.size(); ++i) {
        std::vector<double> pts{0.0, in.x, z1[i], in.L};
        std::sort(pts.begin(), pts.end());
        for (size_t s = 0; s + 1 < pts.size(); ++s) {
          rule(pts[s], pts[s + 1], z2, w2);
          for (size_t j = 0; j < z2.size(); ++j) acc += w1[i] * w2[j] * integrand({z1[i], z2[j]});
        }
      }
    }
  }
  return std::sqrt(n + 1.0) * acc;
}

namespace {

// One estimate per damping value; 0 means no damping.
std::vector<cplx> mode_sum(const FiniteSystem& sys, double x1, double x2, double t, double h,
                           double lambda_max, const std::vector<double>& deltas,
                           const RegularizationPolicy& policy) {
  sys.validate();
  int n = sys.N();
  if (n > 3) throw std::invalid_argument("finite_L_correlation: N <= 3");
  double L = sys.L;
  auto modes = modes_upto(lambda_max, L, sys.boundary);
  int m = static_cast<int>(modes.size());
  if (m < n + 1) throw std::invalid_argument("finite_L_correlation: lambda_max too small");
  size_t nd = deltas.size();

  std::vector<cplx> C1(m), C2(m), ph(m);
  std::vector<std::vector<double>> I1t(m, std::vector<double>(n)), I2t(m, std::vector<double>(n));
  std::vector<double> s2(m);
  for (int a = 0; a < m; ++a) {
    double lam = kPi * modes[a] / L;
    s2[a] = lam * lam;
    C1[a] = C_eps(x1, modes[a], L, sys.boundary);
    C2[a] = C_eps(x2, modes[a], L, sys.boundary);
    ph[a] = std::exp(I1 * t * s2[a]);
    for (int k = 0; k < n; ++k) {
      I1t[a][k] = I_eps(x1, modes[a], sys.I[k], L, sys.boundary);
      I2t[a][k] = I_eps(x2, modes[a], sys.I[k], L, sys.boundary);
    }
  }
  double emu = 0.0;
  for (int k = 0; k < n; ++k) emu += std::pow(kPi * sys.I[k] / L, 2);

  // partial sums per leading mode, one slot per damping value
  std::vector<std::vector<cplx>> part(m, std::vector<cplx>(nd, 0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int lead = 0; lead < m; ++lead) {
    std::vector<int> idx(n + 1);
    std::vector<cplx> c1(n + 1), c2(n + 1);
    std::vector<std::vector<double>> t1(n + 1), t2(n + 1);
    std::vector<cplx> terms;
    std::vector<std::vector<cplx>> dterms(nd);
    // enumerate increasing tuples starting at lead
    idx[0] = lead;
    for (int j = 1; j <= n; ++j) idx[j] = lead + j;
    if (idx[n] >= m) continue;
    while (true) {
      double e = 0.0;
      cplx phase = 1.0;
      for (int j = 0; j <= n; ++j) {
        c1[j] = C1[idx[j]];
        c2[j] = C2[idx[j]];
        t1[j] = I1t[idx[j]];
        t2[j] = I2t[idx[j]];
        e += s2[idx[j]];
        phase *= ph[idx[j]];
      }
      cplx f1 = ff_from_tables(n, c1, t1), f2 = ff_from_tables(n, c2, t2);
      cplx term = std::conj(f1) * f2 * phase;
      for (size_t d = 0; d < nd; ++d)
        dterms[d].push_back(deltas[d] == 0.0 ? term : term * policy.weight(deltas[d], e));
      // next tuple with fixed idx[0]
      int j = n;
      while (j >= 1 && idx[j] == m - 1 - (n - j)) --j;
      if (j < 1) break;
      ++idx[j];
      for (int k = j + 1; k <= n; ++k) idx[k] = idx[k - 1] + 1;
    }
    for (size_t d = 0; d < nd; ++d)
      if (!dterms[d].empty()) part[lead][d] = pairwise_sum(dterms[d], 0, dterms[d].size());
  }
  double norm = std::pow(2.0 * L, 2 * n + 1);
  cplx pre = std::exp(-I1 * t * (h + emu)) / norm;
  std::vector<cplx> est(nd);
  for (size_t d = 0; d < nd; ++d) {
    std::vector<cplx> col(m);
    for (int a = 0; a < m; ++a) col[a] = part[a][d];
    est[d] = pre * pairwise_sum(col, 0, col.size());
  }
  return est;
}

}  // namespace

cplx finite_L_correlation_truncated(const FiniteSystem& sys, double x1, double x2, double t, double h,
                                    double lambda_max) {
  return mode_sum(sys, x1, x2, t, h, lambda_max, {0.0}, RegularizationPolicy{})[0];
}

cplx finite_L_correlation(const FiniteSystem& sys, double x1, double x2, double t, double h,
                          double lambda_max, const RegularizationPolicy& policy) {
  policy.validate();
  auto deltas = policy.schedule();
  if (lambda_max < policy.window(deltas.back()))
    throw std::invalid_argument("finite_L_correlation: lambda_max below the damping window");
  auto est = mode_sum(sys, x1, x2, t, h, lambda_max, deltas, policy);
  Extrapolated r = richardson(deltas, est);
  if (r.error_estimate > policy.consistency_tol * (1.0 + std::abs(r.value)))
    throw ConvergenceFailure("finite_L_correlation: extrapolation inconsistent", {r.error_estimate});
  return r.value;
}

namespace {

PropositionParts assemble_parts(const FiniteSystem& sys, double t, double h, cplx A0, CMat M, CVec u,
                                CVec v) {
  PropositionParts p;
  double L = sys.L;
  double e = eps(sys.boundary);
  p.A0 = A0;
  p.M = std::move(M);
  p.u = std::move(u);
  p.v = std::move(v);
  p.det = det_of(p.M);
  CVec scaled = (e / (2.0 * L)) * p.u;
  p.alpha_derivative = bordered_det(p.M, scaled, p.v, 0.0);
  p.value = std::exp(-I1 * h * t) * (p.A0 * p.det + p.alpha_derivative);
  return p;
}

}  // namespace

cplx lattice_prefactor_lhs(double x1, double x2, double t, double L, BoundaryKind b, int i_max) {
  double e = eps(b);
  cplx acc = 0.0;
  for (int a = lowest_mode(b); a <= i_max; ++a) {
    double s = kPi * a / L;
    acc += e * std::exp(I1 * t * s * s) * C_eps(x1, a, L, b) * C_eps(x2, a, L, b);
  }
  return acc / (2.0 * L);
}

cplx lattice_vector_lhs(double x1, double x2, double t, int mu, double L, BoundaryKind b, int i_max) {
  double m = kPi * mu / L;
  cplx acc = 0.0;
  for (int a = lowest_mode(b); a <= i_max; ++a) {
    double s = kPi * a / L;
    acc += std::exp(I1 * t * s * s) * C_eps(x1, a, L, b) * I_eps(x2, a, mu, L, b);
  }
  return std::exp(-0.5 * I1 * t * m * m) * acc / (2.0 * L);
}

cplx lattice_matrix_lhs(double x1, double x2, double t, int lambda, int mu, double L, BoundaryKind b,
                        int i_max) {
  double l = kPi * lambda / L, m = kPi * mu / L;
  cplx acc = 0.0;
  for (int a = lowest_mode(b); a <= i_max; ++a) {
    double s = kPi * a / L;
    acc += std::exp(I1 * t * s * s) * I_eps(x1, a, mu, L, b) * I_eps(x2, a, lambda, L, b);
  }
  return std::exp(-0.5 * I1 * t * (l * l + m * m)) * acc / (4.0 * L * L);
}

namespace {

// Summands of the Z-lattice forms.
cplx prefactor_summand(double s, double x1, double x2, double t, double e) {
  return std::exp(I1 * (t * s * s - s * (x1 - x2))) + e * std::exp(I1 * (t * s * s - s * (x1 + x2)));
}

cplx vector_summand(double s, double x1, double x2, double t, double mu) {
  return std::exp(I1 * (t * s * s - s * x1)) * sinc(x2, s - mu);
}

// (1/(s-l) - 1/(s-m)) sin((s-m)x1) sin((s-l)x2) in a form regular at s = l, m
cplx matrix_summand_off(double s, double x1, double x2, double t, double l, double m) {
  double v = sinc(x2, s - l) * std::sin((s - m) * x1) - sinc(x1, s - m) * std::sin((s - l) * x2);
  return std::exp(I1 * t * s * s) * v;
}

// derivative in l of the above at l = m
cplx matrix_summand_diag(double s, double x1, double x2, double t, double m) {
  return std::exp(I1 * t * s * s) * sinc(x1, s - m) * sinc(x2, s - m);
}

using SumFn = std::function<cplx(const RealFn&)>;

cplx vector_rhs(double x1, double x2, double t, int mu, double L, BoundaryKind b, const SumFn& zsum) {
  double e = eps(b);
  double m = kPi * mu / L;
  auto part = [&](double mm) {
    cplx s = zsum([&](double s) { return vector_summand(s, x1, x2, t, mm); });
    return (2.0 / kPi) * s - std::exp(I1 * (t * mm * mm - mm * x1));
  };
  double norm = (b == BoundaryKind::Neumann && mu == 0) ? std::sqrt(2.0) : 1.0;
  return std::exp(-0.5 * I1 * t * m * m) / norm * (part(m) + e * part(-m));
}

cplx matrix_rhs(double x1, double x2, double t, int lambda, int mu, double L, BoundaryKind b,
                const SumFn& zsum) {
  double e = eps(b);
  double l = kPi * lambda / L, m = kPi * mu / L;
  // bracket {..}/(l - mm), with its limit when l == mm
  auto part = [&](double mm, bool coincide) -> cplx {
    if (coincide) {
      cplx s = zsum([&](double s) { return matrix_summand_diag(s, x1, x2, t, mm); });
      return std::exp(I1 * t * mm * mm) * (x1 + x2) - (2.0 / kPi) * s;
    }
    cplx s = zsum([&](double s) { return matrix_summand_off(s, x1, x2, t, l, mm); });
    cplx br = std::exp(I1 * t * l * l) * std::sin(x1 * (l - mm)) +
              std::exp(I1 * t * mm * mm) * std::sin(x2 * (l - mm)) - (2.0 / kPi) * s;
    return br / (l - mm);
  };
  double norm = 1.0;
  if (b == BoundaryKind::Neumann) {
    if (lambda == 0) norm *= 2.0;
    if (mu == 0) norm *= 2.0;
  }
  cplx br = part(m, lambda == mu) + e * part(-m, lambda == -mu);
  double kd = lambda == mu ? 1.0 : 0.0;
  return kd - (2.0 / L) * std::exp(-0.5 * I1 * t * (l * l + m * m)) / std::sqrt(norm) * br;
}

SumFn truncated_zsum(double L, int i_max) {
  return [L, i_max](const RealFn& g) {
    cplx acc = 0.0;
    for (int a = -i_max; a <= i_max; ++a) acc += g(kPi * a / L);
    return (kPi / L) * acc;
  };
}

SumFn regularized_zsum(double L, const RegularizationPolicy& policy) {
  return [L, policy](const RealFn& g) {
    return regularized_lattice_sum(g, L, Lattice::Integer, policy).value;
  };
}

}  // namespace

cplx lattice_prefactor_rhs_truncated(double x1, double x2, double t, double L, BoundaryKind b, int i_max) {
  double e = eps(b);
  auto z = truncated_zsum(L, i_max);
  return z([&](double s) { return prefactor_summand(s, x1, x2, t, e); }) / (2.0 * kPi);
}

cplx lattice_vector_rhs_truncated(double x1, double x2, double t, int mu, double L, BoundaryKind b,
                                  int i_max) {
  return vector_rhs(x1, x2, t, mu, L, b, truncated_zsum(L, i_max));
}

cplx lattice_matrix_rhs_truncated(double x1, double x2, double t, int lambda, int mu, double L,
                                  BoundaryKind b, int i_max) {
  return matrix_rhs(x1, x2, t, lambda, mu, L, b, truncated_zsum(L, i_max));
}

cplx lattice_prefactor_rhs(double x1, double x2, double t, double L, BoundaryKind b,
                           const RegularizationPolicy& policy) {
  double e = eps(b);
  auto z = regularized_zsum(L, policy);
  return z([&](double s) { return prefactor_summand(s, x1, x2, t, e); }) / (2.0 * kPi);
}

cplx lattice_vector_rhs(double x1, double x2, double t, int mu, double L, BoundaryKind b,
                        const RegularizationPolicy& policy) {
  return vector_rhs(x1, x2, t, mu, L, b, regularized_zsum(L, policy));
}

cplx lattice_matrix_rhs(double x1, double x2, double t, int lambda, int mu, double L, BoundaryKind b,
                        const RegularizationPolicy& policy) {
  return matrix_rhs(x1, x2, t, lambda, mu, L, b, regularized_zsum(L, policy));
}

PropositionParts proposition_truncated(const FiniteSystem& sys, double x1, double x2, double t,
                                       double h, double lambda_max) {
  sys.validate();
  int n = sys.N();
  double L = sys.L;
  int i_max = static_cast<int>(std::floor(lambda_max * L / kPi + 1e-9));
  CMat M(n, n);
  CVec u(n), v(n);
  for (int j = 0; j < n; ++j) {
    u(j) = lattice_vector_lhs(x1, x2, t, sys.I[j], L, sys.boundary, i_max);
    v(j) = lattice_vector_lhs(x2, x1, t, sys.I[j], L, sys.boundary, i_max);
    for (int k = 0; k < n; ++k)
      M(j, k) = lattice_matrix_lhs(x1, x2, t, sys.I[j], sys.I[k], L, sys.boundary, i_max);
  }
  cplx A0 = lattice_prefactor_lhs(x1, x2, t, L, sys.boundary, i_max);
  return assemble_parts(sys, t, h, A0, std::move(M), std::move(u), std::move(v));
}

PropositionParts proposition_determinant(const FiniteSystem& sys, double x1, double x2, double t,
                                         double h, const RegularizationPolicy& policy) {
  sys.validate();
  policy.validate();
  int n = sys.N();
  double L = sys.L;
  CMat M(n, n);
  CVec u(n), v(n);
  for (int j = 0; j < n; ++j) {
    u(j) = lattice_vector_rhs(x1, x2, t, sys.I[j], L, sys.boundary, policy);
    v(j) = lattice_vector_rhs(x2, x1, t, sys.I[j], L, sys.boundary, policy);
  }
  std::vector<std::pair<int, int>> jobs;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) jobs.emplace_back(j, k);
  std::vector<std::exception_ptr> errs(jobs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long q = 0; q < static_cast<long>(jobs.size()); ++q) {
    auto [j, k] = jobs[q];
    try {
      M(j, k) = lattice_matrix_rhs(x1, x2, t, sys.I[j], sys.I[k], L, sys.boundary, policy);
    } catch (...) {
      errs[q] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  cplx A0 = lattice_prefactor_rhs(x1, x2, t, L, sys.boundary, policy);
  return assemble_parts(sys, t, h, A0, std::move(M), std::move(u), std::move(v));
}

}  // namespace bosegas
