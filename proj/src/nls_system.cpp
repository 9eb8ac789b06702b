#include "bosegas/nls_system.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

#include "bosegas/errors.hpp"
#include "bosegas/quadrature.hpp"
#include "bosegas/special_integrals.hpp"

namespace bosegas {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I1(0.0, 1.0);
constexpr double kNear = 0.05;    // below this |nu - lambda| divided differences use derivatives
constexpr double kRayAngle = kPi / 8.0;
constexpr double kDecay = 46.0;   // exp(-46) ~ 1e-20
constexpr double kMaxStationary = 80.0;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// One term c exp(i a nu^2 + i b nu) prod(alg) of a tail expansion.
struct Term {
  double alpha = 0.0, beta = 0.0;
  cplx coef = 1.0;
  int algs = 0;  // bit p-1 set: factor alg_p
};

// G_p on the tail nu -> side * inf as chirp terms plus the Faddeeva part.
std::vector<Term> tail_terms(const AuxField& a, int side) {
  if (a.vanishing()) return {};
  if (a.t() == 0.0) {
    double s = a.y() != 0.0 ? sgn(a.y()) : double(a.limit_side());
    return {Term{0.0, -a.y(), -0.5 * I1 * s, 0}};
  }
  double sigma = sgn(a.t()) * side;
  return {Term{a.t(), -a.y(), sigma * 0.5 * I1, 0}, Term{0.0, 0.0, 1.0, 1 << (a.index() - 1)}};
}

// The non-chirp part -sigma (i/2) c w(sigma i z) of G_p, bounded on the rays.
cplx alg_part(const AuxField& a, int side, cplx nu) {
  double t = a.t(), y = a.y();
  double sigma = sgn(t) * side;
  cplx c = std::exp(-I1 * (y * y / (4.0 * t)));
  cplx z = std::exp(I1 * (sgn(t) * kPi / 4.0)) * (2.0 * t * nu - y) / (2.0 * std::sqrt(std::abs(t)));
  return -sigma * 0.5 * I1 * c * faddeeva(sigma * I1 * z);
}

std::vector<Term> product(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> out;
  for (const auto& u : a)
    for (const auto& v : b) out.push_back(Term{u.alpha + v.alpha, u.beta + v.beta, u.coef * v.coef, u.algs | v.algs});
  return out;
}

int popcount(int m) { return (m & 1) + ((m >> 1) & 1); }

Mat4 comm(const Mat4& a, const Mat4& b) { return a * b - b * a; }

}  // namespace

void FourPointConfig::validate() const {
  for (int i = 0; i < 4; ++i)
    if (!std::isfinite(y[i]) || !std::isfinite(t[i])) throw InvalidConfig("FourPointConfig: non-finite entry");
  for (int s : coincident_side)
    if (s < -1 || s > 1) throw InvalidConfig("FourPointConfig: coincident side must be -1, 0 or 1");
}

bool FourPointConfig::coincident(int p) const { return dy(p) == 0.0 && dt(p) == 0.0; }

FourPointConfig FourPointConfig::correlation(double x1, double x2, double t) {
  FourPointConfig c;
  c.y = {-x1, x1, -x2, x2};
  c.t = {0.0, 0.0, t, t};
  c.coincident_side = {x1 == 0.0 ? 1 : 0, x2 == 0.0 ? 1 : 0};
  return c;
}

AuxField::AuxField(const FourPointConfig& cfg, int p) : p_(p) {
  if (p != 1 && p != 2) throw InvalidConfig("AuxField: p must be 1 or 2");
  y_ = cfg.dy(p);
  t_ = cfg.dt(p);
  yl_ = cfg.y[2 * p - 2];
  tl_ = cfg.t[2 * p - 2];
  yr_ = cfg.y[2 * p - 1];
  tr_ = cfg.t[2 * p - 1];
  if (cfg.coincident(p)) {
    side_ = cfg.coincident_side[p - 1];
    zero_ = side_ == 0;
  }
}

cplx AuxField::G(double lambda) const {
  if (zero_) return 0.0;
  if (side_ != 0) return -0.5 * I1 * double(side_);
  return pv_fresnel_hilbert(lambda, y_, t_) / (2.0 * kPi);
}

cplx AuxField::dG(double lambda) const {
  if (zero_ || side_ != 0) return 0.0;
  return pv_fresnel_hilbert_dlambda(cplx(lambda, 0.0), y_, t_) / (2.0 * kPi);
}

cplx AuxField::d2G(double lambda) const {
  if (zero_ || side_ != 0) return 0.0;
  cplx H = pv_fresnel_hilbert(lambda, y_, t_);
  cplx dH = pv_fresnel_hilbert_dlambda(cplx(lambda, 0.0), y_, t_);
  return (2.0 * I1 * t_ * H + I1 * (2.0 * t_ * lambda - y_) * dH) / (2.0 * kPi);
}

cplx AuxField::left_phase(double l) const { return std::exp(I1 * (tl_ * l * l - yl_ * l)); }
cplx AuxField::right_phase(double m) const { return std::exp(I1 * (-tr_ * m * m + yr_ * m)); }
cplx AuxField::right_phase_derivative(double m) const {
  return I1 * (-2.0 * tr_ * m + yr_) * right_phase(m);
}

std::array<cplx, 2> AuxField::eL(double l) const {
  cplx a = left_phase(l);
  return {-a, a * G(l)};
}

std::array<cplx, 2> AuxField::eR(double m) const {
  cplx b = (2.0 / kPi) * right_phase(m);
  return {b * G(m), b};
}

cplx AuxField::K(double l, double m) const {
  cplx ab = left_phase(l) * right_phase(m);
  if (l == m) return ab * dG(l);
  return ab * (G(l) - G(m)) / (l - m);
}

std::array<AuxSamples, 2> build_aux_fields(const FourPointConfig& cfg, const Quadrature& grid) {
  cfg.validate();
  std::array<AuxSamples, 2> out;
  for (int p = 1; p <= 2; ++p) {
    AuxField a(cfg, p);
    auto& s = out[p - 1];
    for (double l : grid.nodes) {
      s.G.push_back(a.G(l));
      s.eL.push_back(a.eL(l));
      s.eR.push_back(a.eR(l));
    }
  }
  return out;
}

DiscretizedOperator build_K_p(const AuxField& aux, const Quadrature& grid) {
  return assemble(grid, [&aux](double l, double m) { return aux.K(l, m); }, -2.0 / kPi);
}

// ---------------------------------------------------------------------------

struct EVectors::Pieces {
  cplx a = 0.0, b = 0.0, da = 0.0, db = 0.0;
};

EVectors::EVectors(const FourPointConfig& cfg, double extent)
    : cfg_(cfg), a1_(cfg, 1), a2_(cfg, 2), extent_(extent) {
  cfg.validate();
  if (!(extent >= 0.0) || !std::isfinite(extent)) throw InvalidConfig("EVectors: extent must be finite and >= 0");
  alpha0_ = cfg.t[2] - cfg.t[1];
  beta0_ = cfg.y[1] - cfg.y[2];
  if (alpha0_ == 0.0 && beta0_ == 0.0)
    throw DegenerateDelta("EVectors: y3 = y2 and t3 = t2 make the line integrals divergent");

  // cutoff beyond the evaluation points, the Faddeeva turning points and the
  // stationary points of every chirp term
  std::array<std::vector<Term>, 4> terms_any;
  Term chi{alpha0_, beta0_, 1.0, 0};
  for (int side : {1, -1}) {
    auto g1 = tail_terms(a1_, side), g2 = tail_terms(a2_, side);
    std::array<std::vector<Term>, 4> tx = {std::vector<Term>{chi}, product({chi}, g1), product({chi}, g2),
                                           product(product({chi}, g1), g2)};
    for (int X = 0; X < 4; ++X) terms_any[X].insert(terms_any[X].end(), tx[X].begin(), tx[X].end());
  }
  double R0 = extent + 2.0;
  for (const AuxField* a : {&a1_, &a2_})
    if (!a->vanishing() && a->t() != 0.0) R0 = std::max(R0, std::abs(a->y() / (2.0 * a->t())) + 1.0);
  for (const auto& tx : terms_any)
    for (const auto& tm : tx)
      if (tm.alpha != 0.0) R0 = std::max(R0, std::min(kMaxStationary, std::abs(tm.beta / (2.0 * tm.alpha)) + 1.0));
  R0_ = R0;

  // real-axis section
  double amax = 0.0, bmax = 0.0;
  for (const auto& tx : terms_any)
    for (const auto& tm : tx) {
      amax = std::max(amax, std::abs(tm.alpha));
      bmax = std::max(bmax, std::abs(tm.beta));
    }
  double smooth = 2.0 * (std::sqrt(std::abs(a1_.t())) + std::sqrt(std::abs(a2_.t()))) + 1e-3;
  const GLRule& gl = gauss_legendre(20);
  double x = -R0;
  while (x < R0) {
    double r = std::abs(x) + 0.5;
    double width = std::min({0.5, 8.0 / (2.0 * amax * r + bmax + smooth), R0 - x});
    double c = x + 0.5 * width;
    for (int i = 0; i < 20; ++i) {
      double nu = c + 0.5 * width * gl.x[i];
      mid_x_.push_back(nu);
      mid_w_.push_back(0.5 * width * gl.w[i]);
      mid_chi_.push_back(std::exp(I1 * (alpha0_ * nu * nu + beta0_ * nu)));
      mid_g1_.push_back(a1_.G(nu));
      mid_g2_.push_back(a2_.G(nu));
    }
    x += width;
  }

  // tails
  for (int side : {1, -1}) {
    auto g1 = tail_terms(a1_, side), g2 = tail_terms(a2_, side);
    std::array<std::vector<Term>, 4> tx = {std::vector<Term>{chi}, product({chi}, g1), product({chi}, g2),
                                           product(product({chi}, g1), g2)};
    for (int key : {1, -1, 0}) {
      std::array<std::vector<Term>, 4> mine;
      bool any = false;
      for (int X = 0; X < 4; ++X)
        for (const auto& tm : tx[X]) {
          double bs = side * tm.beta;
          int k = tm.alpha != 0.0 ? int(sgn(tm.alpha)) : (bs != 0.0 ? int(sgn(bs)) : 0);
          if (k != key) continue;
          mine[X].push_back(tm);
          any = true;
        }
      if (!any) continue;
      Ray ray;
      std::vector<cplx> jac;
      if (key == 0) {
        // nu = side R0 / v on (0, 1]
        const int panels = 8;
        for (int pn = 0; pn < panels; ++pn)
          for (int i = 0; i < 20; ++i) {
            double v = (pn + 0.5 + 0.5 * gl.x[i]) / panels;
            ray.nu.push_back(cplx(side * R0 / v, 0.0));
            jac.push_back(0.5 * gl.w[i] / panels * R0 / (v * v));
          }
      } else {
        double th = key * kRayAngle;
        cplx dir = std::exp(I1 * th);
        struct Prof { double a, b, f0, f1; };
        std::vector<Prof> prof;
        double U = 0.0;
        for (const auto& v : mine)
          for (const auto& tm : v) {
            double bs = side * tm.beta;
            Prof pr;
            if (tm.alpha != 0.0) {
              pr.a = std::abs(tm.alpha) * std::sin(2.0 * kRayAngle);
              pr.b = (2.0 * tm.alpha * R0 + bs) * std::sin(th);
              pr.f0 = std::abs(2.0 * tm.alpha * R0 + bs) * std::cos(th);
              pr.f1 = 2.0 * std::abs(tm.alpha) * std::cos(2.0 * th);
              U = std::max(U, (-pr.b + std::sqrt(pr.b * pr.b + 4.0 * pr.a * kDecay)) / (2.0 * pr.a));
            } else {
              pr.a = 0.0;
              pr.b = bs * std::sin(th);
              pr.f0 = std::abs(bs) * std::cos(th);
              pr.f1 = 0.0;
              U = std::max(U, kDecay / pr.b);
            }
            prof.push_back(pr);
          }
        U = std::min(U, 1e6);
        double u = 0.0;
        while (u < U) {
          double rate = 0.0;
          for (const auto& pr : prof) {
            double uu = u + 1.0;
            rate = std::max(rate, pr.f0 + pr.f1 * uu + std::abs(pr.b) + 2.0 * pr.a * uu);
          }
          double width = std::min({std::max(1.0, 0.25 * u), 8.0 / (rate + 1e-300), U - u});
          for (int i = 0; i < 20; ++i) {
            double uu = u + 0.5 * width * (1.0 + gl.x[i]);
            ray.nu.push_back(double(side) * (R0 + dir * uu));
            jac.push_back(0.5 * width * gl.w[i] * dir);
          }
          u += width;
        }
      }
      size_t m = ray.nu.size();
      for (int X = 0; X < 4; ++X) ray.h[X].assign(m, 0.0);
      for (size_t j = 0; j < m; ++j) {
        cplx nu = ray.nu[j];
        cplx alg[2] = {0.0, 0.0};
        if (!a1_.vanishing() && a1_.t() != 0.0) alg[0] = alg_part(a1_, side, nu);
        if (!a2_.vanishing() && a2_.t() != 0.0) alg[1] = alg_part(a2_, side, nu);
        for (int X = 0; X < 4; ++X)
          for (const auto& tm : mine[X]) {
            cplx v = tm.coef * std::exp(I1 * (tm.alpha * nu * nu + tm.beta * nu));
            if (tm.algs & 1) v *= alg[0];
            if (tm.algs & 2) v *= alg[1];
            ray.h[X][j] += v * jac[j];
          }
      }
      if (key == 0) {
        // algebraic terms: record the slowest decay per X
        for (int X = 0; X < 4; ++X) {
          int order = 99;
          for (const auto& tm : mine[X]) order = std::min(order, popcount(tm.algs));
          ray.min_order[X] = order;
        }
      }
      diag_.ray_nodes += static_cast<int>(m);
      rays_.push_back(std::move(ray));
    }
  }
  diag_.cutoff = R0;
  diag_.middle_nodes = static_cast<int>(mid_x_.size());
}

cplx EVectors::tail(int X, int rho_power, double lambda) const {
  cplx s = 0.0;
  for (const auto& ray : rays_) {
    if (ray.min_order[X] + rho_power < 2)
      throw DegenerateDelta("EVectors: non-oscillating tail decays too slowly (coincident points)");
    const auto& h = ray.h[X];
    for (size_t j = 0; j < h.size(); ++j) {
      cplx r = 1.0;
      for (int k = 0; k < rho_power; ++k) r /= (ray.nu[j] - lambda);
      s += h[j] * r;
    }
  }
  return s;
}

EVectors::Pieces EVectors::integrals(double l, bool left, bool derivative) const {
  if (std::abs(l) > extent_ * (1.0 + 1e-12) + 1e-12)
    throw InvalidConfig("EVectors: evaluation point outside the declared extent");
  const AuxField& ap = left ? a1_ : a2_;
  const auto& gp = left ? mid_g1_ : mid_g2_;
  cplx g = ap.G(l), dg = ap.dG(l);
  const GLRule& gl6 = gauss_legendre(8);
  Pieces pc;
  for (size_t k = 0; k < mid_x_.size(); ++k) {
    double nu = mid_x_[k], d = nu - l;
    cplx D, DD = 0.0;
    if (std::abs(d) >= kNear) {
      D = (gp[k] - g) / d;
      if (derivative) DD = (D - dg) / d;
    } else {
      D = 0.0;
      for (int i = 0; i < 8; ++i) {
        double s = 0.5 * (1.0 + gl6.x[i]), w = 0.5 * gl6.w[i];
        D += w * ap.dG(l + s * d);
        if (derivative) DD += w * (1.0 - s) * ap.d2G(l + s * d);
      }
    }
    cplx base = mid_w_[k] * mid_chi_[k];
    // left: int chi D1 and int chi D1 G2; right: int chi G1 D2 and int chi D2
    cplx other = left ? mid_g2_[k] : mid_g1_[k];
    pc.a += base * D;
    pc.b += base * D * other;
    if (derivative) {
      pc.da += base * DD;
      pc.db += base * DD * other;
    }
  }
  if (left) {
    pc.a += tail(1, 1, l) - g * tail(0, 1, l);
    pc.b += tail(3, 1, l) - g * tail(2, 1, l);
  } else {
    pc.a += tail(2, 1, l) - g * tail(0, 1, l);
    pc.b += tail(3, 1, l) - g * tail(1, 1, l);
    if (derivative) {
      pc.da += tail(2, 2, l) - g * tail(0, 2, l) - dg * tail(0, 1, l);
      pc.db += tail(3, 2, l) - g * tail(1, 2, l) - dg * tail(1, 1, l);
    }
  }
  return pc;
}

Vec4 EVectors::left(double l) const {
  Pieces pc = integrals(l, true, false);  // a = int chi D1, b = int chi D1 G2
  cplx A1 = a1_.left_phase(l), A2 = a2_.left_phase(l);
  return {-A1, A1 * a1_.G(l), -A2 - (2.0 / kPi) * A1 * pc.a, A2 * a2_.G(l) + (2.0 / kPi) * A1 * pc.b};
}

Vec4 EVectors::right(double m) const {
  Pieces pc = integrals(m, false, false);  // a = int chi D2, b = int chi G1 D2
  const double c = 2.0 / kPi;
  cplx B1 = a1_.right_phase(m), B2 = a2_.right_phase(m);
  return {c * B1 * a1_.G(m) + c * c * B2 * pc.b, c * B1 + c * c * B2 * pc.a, c * B2 * a2_.G(m), c * B2};
}

Vec4 EVectors::right_derivative(double m) const {
  Pieces pc = integrals(m, false, true);
  const double c = 2.0 / kPi;
  cplx B1 = a1_.right_phase(m), B2 = a2_.right_phase(m);
  cplx dB1 = a1_.right_phase_derivative(m), dB2 = a2_.right_phase_derivative(m);
  return {c * (dB1 * a1_.G(m) + B1 * a1_.dG(m)) + c * c * (dB2 * pc.b + B2 * pc.db),
          c * dB1 + c * c * (dB2 * pc.a + B2 * pc.da), c * (dB2 * a2_.G(m) + B2 * a2_.dG(m)), c * dB2};
}

cplx EVectors::M(double l, double m) const {
  Vec4 L = left(l);
  cplx s = 0.0;
  if (l == m) {
    Vec4 dR = right_derivative(l);
    for (int k = 0; k < 4; ++k) s += L[k] * dR[k];
    return 0.5 * kPi * s;
  }
  Vec4 R = right(m);
  for (int k = 0; k < 4; ++k) s += L[k] * R[k];
  return -0.5 * kPi * s / (l - m);
}

cplx EVectors::line_integral(int X) const {
  if (X < 0 || X > 3) throw InvalidConfig("EVectors::line_integral: index must be 0..3");
  if (X == 0) return 2.0 * kPi * gaussian_fresnel(-beta0_, alpha0_);
  cplx s = 0.0;
  for (size_t k = 0; k < mid_x_.size(); ++k) {
    cplx v = mid_w_[k] * mid_chi_[k];
    if (X == 1) v *= mid_g1_[k];
    if (X == 2) v *= mid_g2_[k];
    if (X == 3) v *= mid_g1_[k] * mid_g2_[k];
    s += v;
  }
  return s + tail(X, 0, 0.0);
}

Mat4 EVectors::Q() const {
  Mat4 q = Mat4::Zero();
  for (int p = 1; p <= 2; ++p) {
    const AuxField& a = aux(p);
    cplx g = a.limit_side() != 0 ? cplx(0.0) : gaussian_fresnel(a.y(), a.t());
    q(2 * p - 2, 2 * p - 1) = -g;
  }
  const double c = 2.0 / kPi;
  q(0, 2) = c * line_integral(1);
  q(0, 3) = -c * line_integral(3);
  q(1, 2) = c * line_integral(0);
  q(1, 3) = -c * line_integral(2);
  return q;
}

Mat4 build_Q(const FourPointConfig& cfg) { return EVectors(cfg, 0.0).Q(); }

ESamples build_E_vectors(const EVectors& ev, const Quadrature& grid) {
  int n = grid.size();
  ESamples s;
  s.left.resize(n);
  s.right.resize(n);
  s.right_derivative.resize(n);
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      double l = grid.nodes[i];
      s.left[i] = ev.left(l);
      s.right[i] = ev.right(l);
      s.right_derivative[i] = ev.right_derivative(l);
    } catch (...) {
      std::lock_guard<std::mutex> g(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return s;
}

DiscretizedOperator build_M_operator(const ESamples& e, const Quadrature& grid, std::vector<double> measure) {
  int n = grid.size();
  if (static_cast<int>(e.left.size()) != n) throw InvalidGrid("build_M_operator: samples do not match the grid");
  DiscretizedOperator op;
  op.quad = grid;
  op.scale = 2.0 / kPi;
  op.measure = std::move(measure);
  op.matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      if (i == j) {
        for (int k = 0; k < 4; ++k) s += e.left[i][k] * e.right_derivative[i][k];
        op.matrix(i, j) = 0.5 * kPi * s;
      } else {
        for (int k = 0; k < 4; ++k) s += e.left[i][k] * e.right[j][k];
        op.matrix(i, j) = -0.5 * kPi * s / (grid.nodes[i] - grid.nodes[j]);
      }
    }
  return op;
}

void NlsEnsemble::validate() const {
  thermal.validate();
  if (ground() && !(D > 0.0)) throw InvalidConfig("NlsEnsemble: D must be positive at T = 0");
  if (n < 2) throw InvalidGrid("NlsEnsemble: n must be >= 2");
}

SpectralLine nls_spectral_line(const NlsEnsemble& ens) {
  ens.validate();
  SpectralLine s;
  if (ens.ground()) {
    s.quad = mirror_grid(build_grid(0.0, kPi * ens.D, ens.n));
  } else {
    s.quad = mirror_grid(build_thermal_grid(ens.thermal, ens.n));
    for (double l : s.quad.nodes) s.measure.push_back(fermi_weight(l, ens.thermal));
  }
  s.extent = s.quad.b;
  return s;
}

Mat4 NlsMatrices::P(int j) {
  if (j < 1 || j > 4) throw InvalidConfig("NlsMatrices::P: j must be 1..4");
  Mat4 p = Mat4::Zero();
  p(j - 1, j - 1) = I1;
  return p;
}

NlsMatrices build_b(const FourPointConfig& cfg, const NlsEnsemble& ens) {
  SpectralLine line = nls_spectral_line(ens);
  EVectors ev(cfg, line.extent);
  ESamples es = build_E_vectors(ev, line.quad);
  DiscretizedOperator op = build_M_operator(es, line.quad, line.measure);
  int n = line.quad.size();
  std::vector<double> w = op.effective_weights();
  CMat A = CMat::Identity(n, n), At = CMat::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A(i, j) -= op.scale * op.matrix(i, j) * w[j];
      At(i, j) -= op.scale * op.matrix(j, i) * w[j];
    }
  CMat EL(n, 4), ER(n, 4);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < 4; ++k) {
      EL(i, k) = es.left[i][k];
      ER(i, k) = es.right[i][k];
    }
  Eigen::PartialPivLU<CMat> lu(A), lut(At);
  NlsMatrices r;
  r.FL = -lu.solve(EL);
  r.FR = lut.solve(ER);
  if (!r.FL.allFinite() || !r.FR.allFinite())
    throw SingularOperator("build_b: 1 - (2/pi) M is singular on the grid", INFINITY);
  r.B = Mat4::Zero();
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i) s += w[i] * r.FR(i, j) * EL(i, k);
      r.B(j, k) = s;
    }
  r.Q = ev.Q();
  r.b = r.B + r.Q;
  r.grid_size = n;
  return r;
}

Mat4 LaxPair::L(int j, cplx mu) const {
  Mat4 P = NlsMatrices::P(j);
  return mu * P + comm(b, P);
}

Mat4 LaxPair::M(int j, cplx mu) const { return -mu * L(j, mu) + db_dy[j - 1]; }

double LaxResidual::pair(int j, int k) const {
  const auto& c = coefficient[j - 1][k - 1];
  return std::max({c[0], c[1], c[2]});
}

double LaxResidual::max() const {
  double m = 0.0;
  for (int j = 1; j <= 4; ++j)
    for (int k = 1; k <= 4; ++k) m = std::max(m, pair(j, k));
  return m;
}

LaxResidual lax_compatibility_residual(const FourPointConfig& cfg, double step, const NlsEnsemble& ens) {
  cfg.validate();
  if (!(step > 0.0)) throw InvalidConfig("lax_compatibility_residual: step must be positive");
  if (cfg.coincident(1) || cfg.coincident(2))
    throw DegenerateDelta("lax_compatibility_residual: configuration has a coincident pair");
  // stencil: centre, +-y_j, +-t_j, and (+-y_j, +-y_k) for j < k
  std::vector<FourPointConfig> pts;
  auto shifted = [&](std::initializer_list<std::pair<int, double>> moves) {
    FourPointConfig c = cfg;
    for (auto [v, d] : moves) (v < 4 ? c.y[v] : c.t[v - 4]) += d;
    pts.push_back(c);
    return static_cast<int>(pts.size()) - 1;
  };
  int centre = shifted({});
  int yp[4], ym[4], tp[4], tm[4], mix[4][4][4];
  for (int j = 0; j < 4; ++j) {
    yp[j] = shifted({{j, step}});
    ym[j] = shifted({{j, -step}});
    tp[j] = shifted({{j + 4, step}});
    tm[j] = shifted({{j + 4, -step}});
  }
  const double sg[2] = {1.0, -1.0};
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k)
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) mix[j][k][2 * a + c] = shifted({{j, sg[a] * step}, {k, sg[c] * step}});

  std::vector<Mat4> b(pts.size());
  std::exception_ptr err;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    try {
      b[i] = build_b(pts[i], ens).b;
    } catch (...) {
      std::lock_guard<std::mutex> g(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  const double h = step;
  std::array<Mat4, 4> dy, dt;
  Mat4 d2[4][4];
  for (int j = 0; j < 4; ++j) {
    dy[j] = (b[yp[j]] - b[ym[j]]) / (2.0 * h);
    dt[j] = (b[tp[j]] - b[tm[j]]) / (2.0 * h);
    d2[j][j] = (b[yp[j]] - 2.0 * b[centre] + b[ym[j]]) / (h * h);
  }
  for (int j = 0; j < 4; ++j)
    for (int k = j + 1; k < 4; ++k) {
      d2[j][k] = (b[mix[j][k][0]] - b[mix[j][k][1]] - b[mix[j][k][2]] + b[mix[j][k][3]]) / (4.0 * h * h);
      d2[k][j] = d2[j][k];
    }
  const Mat4& b0 = b[centre];
  LaxResidual r;
  r.step = step;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      Mat4 Pj = NlsMatrices::P(j + 1), Pk = NlsMatrices::P(k + 1);
      Mat4 Cj = comm(b0, Pj), Ck = comm(b0, Pk);
      Mat4 c2 = -(comm(Pk, Cj) + comm(Ck, Pj));
      Mat4 c1 = comm(dy[k], Pj) + comm(Pk, dy[j]) - comm(Ck, Cj);
      Mat4 c0 = comm(dt[j], Pk) - d2[k][j] + comm(Ck, dy[j]);
      r.coefficient[j][k] = {c0.cwiseAbs().maxCoeff(), c1.cwiseAbs().maxCoeff(), c2.cwiseAbs().maxCoeff()};
    }
  return r;
}

}  // namespace bosegas
