#pragma once
#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "bosegas/fredholm.hpp"
#include "bosegas/kernels.hpp"

namespace bosegas {

using Mat4 = Eigen::Matrix4cd;
using Vec4 = std::array<cplx, 4>;

struct FourPointConfig {
  std::array<double, 4> y{}, t{};
  // For a pair with y_{2p} = y_{2p-1} and t_{2p} = t_{2p-1}: 0 keeps the
  // symmetric principal value (G_p = 0); +1 or -1 takes the limit
  // y_{2p} - y_{2p-1} -> 0 from that side.
  std::array<int, 2> coincident_side{0, 0};

  void validate() const;
  bool coincident(int p) const;
  double dy(int p) const { return y[2 * p - 1] - y[2 * p - 2]; }
  double dt(int p) const { return t[2 * p - 1] - t[2 * p - 2]; }
  // (-x1, x1, -x2, x2; 0, 0, t, t); x1 = 0 is taken as the limit from above
  static FourPointConfig correlation(double x1, double x2, double t);
};

// G_p and the vectors e_p^L, e_p^R of one pair p in {1, 2}.
class AuxField {
 public:
  AuxField(const FourPointConfig& cfg, int p);
  int index() const { return p_; }
  double y() const { return y_; }
  double t() const { return t_; }
  bool vanishing() const { return zero_; }
  int limit_side() const { return side_; }

  cplx G(double lambda) const;
  cplx dG(double lambda) const;
  cplx d2G(double lambda) const;
  cplx left_phase(double lambda) const;   // exp(i t_{2p-1} l^2 - i y_{2p-1} l)
  cplx right_phase(double mu) const;      // exp(-i t_{2p} m^2 + i y_{2p} m)
  cplx right_phase_derivative(double mu) const;
  std::array<cplx, 2> eL(double lambda) const;
  std::array<cplx, 2> eR(double mu) const;
  // K_p(lambda, mu) = (pi/2) e_p^L(lambda) e_p^R(mu) / (lambda - mu)
  cplx K(double lambda, double mu) const;

 private:
  int p_;
  double y_, t_;          // pair differences
  double yl_, tl_, yr_, tr_;  // y_{2p-1}, t_{2p-1}, y_{2p}, t_{2p}
  bool zero_ = false;
  int side_ = 0;
};

struct AuxSamples {
  std::vector<cplx> G;
  std::vector<std::array<cplx, 2>> eL, eR;
};
std::array<AuxSamples, 2> build_aux_fields(const FourPointConfig& cfg, const Quadrature& grid);

// K_p on the grid, applied as 1 + (2/pi) K_p.
DiscretizedOperator build_K_p(const AuxField& aux, const Quadrature& grid);

struct WholeLineDiagnostics {
  double cutoff = 0.0;  // real-axis section [-cutoff, cutoff]; rotated rays beyond
  int middle_nodes = 0;
  int ray_nodes = 0;
};

// E^L, E^R and the M kernel of a configuration. The whole-line integrals
// behind K_1 e_2^L and e_1^R K_2 have entire integrands; the section
// |nu| <= cutoff is integrated on the real axis and each tail is split into
// chirp terms, each integrated on a ray where it decays.
class EVectors {
 public:
  // Evaluation points must satisfy |lambda| <= extent.
  EVectors(const FourPointConfig& cfg, double extent);

  const AuxField& aux(int p) const { return p == 1 ? a1_ : a2_; }
  Vec4 left(double lambda) const;
  Vec4 right(double mu) const;
  Vec4 right_derivative(double mu) const;
  cplx M(double lambda, double mu) const;
  // int chi X dnu over the line, X in {1, G1, G2, G1 G2} (index 0..3),
  // chi = exp(i(t3-t2) nu^2 - i(y3-y2) nu)
  cplx line_integral(int X) const;
  Mat4 Q() const;
  const WholeLineDiagnostics& diagnostics() const { return diag_; }

 private:
  struct Pieces;
  Pieces integrals(double lambda, bool left, bool derivative) const;
  cplx tail(int X, int rho_power, double lambda) const;

  FourPointConfig cfg_;
  AuxField a1_, a2_;
  double alpha0_, beta0_, extent_, R0_ = 0.0;
  std::vector<double> mid_x_, mid_w_;
  std::vector<cplx> mid_chi_, mid_g1_, mid_g2_;
  struct Ray {
    std::vector<cplx> nu;
    std::array<std::vector<cplx>, 4> h;  // weighted chi X terms on the ray
    std::array<int, 4> min_order{99, 99, 99, 99};  // decay order of non-oscillating terms
  };
  std::vector<Ray> rays_;
  WholeLineDiagnostics diag_;
};

struct ESamples {
  std::vector<Vec4> left, right, right_derivative;
};
ESamples build_E_vectors(const EVectors& ev, const Quadrature& grid);

Mat4 build_Q(const FourPointConfig& cfg);

// M on the grid with its analytic diagonal, applied as 1 - (2/pi) M with the
// given node measure.
DiscretizedOperator build_M_operator(const ESamples& e, const Quadrature& grid, std::vector<double> measure = {});

struct NlsEnsemble {
  ThermalParams thermal;  // T = 0: domain [-q, q] with q = pi D
  double D = 1.0;
  int n = 32;             // nodes per half line
  void validate() const;
  bool ground() const { return thermal.T == 0.0; }
};

struct SpectralLine {
  Quadrature quad;
  std::vector<double> measure;
  double extent = 0.0;
};
SpectralLine nls_spectral_line(const NlsEnsemble& ens);

struct NlsMatrices {
  Mat4 Q, B, b;
  CMat FL, FR;  // grid samples, one column per component
  int grid_size = 0;
  static Mat4 P(int j);  // (P_j)_{lm} = i delta_{lj} delta_{mj}, j = 1..4
};

NlsMatrices build_b(const FourPointConfig& cfg, const NlsEnsemble& ens);

struct LaxPair {
  Mat4 b;
  std::array<Mat4, 4> db_dy;
  Mat4 L(int j, cplx mu) const;  // mu P_j + [b, P_j]
  Mat4 M(int j, cplx mu) const;  // -mu L_j + db/dy_j
};

struct LaxResidual {
  double step = 0.0;
  // max entry of the mu^0, mu^1, mu^2 coefficient matrices for each (j, k)
  std::array<std::array<std::array<double, 3>, 4>, 4> coefficient{};
  double pair(int j, int k) const;
  double max() const;
};

LaxResidual lax_compatibility_residual(const FourPointConfig& cfg, double step, const NlsEnsemble& ens);

}  // namespace bosegas
