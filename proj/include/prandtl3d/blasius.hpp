#pragma once

#include <Eigen/Core>
#include <vector>

namespace prandtl3d {

struct BlasiusPoint {
  double f = 0, fp = 0, fpp = 0;
  double one_minus_fp = 1;
  double fppp() const { return -f * fpp; }
};

// Solution of f''' + f f'' = 0, f(0) = f'(0) = 0, f'(inf) = 1, tabulated on a
// uniform grid in zeta. one_minus_fp is integrated backward from the tail so
// it keeps full relative accuracy where 1 - f' is far below machine epsilon.
struct BlasiusProfile {
  Eigen::ArrayXd zeta_grid, f, fp, fpp, one_minus_fp;
  double fpp0 = 0;
  double zeta_max = 0;
  double step = 0;
  double x0 = 1.0;

  // Exact RK4 sub-step from the nearest tabulated node.
  BlasiusPoint at(double zeta) const;
  // f, f', ..., f^(kmax) at zeta using the ODE to generate higher derivatives.
  std::vector<double> derivatives(double zeta, int kmax) const;
};

BlasiusProfile solve_blasius(double zeta_max = 20.0, double step = 1e-3, double tol = 1e-8,
                             int max_iter = 200);

// Integrates from zeta = 0 with the given f''(0) and returns f'(zeta_max).
double shoot_blasius(double fpp0, double zeta_max, double step);

// Least-squares fit of 1 - f' ~ c zeta^-1 exp(-zeta^2/2 - C zeta) on [lo, hi],
// plus the range of the ratio against the fitted shape on [check_lo, check_hi].
struct TailFit {
  double C = 0, log_c = 0;
  double ratio_min = 0, ratio_max = 0;
};
TailFit fit_tail(const BlasiusProfile& p, double lo = 6.0, double hi = 10.0,
                 double check_lo = 6.0, double check_hi = 10.0);

struct RescaleParams {
  double a = 1, b = 1, k = 1;
  void validate() const;
};

// u(x, z) = f'(z / sqrt(2 (x + x0))) and the matching wall-normal velocity of
// the 2D steady boundary layer, under the scaling k u(a x, b z), b w(a x, b z).
class RescaledSampler {
 public:
  RescaledSampler(const BlasiusProfile& p, RescaleParams r);
  double u(double x, double z) const;
  double w(double x, double z) const;
  const RescaleParams& params() const { return r_; }

 private:
  const BlasiusProfile* p_;
  RescaleParams r_;
};

RescaledSampler rescale(const BlasiusProfile& p, RescaleParams r);

// Gaussian decay exponent in z^2 of 1 - u/k after rescaling, at position x.
double rescaled_tail_exponent(double m, const RescaleParams& r, double x);

// Decay exponent of 1 - f' in z^2 / (x + x0) for the unscaled profile.
inline constexpr double kBlasiusTailExponent = 0.25;

// The rescaling used to bring the tail exponent to 5 mu / 4 on [0, X].
RescaleParams tail_rescaling(double mu, double m, double X);

}  // namespace prandtl3d
