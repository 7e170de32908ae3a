#include <cmath>

#include "doctest.h"
#include "prandtl3d/blasius.hpp"

using namespace prandtl3d;

namespace {

// Independent shooting: its own RK4 on (f, f', f'') at half the step, and
// bisection on f''(0) against f'(zeta_max) = 1.
double oracle_fpp0(double zeta_max, double step) {
  auto end_slope = [&](double s0) {
    double y[3] = {0.0, 0.0, s0};
    const long n = std::lround(zeta_max / step);
    const double h = zeta_max / n;
    auto F = [](const double* v, double* out) {
      out[0] = v[1];
      out[1] = v[2];
      out[2] = -v[0] * v[2];
    };
    for (long i = 0; i < n; ++i) {
      double k1[3], k2[3], k3[3], k4[3], t[3];
      F(y, k1);
      for (int q = 0; q < 3; ++q) t[q] = y[q] + 0.5 * h * k1[q];
      F(t, k2);
      for (int q = 0; q < 3; ++q) t[q] = y[q] + 0.5 * h * k2[q];
      F(t, k3);
      for (int q = 0; q < 3; ++q) t[q] = y[q] + h * k3[q];
      F(t, k4);
      for (int q = 0; q < 3; ++q) y[q] += h / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
    }
    return y[1];
  };
  double a = 0.2, b = 0.8;
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (a + b);
    (end_slope(m) < 1.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("shooting reproduces the wall shear") {
  const BlasiusProfile p = solve_blasius(20.0, 1e-3, 1e-8);
  CHECK(p.f[0] == 0.0);
  CHECK(p.fp[0] == 0.0);
  CHECK(std::abs(p.fpp0 - 0.46960) < 1e-4);
  CHECK(std::abs(p.fpp0 - oracle_fpp0(20.0, 0.5e-3)) < 1e-6);
  const double end = p.fp[p.fp.size() - 1];
  CHECK(end <= 1.0);
  CHECK(end >= 1.0 - 1e-8);
}

TEST_CASE("profile is monotone with positive curvature") {
  const BlasiusProfile p = solve_blasius();
  for (Eigen::Index i = 0; i < p.fpp.size(); ++i) REQUIRE(p.fpp[i] > 0.0);
  for (Eigen::Index i = 1; i < p.fp.size(); ++i) {
    REQUIRE(p.fp[i] >= p.fp[i - 1]);
    REQUIRE(p.one_minus_fp[i] > 0.0);
    REQUIRE(p.one_minus_fp[i] < p.one_minus_fp[i - 1]);
    if (p.fpp[i] * p.step > 8 * std::numeric_limits<double>::epsilon()) REQUIRE(p.fp[i] > p.fp[i - 1]);
  }
}

TEST_CASE("ODE residual with a fourth-order third derivative") {
  const BlasiusProfile p = solve_blasius();
  const double h = p.step;
  double worst = 0.0;
  for (Eigen::Index i = 2; i + 2 < p.fpp.size(); ++i) {
    const double fppp =
        (p.fpp[i - 2] - 8 * p.fpp[i - 1] + 8 * p.fpp[i + 1] - p.fpp[i + 2]) / (12 * h);
    worst = std::max(worst, std::abs(fppp + p.f[i] * p.fpp[i]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("third difference of f matches -f f'' to second order") {
  const BlasiusProfile p = solve_blasius(20.0, 2e-3, 1e-8);
  auto gap_at_step = [&](int stride) {
    const double h = stride * p.step;
    double worst = 0.0;
    for (Eigen::Index i = 2 * stride; i + 2 * stride < 3000; i += stride) {
      const double d3 = (p.f[i + 2 * stride] - 2 * p.f[i + stride] + 2 * p.f[i - stride] -
                         p.f[i - 2 * stride]) / (2 * h * h * h);
      worst = std::max(worst, std::abs(d3 + p.f[i] * p.fpp[i]));
    }
    return worst;
  };
  const double e1 = gap_at_step(8), e2 = gap_at_step(4);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("shooting map is increasing") {
  const BlasiusProfile p = solve_blasius();
  CHECK(shoot_blasius(p.fpp0 + 1e-6, p.zeta_max, p.step) > shoot_blasius(p.fpp0, p.zeta_max, p.step));
}

TEST_CASE("tail follows the Gaussian asymptotics") {
  const BlasiusProfile p = solve_blasius();
  const TailFit fit = fit_tail(p, 6.0, 10.0, 6.0, 10.0);
  CHECK(fit.ratio_min > 0.5);
  CHECK(fit.ratio_max < 2.0);
  const TailFit wide = fit_tail(p, 6.0, 10.0, 5.0, 12.0);
  CHECK(wide.ratio_min > 0.25);
  CHECK(wide.ratio_max < 4.0);
  for (double z : {6.0, 8.0, 10.0}) {
    const BlasiusPoint pt = p.at(z);
    const double r = pt.fpp / (z * pt.one_minus_fp);
    CHECK(r > 0.5);
    CHECK(r < 2.0);
  }
}

TEST_CASE("sampling between nodes matches the table at nodes") {
  const BlasiusProfile p = solve_blasius();
  const BlasiusPoint pt = p.at(p.zeta_grid[1234]);
  CHECK(pt.fp == p.fp[1234]);
  const auto d = p.derivatives(1.5, 5);
  CHECK(d[3] == doctest::Approx(-d[0] * d[2]));
  CHECK(d[4] == doctest::Approx(-(d[1] * d[2] + d[0] * d[3])));
}

TEST_CASE("rescaling group") {
  const BlasiusProfile p = solve_blasius();
  const RescaledSampler id = rescale(p, {1, 1, 1});
  for (double x : {0.0, 0.3})
    for (double z : {0.0, 0.7, 3.1}) {
      const double L = std::sqrt(2.0 * (x + 1.0));
      CHECK(id.u(x, z) == p.at(z / L).fp);
    }
  CHECK_THROWS(RescaleParams{2, 1, 1}.validate());

  const double X = 0.1, mu = 0.2, m = kBlasiusTailExponent;
  const RescaleParams r = tail_rescaling(mu, m, X);
  CHECK_NOTHROW(r.validate());
  for (double x : {0.0, 0.05, 0.1}) {
    const double e = rescaled_tail_exponent(m, r, x);
    CHECK(e <= 1.25 * mu * (1 + 1e-14));
    CHECK(e >= 100.0 / 101.0 * 1.25 * mu * (1 - 1e-14));
  }

  // 2D steady boundary-layer residual of the rescaled field by central differences.
  const RescaledSampler s = rescale(p, {0.5, std::sqrt(0.5 * 3.0), 3.0});
  auto residual = [&](double h) {
    double worst = 0.0;
    for (double x : {0.2, 0.5, 0.8})
      for (double z : {0.3, 0.8, 1.6}) {
        const double ux = (s.u(x + h, z) - s.u(x - h, z)) / (2 * h);
        const double uz = (s.u(x, z + h) - s.u(x, z - h)) / (2 * h);
        const double uzz = (s.u(x, z + h) - 2 * s.u(x, z) + s.u(x, z - h)) / (h * h);
        worst = std::max(worst, std::abs(s.u(x, z) * ux + s.w(x, z) * uz - uzz));
      }
    return worst;
  };
  const double r1 = residual(0.04), r2 = residual(0.02);
  CHECK(r1 / r2 > 3.5);
  CHECK(r1 / r2 < 4.5);
}
