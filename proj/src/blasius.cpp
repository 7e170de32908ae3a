#include "prandtl3d/blasius.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <limits>
#include <cmath>

#include "prandtl3d/errors.hpp"

namespace prandtl3d {

namespace {

using State = std::array<double, 3>;

State rhs(const State& s) { return {s[1], s[2], -s[0] * s[2]}; }

State rk4(const State& s, double h) {
  auto axpy = [](const State& a, double c, const State& b) {
    return State{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
  };
  const State k1 = rhs(s);
  const State k2 = rhs(axpy(s, 0.5 * h, k1));
  const State k3 = rhs(axpy(s, 0.5 * h, k2));
  const State k4 = rhs(axpy(s, h, k3));
  State out;
  for (int q = 0; q < 3; ++q) out[q] = s[q] + h / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
  return out;
}

long step_count(double zeta_max, double step) {
  return static_cast<long>(std::llround(zeta_max / step));
}

}  // namespace

double shoot_blasius(double fpp0, double zeta_max, double step) {
  const long n = step_count(zeta_max, step);
  const double h = zeta_max / static_cast<double>(n);
  State s{0.0, 0.0, fpp0};
  for (long i = 0; i < n; ++i) s = rk4(s, h);
  return s[1];
}

BlasiusProfile solve_blasius(double zeta_max, double step, double tol, int max_iter) {
  if (!(zeta_max >= 10.0) || !(step > 0.0 && step <= 1e-2) || !(tol > 0.0 && tol <= 1e-8))
    throw DomainError("solve_blasius needs zeta_max >= 10, step <= 1e-2, tol <= 1e-8");
  double lo = 0.1, hi = 1.0;
  if (!(shoot_blasius(lo, zeta_max, step) < 1.0) || !(shoot_blasius(hi, zeta_max, step) > 1.0))
    throw NonConvergence("shooting bracket does not straddle f'(inf) = 1");
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double end = shoot_blasius(mid, zeta_max, step);
    if (end < 1.0)
      lo = mid;
    else
      hi = mid;
    if (1.0 - shoot_blasius(lo, zeta_max, step) < tol) {
      converged = true;
      break;
    }
    if (hi - lo <= 0.0) break;
  }
  if (!converged) throw NonConvergence("bisection on f''(0) did not reach tolerance");

  BlasiusProfile p;
  p.fpp0 = lo;
  p.zeta_max = zeta_max;
  const long n = step_count(zeta_max, step);
  p.step = zeta_max / static_cast<double>(n);
  p.zeta_grid.resize(n + 1);
  p.f.resize(n + 1);
  p.fp.resize(n + 1);
  p.fpp.resize(n + 1);
  State s{0.0, 0.0, lo};
  for (long i = 0; i <= n; ++i) {
    p.zeta_grid[i] = static_cast<double>(i) * p.step;
    p.f[i] = s[0];
    p.fp[i] = s[1];
    p.fpp[i] = s[2];
    if (i < n) s = rk4(s, p.step);
  }
  // Beyond zeta_max, f'' decays like exp(-int f), so the remaining integral of
  // f'' is f''/f to leading order. Corrected trapezoid keeps O(h^4) accuracy.
  p.one_minus_fp.resize(n + 1);
  p.one_minus_fp[n] = p.fpp[n] / p.f[n];
  const double h = p.step;
  for (long i = n - 1; i >= 0; --i) {
    const double g3a = -p.f[i] * p.fpp[i];
    const double g3b = -p.f[i + 1] * p.fpp[i + 1];
    p.one_minus_fp[i] = p.one_minus_fp[i + 1] + 0.5 * h * (p.fpp[i] + p.fpp[i + 1]) +
                        h * h / 12.0 * (g3a - g3b);
  }
  return p;
}

BlasiusPoint BlasiusProfile::at(double zeta) const {
  const long n = static_cast<long>(zeta_grid.size()) - 1;
  BlasiusPoint out;
  if (zeta >= zeta_max) {
    out.f = f[n] + (zeta - zeta_max);
    out.fp = fp[n];
    out.fpp = 0.0;
    out.one_minus_fp = 0.0;
    return out;
  }
  if (zeta <= 0.0) {
    out.f = f[0];
    out.fp = fp[0];
    out.fpp = fpp[0];
    out.one_minus_fp = one_minus_fp[0];
    return out;
  }
  long i = static_cast<long>(std::floor(zeta / step));
  i = std::clamp(i, 0L, n - 1);
  const double h = zeta - zeta_grid[i];
  const State s = rk4(State{f[i], fp[i], fpp[i]}, h);
  out.f = s[0];
  out.fp = s[1];
  out.fpp = s[2];
  out.one_minus_fp = one_minus_fp[i] - (s[1] - fp[i]);
  return out;
}

std::vector<double> BlasiusProfile::derivatives(double zeta, int kmax) const {
  const BlasiusPoint pt = at(zeta);
  std::vector<double> d(std::max(kmax, 2) + 1, 0.0);
  d[0] = pt.f;
  d[1] = pt.fp;
  d[2] = pt.fpp;
  for (int m = 0; m + 3 <= kmax; ++m) {
    double binom = 1.0, acc = 0.0;
    for (int j = 0; j <= m; ++j) {
      acc += binom * d[j] * d[m - j + 2];
      binom = binom * (m - j) / (j + 1);
    }
    d[m + 3] = -acc;
  }
  d.resize(kmax + 1);
  return d;
}

TailFit fit_tail(const BlasiusProfile& p, double lo, double hi, double check_lo, double check_hi) {
  std::vector<double> zs, ys;
  for (Eigen::Index i = 0; i < p.zeta_grid.size(); ++i) {
    const double z = p.zeta_grid[i];
    if (z < lo || z > hi) continue;
    zs.push_back(z);
    ys.push_back(std::log(p.one_minus_fp[i] * z) + 0.5 * z * z);
  }
  if (zs.size() < 2) throw DomainError("tail fit interval has fewer than two nodes");
  Eigen::MatrixXd A(zs.size(), 2);
  Eigen::VectorXd b(zs.size());
  for (std::size_t r = 0; r < zs.size(); ++r) {
    A(r, 0) = 1.0;
    A(r, 1) = -zs[r];
    b[r] = ys[r];
  }
  const Eigen::Vector2d sol = A.colPivHouseholderQr().solve(b);
  TailFit fit;
  fit.log_c = sol[0];
  fit.C = sol[1];
  fit.ratio_min = std::numeric_limits<double>::infinity();
  fit.ratio_max = 0.0;
  for (Eigen::Index i = 0; i < p.zeta_grid.size(); ++i) {
    const double z = p.zeta_grid[i];
    if (z < check_lo || z > check_hi) continue;
    const double shape = std::exp(fit.log_c - 0.5 * z * z - fit.C * z) / z;
    const double ratio = p.one_minus_fp[i] / shape;
    fit.ratio_min = std::min(fit.ratio_min, ratio);
    fit.ratio_max = std::max(fit.ratio_max, ratio);
  }
  return fit;
}

void RescaleParams::validate() const {
  if (!(a > 0 && b > 0 && k > 0)) throw DomainError("rescale parameters must be positive");
  if (std::abs(b * b - a * k) > 1e-12 * std::abs(a * k))
    throw DomainError("rescale parameters must satisfy b^2 = a k");
}

RescaledSampler::RescaledSampler(const BlasiusProfile& p, RescaleParams r) : p_(&p), r_(r) {
  r_.validate();
}

double RescaledSampler::u(double x, double z) const {
  const double L = std::sqrt(2.0 * (r_.a * x + p_->x0));
  return r_.k * p_->at(r_.b * z / L).fp;
}

double RescaledSampler::w(double x, double z) const {
  const double L = std::sqrt(2.0 * (r_.a * x + p_->x0));
  const double zeta = r_.b * z / L;
  const BlasiusPoint pt = p_->at(zeta);
  return r_.b * (zeta * pt.fp - pt.f) / L;
}

RescaledSampler rescale(const BlasiusProfile& p, RescaleParams r) { return RescaledSampler(p, r); }

double rescaled_tail_exponent(double m, const RescaleParams& r, double x) {
  return m * r.b * r.b / (r.a * x + 1.0);
}

RescaleParams tail_rescaling(double mu, double m, double X) {
  RescaleParams r;
  r.a = 1.0 / (100.0 * (1.0 + X));
  r.b = std::sqrt(5.0 * mu / (4.0 * m));
  r.k = r.b * r.b / r.a;
  return r;
}

}  // namespace prandtl3d
