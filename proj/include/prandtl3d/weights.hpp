#pragma once

#include <cmath>

#include "prandtl3d/errors.hpp"

namespace prandtl3d {

// Constants of the barrier families and the weighted bound ledger.
struct BarrierParams {
  double A = 10.0;
  double delta = 0.25;
  double N = 8.0;
  double mu = 0.2;
  double alpha = 0.1;
  double eps0 = 0.05;
  // Height of the near-wall zone used by the singular barrier inequalities.
  double delta0 = 0.1;
  // Exponent for the phi_{2,beta} family.
  double beta = 0.5;

  void validate() const {
    if (!(A > 0)) throw DomainError("barrier A must be positive");
    if (!(delta > 0 && delta <= 0.5)) throw DomainError("barrier delta must lie in (0, 1/2]");
    if (!(N > delta)) throw DomainError("barrier N must exceed delta");
    if (!(mu > 0 && alpha > 0 && eps0 > 0 && delta0 > 0)) throw DomainError("barrier constants must be positive");
    if (!(beta >= 0 && beta < 1)) throw DomainError("barrier beta must lie in [0, 1)");
  }
};

// Zone of the three-piece profile in the scaled variable t: 0 below delta,
// 1 on the plateau, 2 in the Gaussian tail beyond N.
inline int three_zone(const BarrierParams& p, double beta, double t) {
  if (t >= p.N) return 2;
  if (beta > 0 && t < p.delta) return 0;
  return 1;
}

// x-independent factor of the three-piece profile in t.
inline double three_zone_shape(const BarrierParams& p, double beta, double t, int zone) {
  switch (zone) {
    case 0: return std::pow(t, beta);
    case 1: return std::pow(p.delta, beta);
    default: return std::pow(p.delta, beta) * std::exp(p.mu * (p.N * p.N - t * t));
  }
}

// d/dt of three_zone_shape on the given branch.
inline double three_zone_slope(const BarrierParams& p, double beta, double t, int zone) {
  switch (zone) {
    case 0: return beta * std::pow(t, beta - 1.0);
    case 1: return 0.0;
    default: return -2.0 * p.mu * t * three_zone_shape(p, beta, t, 2);
  }
}

inline double phi1_variable(const BarrierParams& p, double x, double z) {
  return (z + p.eps0) / std::sqrt(x + 1.0);
}

// phi_{1,beta}(x, z); beta = 0 gives phi_{1,0}.
inline double phi1(const BarrierParams& p, double beta, double x, double z) {
  const double t = phi1_variable(p, x, z);
  return std::exp(p.A * x) * three_zone_shape(p, beta, t, three_zone(p, beta, t));
}

}  // namespace prandtl3d
