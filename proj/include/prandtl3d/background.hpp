#pragma once

#include <map>
#include <string>

#include "prandtl3d/blasius.hpp"
#include "prandtl3d/field.hpp"
#include "prandtl3d/report.hpp"
#include "prandtl3d/weights.hpp"

namespace prandtl3d {

struct BackgroundSample {
  double u = 0, w = 0;
  double dz = 0, dzz = 0, dzzz = 0;
  double dx = 0, dxx = 0, dzx = 0;
};

// Symmetric background u_B = v_B = u_s((x+y)/2, z), w_B = w_s((x+y)/2, z)
// evaluated at z + eps0, where u_s = f'(zeta), zeta = z / sqrt(2 (s + x0)).
struct BackgroundProfile {
  Grid3 grid;
  BlasiusProfile blasius;
  double eps0 = 0, mu = 0, x0 = 1;
  Field ubar, d_z_ubar, d_x_ubar, d_zz_ubar, wbar;
  // Calibrated bounds for the assumption checks, keyed by check id.
  std::map<std::string, double> constants;

  // Analytic values at a point of the unlifted domain (z >= 0 means z + eps0).
  BackgroundSample sample(double x, double y, double z) const;
  // d^ns/ds^ns d^nz/dz^nz of u_s at s = (x+y)/2, lifted height z + eps0.
  double mixed(int ns, int nz, double x, double y, double z) const;
  // Normal velocity of the background at the lifted wall.
  double wall_w(Index i, Index j) const { return wbar(i, j, 0); }
};

BackgroundProfile build_background(const BlasiusProfile& b, const Grid3& g, double eps0,
                                   double mu = 0.2, bool calibrate = true);

// Raw ratio statistics behind every assumption check.
struct AssumptionRatio {
  std::string id;
  bool lower = false;  // true: value >= c * weight, else value <= C * weight
  Extremum stat{false};
  long excluded = 0;
};
std::vector<AssumptionRatio> assumption_ratios(const BackgroundProfile& p, const BarrierParams& w);

std::map<std::string, double> calibrate_assumptions(const BackgroundProfile& p,
                                                    const BarrierParams& w, double safety = 2.0);

DiagnosticsReport check_assumptions(const BackgroundProfile& p, const BarrierParams& w);
DiagnosticsReport check_assumptions(const BackgroundProfile& p);

// mu at which the Gaussian decay of the background matches the rescaled tail.
inline double calibrated_mu(double m = kBlasiusTailExponent) { return 0.8 * m; }

// Weight parameters matching a background (same mu and eps0).
BarrierParams weights_for(const BackgroundProfile& p);

}  // namespace prandtl3d
