#pragma once

#include <vector>

#include "prandtl3d/background.hpp"
#include "prandtl3d/field.hpp"
#include "prandtl3d/report.hpp"

namespace prandtl3d {

// Boundary perturbation of the inflow data:
//   delta(x, y, z) = c eps^8 delta^2 e^{Ax} Y(y) Z(z),
//   Y(y) = 1 + kappa sin(k y),  Z(z) = (1 - e^{-(z/delta)^3}) e^{-mu z^2}.
// u and v get independent (c, kappa, k); the sum of c (1 + |kappa|) over both
// components stays <= 0.8 so that the data lies inside the Phi envelopes.
struct PerturbationSpec {
  double eps = 0.1;
  double A = 10.0, delta = 0.25, N = 8.0, mu = 0.2;
  double amp_u = 0.3, amp_v = -0.3;
  double kappa_u = 0.3, kappa_v = 0.3;
  double wavenumber_u = 3.0, wavenumber_v = 5.0;
  int i_max = 2;

  void validate() const;
  static PerturbationSpec zero() {
    PerturbationSpec p;
    p.amp_u = p.amp_v = 0;
    return p;
  }
};

struct PerturbationDerivs {
  double v = 0, dx = 0, dy = 0, dz = 0, dzz = 0, dzx = 0, dzy = 0, dxx = 0, dxy = 0, dyy = 0;
};

// Perturbation of u (v_component = false) or v at an unlifted height z.
PerturbationDerivs perturbation(const PerturbationSpec& p, bool v_component, double x, double y, double z);

// Phi_i of the boundary data envelopes.
double Phi(const PerturbationSpec& p, int i, double x, double z);

// Node-wise check of the boundary-data envelopes on the faces x = 0 and y = 0.
DiagnosticsReport check_envelopes(const PerturbationSpec& p, const BackgroundProfile& bg);

// Characteristics dy/ds = 1 + qtilde(x, y, 0), x = xi + s on the wall plane.
struct CharPath {
  double xi = 0, eta = 0;
  Index first = 0;            // x station of the seed
  std::vector<double> y;      // y at stations first, first+1, ...
  std::vector<double> dseed;  // d y / d(seed coordinate) along the path
};

struct CharField {
  // Ordered bottom to top at every station: y = 0 seeds with xi descending,
  // then x = 0 seeds with eta ascending.
  std::vector<CharPath> paths;
  double max_deta_y = 1.0;
};

CharField solve_characteristics(const Grid3& g, const Plane& qtilde0, int substeps = 4);

// Bilinear sample of a wall-plane field, clamped to the grid.
double sample_plane(const Grid3& g, const Plane& p, double x, double y);

// Compatibility residual F_1 on every wall node for u (v_component = false) or v.
Plane compat_F1(const Grid3& g, const BackgroundProfile& bg, const FieldState& prev, const PerturbationSpec& p,
                bool v_component, bool wall_flux = true);

// a^i on every path (same ordering as the CharField), i = 0 .. i_max.
struct CompatTables {
  std::vector<std::vector<double>> a;
};

CompatTables compat_coefficients(const Grid3& g, const BackgroundProfile& bg, const FieldState& prev,
                                 const PerturbationSpec& p, const CharField& cf, bool v_component,
                                 bool wall_flux = true);

// Dirichlet data consumed by the marcher.
struct BoundaryData {
  Plane wall_u, wall_v;      // z = 0, nx x ny
  Plane inflow_u, inflow_v;  // x = 0, ny x nz
  Plane side_u, side_v;      // y = 0, nx x nz
  Plane top_u, top_v;        // z = Zmax, nx x ny
};

// Faces of given 3D fields.
BoundaryData boundary_from_fields(const Field& u, const Field& v);

// Assembles the compatible data: wall values ubar + a^0 + sum a^i s^i / i! along
// the characteristics, the lifted perturbed inflow on x = 0 and y = 0.
BoundaryData build_boundary_data(const Grid3& g, const BackgroundProfile& bg, const FieldState& prev,
                                 const PerturbationSpec& p, bool wall_flux = true, CharField* out_chars = nullptr);

// The cutoff phi^i(s) with a quintic Hermite blend between the two junctions.
double cutoff(int i, double M, double s);

// d_x u on x = 0 from the compatibility relation d_x u = d_z(u int_0^z RHS / u^2),
// RHS = -v d_y u + int_0^z d_y v d_z u + d_z^2 u, plus -w0 d_z u when wall_w is given.
// u, v: ny x nz planes of the inflow face.
Plane trace_dx_u_at_inflow(const Grid3& g, const Plane& u, const Plane& v, double u_floor,
                           const std::vector<double>* wall_w = nullptr);

}  // namespace prandtl3d
