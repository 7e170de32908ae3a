#pragma once

#include "prandtl3d/background.hpp"
#include "prandtl3d/field.hpp"

namespace prandtl3d {

// Coefficients of the intrinsic vector fields built from an iterate:
//   grad_xi = d_x - G d_z, grad_eta = d_y - F d_z, grad_psi = (1/u) d_z,
// with G = int_0^z d_x u / u, F = int_0^z d_y v / v, qtilde = q / u.
struct VFContext {
  const Grid3* grid = nullptr;
  const FieldState* state = nullptr;
  const BackgroundProfile* background = nullptr;
  Field G, F, qtilde;
  Field Gz, Fz;
  double u_floor = 0;

  const Grid3& g() const { return *grid; }
  const Field& u() const { return state->u; }
  const Field& v() const { return state->v; }
};

// With wall_flux set, the background wall transpiration -wbar(x, y, 0) is
// split evenly into the numerators of G and F, so that G + (1 + qtilde) F
// equals -w / u for the lifted flow (requires background).
VFContext make_context(const Grid3& g, const FieldState& s, double u_floor,
                       const BackgroundProfile* background = nullptr, bool wall_flux = false);

enum class VF { Xi, Eta, Psi };

Field apply_xi(const VFContext& c, const Field& f);
Field apply_eta(const VFContext& c, const Field& f);
Field apply_psi(const VFContext& c, const Field& f);
Field apply(const VFContext& c, VF a, const Field& f);

// Background fields: grad_tau1 = d_x - (int_0^z d_x ubar / ubar) d_z,
// grad_tau2 likewise in y, grad_n = (1/ubar) d_z.
Field apply_tau1(const VFContext& c, const Field& f);
Field apply_tau2(const VFContext& c, const Field& f);
Field apply_n(const VFContext& c, const Field& f);

Field commutator_bracket(const VFContext& c, VF a, VF b, const Field& f);

// [grad_xi, grad_eta] = K d_z
Field commutator_K_direct(const VFContext& c);
Field commutator_K_integral(const VFContext& c);
Field dz_K(const VFContext& c, const Field& K);

// grad_eta qtilde / (1 + qtilde), the coefficient of [grad_eta, grad_psi].
Field eta_bracket_coefficient(const VFContext& c);

struct EuclideanDerivs {
  Field dx, dy, dz, dzz, dzx, dzy;
};
struct VFDerivs {
  Field xi, eta, psi, dzz, dz_xi, dz_eta;
};

EuclideanDerivs euclidean_derivs(const Grid3& g, const Field& f);
VFDerivs vf_derivs(const VFContext& c, const Field& f);
EuclideanDerivs to_euclidean(const VFContext& c, const VFDerivs& d);
VFDerivs from_euclidean(const VFContext& c, const EuclideanDerivs& d);

// d_x^2 f expressed through grad_xi, grad_psi and G.
Field dxx_via_vector_fields(const VFContext& c, const Field& f);

// Discretization noise of a round trip analytic background -> grid ->
// difference derivative, the scale below which K of a symmetric state is noise.
double roundtrip_noise(const BackgroundProfile& p);

}  // namespace prandtl3d
