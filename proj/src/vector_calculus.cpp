#include "prandtl3d/vector_calculus.hpp"

#include <cmath>

namespace prandtl3d {

VFContext make_context(const Grid3& g, const FieldState& s, double u_floor,
                       const BackgroundProfile* background, bool wall_flux) {
  if (s.u.nx() != g.nx() || s.u.ny() != g.ny() || s.u.nz() != g.nz())
    throw GridMismatch("state does not match grid");
  if (s.u.array().minCoeff() <= u_floor) throw DegenerateU("min u below floor");
  if (s.v.array().minCoeff() <= u_floor) throw DegenerateU("min v below floor");
  VFContext c;
  c.grid = &g;
  c.state = &s;
  c.background = background;
  c.u_floor = u_floor;
  c.qtilde = like(s.u, s.q.array() / s.u.array());
  if (c.qtilde.array().abs().maxCoeff() >= 0.5) throw DomainError("|qtilde| >= 1/2");
  Field nx = s.int_dx_u, ny = s.int_dy_v;
  if (wall_flux) {
    if (background == nullptr) throw DomainError("wall flux needs a background");
    for (Index i = 0; i < g.nx(); ++i)
      for (Index j = 0; j < g.ny(); ++j) {
        const double half = -0.5 * background->wall_w(i, j);
        for (Index k = 0; k < g.nz(); ++k) {
          nx(i, j, k) += half;
          ny(i, j, k) += half;
        }
      }
  }
  c.G = like(s.u, nx.array() / s.u.array());
  c.F = like(s.u, ny.array() / s.v.array());
  c.Gz = d_dz(c.G, g);
  c.Fz = d_dz(c.F, g);
  return c;
}

Field apply_xi(const VFContext& c, const Field& f) {
  return like(f, d_dx(f, c.g()).array() - c.G.array() * d_dz(f, c.g()).array());
}

Field apply_eta(const VFContext& c, const Field& f) {
  return like(f, d_dy(f, c.g()).array() - c.F.array() * d_dz(f, c.g()).array());
}

Field apply_psi(const VFContext& c, const Field& f) {
  return like(f, d_dz(f, c.g()).array() / c.u().array());
}

Field apply(const VFContext& c, VF a, const Field& f) {
  switch (a) {
    case VF::Xi: return apply_xi(c, f);
    case VF::Eta: return apply_eta(c, f);
    default: return apply_psi(c, f);
  }
}

namespace {
const BackgroundProfile& need_background(const VFContext& c) {
  if (c.background == nullptr) throw DomainError("background vector fields need a background");
  return *c.background;
}
}  // namespace

Field apply_tau1(const VFContext& c, const Field& f) {
  const BackgroundProfile& b = need_background(c);
  const Field Gb = like(b.ubar, cumulative_z(b.d_x_ubar, c.g()).array() / b.ubar.array());
  return like(f, d_dx(f, c.g()).array() - Gb.array() * d_dz(f, c.g()).array());
}

Field apply_tau2(const VFContext& c, const Field& f) {
  const BackgroundProfile& b = need_background(c);
  const Field Fb = like(b.ubar, cumulative_z(d_dy(b.ubar, c.g()), c.g()).array() / b.ubar.array());
  return like(f, d_dy(f, c.g()).array() - Fb.array() * d_dz(f, c.g()).array());
}

Field apply_n(const VFContext& c, const Field& f) {
  const BackgroundProfile& b = need_background(c);
  return like(f, d_dz(f, c.g()).array() / b.ubar.array());
}

Field commutator_bracket(const VFContext& c, VF a, VF b, const Field& f) {
  const Field ab = apply(c, a, apply(c, b, f));
  const Field ba = apply(c, b, apply(c, a, f));
  return like(f, ab.array() - ba.array());
}

Field commutator_K_direct(const VFContext& c) {
  const Grid3& g = c.g();
  return like(c.G, d_dy(c.G, g).array() - d_dx(c.F, g).array() + c.G.array() * c.Fz.array() -
                       c.F.array() * c.Gz.array());
}

Field eta_bracket_coefficient(const VFContext& c) {
  return like(c.G, apply_eta(c, c.qtilde).array() / (1.0 + c.qtilde.array()));
}

Field commutator_K_integral(const VFContext& c) {
  const Field s = apply_xi(c, eta_bracket_coefficient(c));
  const Field Ku = cumulative_z(like(s, -c.u().array() * s.array()), c.g());
  return like(s, Ku.array() / c.u().array());
}

Field dz_K(const VFContext& c, const Field& K) {
  const Field s = apply_xi(c, eta_bracket_coefficient(c));
  const Field uz = d_dz(c.u(), c.g());
  return like(K, -s.array() - K.array() * uz.array() / c.u().array());
}

EuclideanDerivs euclidean_derivs(const Grid3& g, const Field& f) {
  EuclideanDerivs d;
  d.dx = d_dx(f, g);
  d.dy = d_dy(f, g);
  d.dz = d_dz(f, g);
  d.dzz = d_zz(f, g);
  d.dzx = d_dz(d.dx, g);
  d.dzy = d_dz(d.dy, g);
  return d;
}

VFDerivs vf_derivs(const VFContext& c, const Field& f) {
  VFDerivs d;
  d.xi = apply_xi(c, f);
  d.eta = apply_eta(c, f);
  d.psi = apply_psi(c, f);
  d.dzz = d_zz(f, c.g());
  d.dz_xi = d_dz(d.xi, c.g());
  d.dz_eta = d_dz(d.eta, c.g());
  return d;
}

EuclideanDerivs to_euclidean(const VFContext& c, const VFDerivs& d) {
  EuclideanDerivs e;
  const auto& u = c.u().array();
  e.dz = like(d.psi, u * d.psi.array());
  e.dx = like(d.psi, d.xi.array() + c.G.array() * e.dz.array());
  e.dy = like(d.psi, d.eta.array() + c.F.array() * e.dz.array());
  e.dzz = d.dzz;
  e.dzx = like(d.psi, d.dz_xi.array() + c.Gz.array() * e.dz.array() + c.G.array() * d.dzz.array());
  e.dzy = like(d.psi, d.dz_eta.array() + c.Fz.array() * e.dz.array() + c.F.array() * d.dzz.array());
  return e;
}

VFDerivs from_euclidean(const VFContext& c, const EuclideanDerivs& e) {
  VFDerivs d;
  d.psi = like(e.dz, e.dz.array() / c.u().array());
  d.xi = like(e.dz, e.dx.array() - c.G.array() * e.dz.array());
  d.eta = like(e.dz, e.dy.array() - c.F.array() * e.dz.array());
  d.dzz = e.dzz;
  d.dz_xi = like(e.dz, e.dzx.array() - c.Gz.array() * e.dz.array() - c.G.array() * e.dzz.array());
  d.dz_eta = like(e.dz, e.dzy.array() - c.Fz.array() * e.dz.array() - c.F.array() * e.dzz.array());
  return d;
}

Field dxx_via_vector_fields(const VFContext& c, const Field& f) {
  const Grid3& g = c.g();
  const Field xi_f = apply_xi(c, f);
  const Field xi2 = apply_xi(c, xi_f);
  const Field xiG = apply_xi(c, c.G);
  const Field xiu = apply_xi(c, c.u());
  const Field fz = d_dz(f, g);
  const Field fzx = d_dz(d_dx(f, g), g);
  const Field dz_xi = d_dz(xi_f, g);
  return like(f, xi2.array() + xiG.array() * fz.array() + c.G.array() * fzx.array() +
                     c.G.array() * (xiu.array() / c.u().array() * fz.array() + dz_xi.array()));
}

double roundtrip_noise(const BackgroundProfile& p) {
  const Grid3& g = p.grid;
  return max_abs_diff(d_dx(p.ubar, g), p.d_x_ubar) + max_abs_diff(d_dz(p.ubar, g), p.d_z_ubar);
}

}  // namespace prandtl3d
