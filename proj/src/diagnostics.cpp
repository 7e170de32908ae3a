#include "prandtl3d/diagnostics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include "prandtl3d/vector_calculus.hpp"

namespace prandtl3d {

namespace {

Field minus(const Field& a, const Field& b) { return like(a, a.array() - b.array()); }

// Rounding resolution of the z-difference of f at each node.
Field dz_resolution(const Field& f, const Grid3& g) {
  Field r = g.zeros();
  const auto& st = g.d1[2];
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        const Stencil& s = st[k];
        double acc = 0;
        for (int q = 0; q < s.n; ++q) acc += std::abs(s.w[q]) * std::abs(f(i, j, s.start + q));
        r(i, j, k) = 4.0 * DBL_EPSILON * acc;
      }
  return r;
}

struct Upper {
  Extremum e{false};
  long excluded = 0;
  void offer(double value, double weight, double x, double y, double z) {
    if (!(weight > kLedgerWeightFloor)) {
      ++excluded;
      return;
    }
    e.offer(std::abs(value) / weight, x, y, z);
  }
};

void add_upper(DiagnosticsReport& r, const std::string& id, const Upper& u, double limit) {
  ReportEntry en;
  en.check_id = id;
  en.zone = "all";
  const double v = std::max(u.e.value, 0.0);
  en.estimate = v;
  en.margin = 1.0 - v / limit;
  en.x = u.e.x;
  en.y = u.e.y;
  en.z = u.e.z;
  en.excluded = u.excluded;
  en.pass = en.margin >= 0.0;
  r.add(en);
}

}  // namespace

double calibrate_c0(const BackgroundProfile& bg, const BarrierParams& w) {
  const Grid3& g = bg.grid;
  double m = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        const double wt = std::pow(phi1(w, 0.0, g.x[i], g.z[k]), 1.5);
        if (wt > kLedgerWeightFloor) m = std::min(m, bg.d_z_ubar(i, j, k) / wt);
      }
  return 0.5 * m;
}

LedgerParams calibrate_ledger(const FieldState& s, const BackgroundProfile& bg, LedgerParams p) {
  const Grid3& g = bg.grid;
  if (p.c0 <= 0) p.c0 = calibrate_c0(bg, p.w);
  const VFContext c = make_context(g, s, p.u_floor, &bg, false);
  const Field K = commutator_K_direct(c);
  const Field Kz = d_dz(K, g);
  double kz = 0;
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        const double wt = phi1(p.w, 0.0, g.x[i], g.z[k]) / s.u(i, j, k);
        if (wt > kLedgerWeightFloor) kz = std::max(kz, std::abs(Kz(i, j, k)) / wt);
      }
  const double e2 = p.eps * p.eps;
  p.C2 = std::max(2.0 * max_abs(K) / e2, 1.0);
  p.C_dzK = std::max(2.0 * kz / e2, 1.0);
  return p;
}

DiagnosticsReport ledger_check(const FieldState& s, const BackgroundProfile& bg, const LedgerParams& p,
                               const FieldState* ref) {
  const Grid3& g = bg.grid;
  if (!s.u.same_shape(bg.ubar) || g.nx() != s.u.nx() || g.ny() != s.u.ny() || g.nz() != s.u.nz())
    throw GridMismatch("state and background differ in shape");
  if (ref && !ref->u.same_shape(s.u)) throw GridMismatch("reference state differs in shape");
  const bool discrete = ref != nullptr;
  FieldState bgs;
  if (!ref) {
    bgs = make_state(g, bg.ubar, bg.ubar, 0);
    ref = &bgs;
  }
  const BarrierParams& w = p.w;
  const double eps = p.eps;
  const double c0 = p.c0 > 0 ? p.c0 : calibrate_c0(bg, w);

  const Field du = minus(s.u, ref->u), dv = minus(s.v, ref->v);
  const EuclideanDerivs eu = euclidean_derivs(g, du), ev = euclidean_derivs(g, dv);
  const Field uxx = diff(du, g, Axis::X, 2), vxx = diff(dv, g, Axis::X, 2);
  const Field uyy = diff(du, g, Axis::Y, 2), vyy = diff(dv, g, Axis::Y, 2);
  const Field uxy = d_dy(eu.dx, g), vxy = d_dy(ev.dx, g);

  const VFContext c = make_context(g, s, p.u_floor, &bg, false);
  const Field K = commutator_K_direct(c);
  const Field Kz = d_dz(K, g);
  const VFContext cr = make_context(g, *ref, p.u_floor, &bg, false);
  const Field t1 = apply_xi(cr, ref->u), t2 = apply_eta(cr, ref->v);
  const Field t11 = apply_xi(cr, t1), t12 = apply_xi(cr, t2), t21 = apply_eta(cr, t1), t22 = apply_eta(cr, t2);
  // vector-field derivatives of both components against the tau images of ubar
  struct Tau {
    Field xi, eta, dz_xi, dz_eta, xx, xe, ex, ee;
  };
  auto tau = [&](const Field& f) {
    Tau t;
    t.xi = apply_xi(c, f);
    t.eta = apply_eta(c, f);
    t.dz_xi = d_dz(minus(t.xi, t1), g);
    t.dz_eta = d_dz(minus(t.eta, t2), g);
    t.xx = apply_xi(c, t.xi);
    t.xe = apply_xi(c, t.eta);
    t.ex = apply_eta(c, t.xi);
    t.ee = apply_eta(c, t.eta);
    return t;
  };
  const Tau tu = tau(s.u), tv = tau(s.v);
  const Field res_u = dz_resolution(s.u, g), res_v = dz_resolution(s.v, g);
  // d_z u = d_z ubar (exact) + D_z(u - ubar)
  const Field rdz_u = d_dz(minus(ref->u, bg.ubar), g), rdz_v = d_dz(minus(ref->v, bg.ubar), g);

  double wall_ratio = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      wall_ratio = std::min(wall_ratio, bg.ubar(i, j, 0) / bg.d_z_ubar(i, j, 0));

  Upper zu, zdz, zdxy, zdzdxy, zdd, zdzz;
  Upper bu, bdz, btau, bdztau, btt, bdzz, ksup, kdz;
  Extremum mono(true);
  long mono_excluded = 0;
  Extremum qt(false);
  const double a = w.alpha;
  const double e2 = eps * eps, e5 = std::pow(eps, 5), e6 = e5 * eps;
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        const double x = g.x[i], y = g.y[j], z = g.z[k];
        zu.offer(std::abs(du(i, j, k)) + std::abs(dv(i, j, k)), 1.0, x, y, z);
        zdz.offer(std::abs(eu.dz(i, j, k)) + std::abs(ev.dz(i, j, k)), 1.0, x, y, z);
        zdxy.offer(std::max(std::abs(eu.dx(i, j, k)) + std::abs(ev.dx(i, j, k)),
                            std::abs(eu.dy(i, j, k)) + std::abs(ev.dy(i, j, k))),
                   1.0, x, y, z);
        zdzdxy.offer(std::max(std::abs(eu.dzx(i, j, k)) + std::abs(ev.dzx(i, j, k)),
                              std::abs(eu.dzy(i, j, k)) + std::abs(ev.dzy(i, j, k))),
                     1.0, x, y, z);
        zdd.offer(std::max({std::abs(uxx(i, j, k)) + std::abs(vxx(i, j, k)),
                            std::abs(uxy(i, j, k)) + std::abs(vxy(i, j, k)),
                            std::abs(uyy(i, j, k)) + std::abs(vyy(i, j, k))}),
                  1.0, x, y, z);
        zdzz.offer(std::abs(eu.dzz(i, j, k)) + std::abs(ev.dzz(i, j, k)), 1.0, x, y, z);

        const double p0 = phi1(w, 0.0, x, z);
        bu.offer(std::max(std::abs(du(i, j, k)), std::abs(dv(i, j, k))), e6 * phi1(w, 1.0 + 2.0 * a, x, z), x, y, z);
        bdz.offer(std::max(std::abs(eu.dz(i, j, k)), std::abs(ev.dz(i, j, k))), e5 * phi1(w, a, x, z), x, y, z);
        btau.offer(std::max({std::abs(tu.xi(i, j, k) - t1(i, j, k)), std::abs(tu.eta(i, j, k) - t2(i, j, k)),
                             std::abs(tv.xi(i, j, k) - t1(i, j, k)), std::abs(tv.eta(i, j, k) - t2(i, j, k))}),
                   e2 * phi1(w, 1.0, x, z), x, y, z);
        bdztau.offer(std::max({std::abs(tu.dz_xi(i, j, k)), std::abs(tu.dz_eta(i, j, k)),
                               std::abs(tv.dz_xi(i, j, k)), std::abs(tv.dz_eta(i, j, k))}),
                     e2 * phi1(w, a, x, z), x, y, z);
        btt.offer(std::max({std::abs(tu.xx(i, j, k) - t11(i, j, k)), std::abs(tu.xe(i, j, k) - t12(i, j, k)),
                            std::abs(tu.ex(i, j, k) - t21(i, j, k)), std::abs(tu.ee(i, j, k) - t22(i, j, k)),
                            std::abs(tv.xx(i, j, k) - t11(i, j, k)), std::abs(tv.xe(i, j, k) - t12(i, j, k)),
                            std::abs(tv.ex(i, j, k) - t21(i, j, k)), std::abs(tv.ee(i, j, k) - t22(i, j, k))}),
                  e2 * phi1(w, 0.5 * a, x, z), x, y, z);
        bdzz.offer(std::abs(eu.dzz(i, j, k)),
                   eps / (1.0 + a / 7.0) * std::min(1.0, std::pow(z + wall_ratio, a)), x, y, z);

        const double floor = c0 * std::pow(p0, 1.5);
        const double dzu = bg.d_z_ubar(i, j, k) + eu.dz(i, j, k) + rdz_u(i, j, k);
        const double dzv = bg.d_z_ubar(i, j, k) + ev.dz(i, j, k) + rdz_v(i, j, k);
        if (floor > kLedgerWeightFloor && floor > std::max(res_u(i, j, k), res_v(i, j, k)))
          mono.offer(std::min(dzu, dzv) / floor, x, y, z);
        else
          ++mono_excluded;

        ksup.offer(K(i, j, k), e2 * p.C2, x, y, z);
        kdz.offer(Kz(i, j, k), e2 * p.C_dzK * p0 / s.u(i, j, k), x, y, z);
        qt.offer(std::abs(c.qtilde(i, j, k)), x, y, z);
      }

  DiagnosticsReport r;
  add_upper(r, "zt.u", zu, eps);
  add_upper(r, "zt.dz", zdz, eps);
  add_upper(r, "zt.dxy", zdxy, eps);
  add_upper(r, "zt.dzdxy", zdzdxy, eps);
  add_upper(r, "zt.dxydxy", zdd, eps);
  add_upper(r, "zt.dzz", zdzz, 2.0 * eps);
  add_upper(r, "boot.u", bu, p.d0);
  add_upper(r, "boot.dz", bdz, p.d0);
  add_upper(r, "boot.tau", btau, p.d0);
  add_upper(r, "boot.dztau", bdztau, p.d0);
  add_upper(r, "boot.tautau", btt, p.d0);
  add_upper(r, "boot.dzz", bdzz, 1.0);
  {
    ReportEntry en;
    en.check_id = "boot.mono";
    en.zone = "all";
    en.estimate = mono.value;
    en.margin = mono.value - 1.0;
    en.x = mono.x;
    en.y = mono.y;
    en.z = mono.z;
    en.excluded = mono_excluded;
    en.pass = en.margin >= 0.0;
    r.add(en);
  }
  add_upper(r, "K.sup", ksup, 1.0);
  add_upper(r, "K.dz", kdz, 1.0);
  {
    ReportEntry en;
    en.check_id = "adm.qtilde";
    en.zone = "all";
    en.estimate = qt.value;
    en.margin = 1.0 - 2.0 * qt.value;
    en.x = qt.x;
    en.y = qt.y;
    en.z = qt.z;
    en.pass = en.margin > 0.0;
    r.add(en);
  }
  r.metadata["eps"] = format_double(eps);
  r.metadata["eps0"] = format_double(bg.eps0);
  r.metadata["c0"] = format_double(c0);
  r.metadata["C2"] = format_double(p.C2);
  r.metadata["C_dzK"] = format_double(p.C_dzK);
  r.metadata["d0"] = format_double(p.d0);
  r.metadata["reference"] = discrete ? "discrete" : "analytic";
  r.metadata["grid"] = std::to_string(g.nx()) + "x" + std::to_string(g.ny()) + "x" + std::to_string(g.nz());
  return r;
}

}  // namespace prandtl3d
