#include "prandtl3d/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

namespace prandtl3d {

namespace {

struct Branches {
  // shape and d(shape)/dt on a given branch at t
  std::function<double(double, int)> shape, slope;
};

// Builds a barrier e^{Ax} S(t) where t is a field and dt/dz is given.
BarrierEval build(const Grid3& g, double A, const Field& t, const Field& dt_dz,
                  const std::function<int(double)>& zone_of, const Branches& br) {
  BarrierEval b;
  b.A = A;
  b.values = g.zeros();
  b.shape = g.zeros();
  b.left_dz = g.zeros();
  b.right_dz = g.zeros();
  b.zone = Mask(g.nx(), g.ny(), g.nz());
  b.ridge_mask = Mask(g.nx(), g.ny(), g.nz());
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) b.zone(i, j, k) = static_cast<uint8_t>(zone_of(t(i, j, k)));

  auto reach = [](Index n, Index at) { return (at == 0 || at == n - 1) ? Index(2) : Index(1); };
  for (Index i = 0; i < g.nx(); ++i) {
    const double ex = std::exp(A * g.x[i]);
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        int lo = b.zone(i, j, k), hi = lo;
        auto visit = [&](Index a, Index bb, Index c) {
          const int z = b.zone(a, bb, c);
          lo = std::min(lo, z);
          hi = std::max(hi, z);
        };
        const Index ri = reach(g.nx(), i), rj = reach(g.ny(), j), rk = reach(g.nz(), k);
        for (Index d = -ri; d <= ri; ++d)
          if (i + d >= 0 && i + d < g.nx()) visit(i + d, j, k);
        for (Index d = -rj; d <= rj; ++d)
          if (j + d >= 0 && j + d < g.ny()) visit(i, j + d, k);
        for (Index d = -rk; d <= rk; ++d)
          if (k + d >= 0 && k + d < g.nz()) visit(i, j, k + d);
        const double tv = t(i, j, k);
        const int own = b.zone(i, j, k);
        const double s = br.shape(tv, own);
        b.shape(i, j, k) = s;
        b.values(i, j, k) = ex * s;
        b.ridge_mask(i, j, k) = lo != hi;
        b.left_dz(i, j, k) = ex * br.slope(tv, lo) * dt_dz(i, j, k);
        b.right_dz(i, j, k) = ex * br.slope(tv, hi) * dt_dz(i, j, k);
      }
  }
  return b;
}

BarrierEval three_piece(const Grid3& g, const BarrierParams& p, double beta, const Field& t,
                        const Field& dt_dz) {
  Branches br{[&](double tv, int z) { return three_zone_shape(p, beta, tv, z); },
              [&](double tv, int z) { return three_zone_slope(p, beta, tv, z); }};
  return build(g, p.A, t, dt_dz, [&](double tv) { return three_zone(p, beta, tv); }, br);
}

}  // namespace

BarrierEval eval_phi1(const Grid3& g, const BarrierParams& p, double beta) {
  p.validate();
  Field t = g.zeros(), dt = g.zeros();
  for (Index i = 0; i < g.nx(); ++i) {
    const double r = 1.0 / std::sqrt(g.x[i] + 1.0);
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        t(i, j, k) = (g.z[k] + p.eps0) * r;
        dt(i, j, k) = r;
      }
  }
  return three_piece(g, p, beta, t, dt);
}

BarrierEval eval_phi2(const Grid3& g, const BarrierParams& p, const Field& psi, const Field& u,
                      double beta) {
  p.validate();
  Field t = g.zeros(), dt = g.zeros();
  for (Index i = 0; i < g.nx(); ++i) {
    const double r = 1.0 / std::sqrt(g.x[i] + 1.0);
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        t(i, j, k) = psi(i, j, k) * r;
        dt(i, j, k) = u(i, j, k) * r;
      }
  }
  return three_piece(g, p, beta, t, dt);
}

BarrierEval eval_phi2_ridge(const Grid3& g, const BarrierParams& p, const Field& psi, const Field& u) {
  p.validate();
  const double a = p.alpha, d = p.delta;
  Branches br{[a, d](double s, int z) { return z == 0 ? s - std::pow(s, 1.0 + a) : d * (1.0 - std::pow(d, a)); },
              [a](double s, int z) { return z == 0 ? 1.0 - (1.0 + a) * std::pow(s, a) : 0.0; }};
  return build(g, p.A, psi, u, [d](double s) { return s < d ? 0 : 1; }, br);
}

namespace {

// b~ = G + (1 + qt) F
Field btilde(const VFContext& c) {
  return like(c.G, c.G.array() + (1.0 + c.qtilde.array()) * c.F.array());
}

Field transport(const VFContext& c, const Field& w, const Field& wz) {
  const Grid3& g = c.g();
  const Field b = btilde(c);
  return like(w, d_dx(w, g).array() + (1.0 + c.qtilde.array()) * d_dy(w, g).array() - b.array() * wz.array());
}

}  // namespace

Field apply_P1(const VFContext& c, const Field& un, const Field& w, PForm form) {
  const Grid3& g = c.g();
  const auto& u = c.u().array();
  if (form == PForm::VectorField) {
    const Field flux = like(w, un.array() * apply_psi(c, w).array());
    return like(w, apply_xi(c, w).array() + (1.0 + c.qtilde.array()) * apply_eta(c, w).array() -
                       apply_psi(c, flux).array());
  }
  const Field wz = d_dz(w, g);
  const Field ratio = like(w, un.array() / u);
  const Field ratio_z = d_dz(ratio, g);
  return like(w, transport(c, w, wz).array() - un.array() / (u * u) * d_zz(w, g).array() -
                     ratio_z.array() / u * wz.array());
}

Field apply_P2(const VFContext& c, const Field& un, const Field& w, PForm form) {
  const Grid3& g = c.g();
  const auto& u = c.u().array();
  if (form == PForm::VectorField) {
    return like(w, apply_xi(c, w).array() + (1.0 + c.qtilde.array()) * apply_eta(c, w).array() -
                       un.array() * apply_psi(c, apply_psi(c, w)).array());
  }
  const Field wz = d_dz(w, g);
  const Field uz = d_dz(c.u(), g);
  return like(w, transport(c, w, wz).array() -
                     un.array() / (u * u) * (d_zz(w, g).array() - uz.array() / u * wz.array()));
}

Field apply_P1_barrier(const VFContext& c, const Field& un, const BarrierEval& b) {
  return like(b.shape, apply_P1(c, un, b.shape).array() + b.A * b.shape.array());
}

Field apply_P2_barrier(const VFContext& c, const Field& un, const BarrierEval& b) {
  return like(b.shape, apply_P2(c, un, b.shape).array() + b.A * b.shape.array());
}

bool BarrierSuiteResult::all_pass() const {
  if (!(ridge_nodes == 0 || min_ridge_gap > 0)) return false;
  return std::all_of(rows.begin(), rows.end(), [](const BarrierCheckRow& r) { return r.min_margin > 0; });
}

namespace {

enum class Region { Near, Global, Far };

// Minimum over admissible nodes of lhs / bound (both already divided by e^{Ax}).
BarrierCheckRow scan(const Grid3& g, const std::string& name, Region region, const BarrierParams& p,
                     const Field& lhs, const Field& bound, const Mask& m1, const Mask& m2,
                     const Mask* far_zone, bool subtract_one) {
  Extremum e(true);
  for (Index i = 1; i < g.nx(); ++i)
    for (Index j = 1; j < g.ny(); ++j)
      for (Index k = 1; k + 1 < g.nz(); ++k) {
        const double z = g.z[k];
        if (region == Region::Near && z > p.delta0) continue;
        if (region == Region::Far && (z <= p.N || (*far_zone)(i, j, k) != 2)) continue;
        if (m1(i, j, k) || m2(i, j, k)) continue;
        e.offer(lhs(i, j, k) / bound(i, j, k), g.x[i], g.y[j], z);
      }
  BarrierCheckRow r;
  r.inequality = name;
  r.zone = region == Region::Near ? "near" : region == Region::Global ? "global" : "far";
  r.nodes = e.count;
  r.c2_est = e.value;
  r.min_margin = e.count == 0 ? 0.0 : (subtract_one ? e.value - 1.0 : e.value);
  r.x = e.x;
  r.y = e.y;
  r.z = e.z;
  return r;
}

void ridge_gaps(const BarrierEval& b, double& gap, long& count) {
  for (Index n = 0; n < b.values.size(); ++n) {
    if (!b.ridge_mask.array()[n]) continue;
    const double s = b.left_dz.array()[n] - b.right_dz.array()[n];
    if (s == 0.0) continue;  // both neighbours on the same branch along z
    ++count;
    gap = std::min(gap, s / std::max(std::abs(b.left_dz.array()[n]), std::abs(b.right_dz.array()[n])));
  }
}

}  // namespace

BarrierSuiteResult verify_barrier_inequalities(const VFContext& c, const Field& un, const BarrierParams& p) {
  p.validate();
  const Grid3& g = c.g();
  const Field& psi = c.state->psi;
  const Field& u = c.u();
  const BarrierEval f1a = eval_phi1(g, p, p.alpha);
  const BarrierEval f10 = eval_phi1(g, p, 0.0);
  const BarrierEval f2b = eval_phi2(g, p, psi, u, p.beta);
  const BarrierEval f20 = eval_phi2(g, p, psi, u, 0.0);
  const BarrierEval f21 = eval_phi2_ridge(g, p, psi, u);

  const Field P1_1a = apply_P1_barrier(c, un, f1a);
  const Field P2_2b = apply_P2_barrier(c, un, f2b);
  const Field P2_20 = apply_P2_barrier(c, un, f20);
  const Field P2_21 = apply_P2_barrier(c, un, f21);
  const Field P2_10 = apply_P2_barrier(c, un, f10);

  const double a = p.alpha, b = p.beta, A = p.A;
  const auto& ua = u.array();
  const auto& ps = psi.array();
  Field zeps = g.zeros();
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) zeps(i, j, k) = g.z[k] + p.eps0;

  const Field near1 = like(u, (a * (1 - a) / (ua * zeps.array().square()) + A) * f1a.shape.array());
  const Field near2 = like(u, (b * (1 - b) * ps.pow(-1.5) + A) * f2b.shape.array());
  const Field near3 = like(u, (a * ps.pow(a - 1.5) + A) * f21.shape.array());
  const Field global = like(u, A * f10.shape.array());

  BarrierSuiteResult r;
  r.rows.push_back(scan(g, "P1phi1a", Region::Near, p, P1_1a, near1, f1a.ridge_mask, f1a.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P2phi2b", Region::Near, p, P2_2b, near2, f2b.ridge_mask, f2b.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P2phi21", Region::Near, p, P2_21, near3, f21.ridge_mask, f21.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P1phi1a", Region::Global, p, P1_1a, global, f1a.ridge_mask, f10.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P2phi2b", Region::Global, p, P2_2b, global, f2b.ridge_mask, f10.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P2phi20", Region::Global, p, P2_20, global, f20.ridge_mask, f10.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P2phi21", Region::Global, p, P2_21, global, f21.ridge_mask, f10.ridge_mask, nullptr, false));
  r.rows.push_back(scan(g, "P2phi10", Region::Far, p, P2_10, global, f10.ridge_mask, f10.ridge_mask, &f10.zone, true));

  r.min_ridge_gap = std::numeric_limits<double>::infinity();
  for (const BarrierEval* e : {&f1a, &f10, &f2b, &f20, &f21}) ridge_gaps(*e, r.min_ridge_gap, r.ridge_nodes);
  if (r.ridge_nodes == 0) r.min_ridge_gap = 0;

  for (const auto& row : r.rows) {
    ReportEntry e;
    e.check_id = "barrier." + row.inequality;
    e.zone = row.zone;
    e.margin = row.min_margin;
    e.x = row.x;
    e.y = row.y;
    e.z = row.z;
    e.pass = row.nodes > 0 && row.min_margin > 0;
    e.estimate = row.c2_est;
    r.report.add(e);
  }
  ReportEntry gap;
  gap.check_id = "barrier.ridge_gap";
  gap.zone = "ridge";
  gap.margin = r.min_ridge_gap;
  gap.pass = r.ridge_nodes == 0 || r.min_ridge_gap > 0;
  r.report.add(gap);
  return r;
}

void write_barrier_csv(std::ostream& os, const BarrierSuiteResult& r) {
  os << "inequality,zone,min_margin,x,y,z,c2_est\n";
  for (const auto& row : r.rows)
    os << row.inequality << ',' << row.zone << ',' << format_double(row.min_margin) << ','
       << format_double(row.x) << ',' << format_double(row.y) << ',' << format_double(row.z) << ','
       << format_double(row.c2_est) << '\n';
  os << "ridge_gap,ridge," << format_double(r.min_ridge_gap) << ",0,0,0,"
     << format_double(r.min_ridge_gap) << '\n';
}

Field apply_L(const VFContext& c, const LSpec& L, const Field& f) {
  const Field fpsi = apply_psi(c, f);
  return like(f, apply_xi(c, f).array() + (1.0 + c.qtilde.array()) * apply_eta(c, f).array() +
                     L.b.array() * fpsi.array() - L.un.array() * apply_psi(c, fpsi).array() +
                     L.c.array() * f.array());
}

MPVerdict discrete_max_principle(const VFContext& c, const Field& f, const LSpec& L, const MPDomain& d) {
  const Grid3& g = c.g();
  if (!f.same_shape(c.u()) || !L.b.same_shape(f) || !L.c.same_shape(f) || !L.un.same_shape(f))
    throw GridMismatch("max principle fields do not match grid");
  if ((1.0 + c.qtilde.array()).minCoeff() <= 0) throw DomainError("1 + qtilde must be positive");
  Index ktop = g.nz() - 1;
  if (d.bounded) {
    ktop = 0;
    while (ktop + 1 < g.nz() && g.z[ktop] < d.z0) ++ktop;
  }

  const Field fpsi = apply_psi(c, f);
  const Field terms[] = {apply_xi(c, f), like(f, (1.0 + c.qtilde.array()) * apply_eta(c, f).array()),
                         like(f, L.b.array() * fpsi.array()),
                         like(f, L.un.array() * apply_psi(c, fpsi).array()), like(f, L.c.array() * f.array())};
  const Field Lf = like(f, terms[0].array() + terms[1].array() + terms[2].array() - terms[3].array() +
                               terms[4].array());

  MPVerdict v;
  double scale = 0;
  Extremum lf(false), bd(false), all(false), tilt(false);
  v.tilt_B = L.c.array().abs().maxCoeff() + 1.0;
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k <= ktop; ++k) {
        const double fv = f(i, j, k);
        all.offer(fv, g.x[i], g.y[j], g.z[k]);
        tilt.offer(fv * std::exp(-v.tilt_B * g.x[i]), g.x[i], g.y[j], g.z[k]);
        const bool face = i == 0 || j == 0 || k == 0 || (d.bounded && k == ktop);
        if (face) {
          bd.offer(fv, g.x[i], g.y[j], g.z[k]);
        } else if (k < ktop) {
          lf.offer(Lf(i, j, k), g.x[i], g.y[j], g.z[k]);
          for (const Field& t : terms) scale = std::max(scale, std::abs(t(i, j, k)));
        }
      }
  const double fscale = std::max(std::abs(all.value), max_abs(f));
  v.max_Lf_interior = lf.value;
  v.max_f_boundary = bd.value;
  v.max_f = all.value;
  v.tilt_max = tilt.value;

  auto fail = [&](MPOutcome o, const char* what, const Extremum& e) {
    v.outcome = o;
    v.failed = what;
    v.x = e.x;
    v.y = e.y;
    v.z = e.z;
    return v;
  };
  if (bd.value > d.tol * fscale) return fail(MPOutcome::HypothesisFailed, "f <= 0 on the boundary faces", bd);
  if (lf.value > d.tol * scale) return fail(MPOutcome::HypothesisFailed, "Lf <= 0 in the interior", lf);
  if (!d.bounded && all.value > d.M) return fail(MPOutcome::HypothesisFailed, "f <= M", all);
  if (all.value > d.tol * fscale) return fail(MPOutcome::ConclusionFailed, "f <= 0", all);
  return v;
}

const char* to_string(MPOutcome o) {
  switch (o) {
    case MPOutcome::Holds: return "holds";
    case MPOutcome::HypothesisFailed: return "hypothesis_failed";
    default: return "conclusion_failed";
  }
}

}  // namespace prandtl3d
