#include "prandtl3d/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "prandtl3d/parallel.hpp"

namespace prandtl3d {

void SolverConfig::validate() const {
  if (eps0_schedule.empty()) throw DomainError("empty eps0 schedule");
  for (std::size_t n = 0; n < eps0_schedule.size(); ++n) {
    if (!(eps0_schedule[n] > 0)) throw DomainError("eps0 must be positive");
    if (n > 0 && !(eps0_schedule[n] < eps0_schedule[n - 1])) throw DomainError("eps0 schedule must decrease");
  }
  if (!(picard_tol >= 1e-12)) throw DomainError("picard_tol must be >= 1e-12");
  if (picard_max < 1 || inner_max < 1) throw DomainError("iteration limits must be positive");
  if (!(inner_tol > 0)) throw DomainError("inner_tol must be positive");
  if (upwind_order != 1 && upwind_order != 2) throw DomainError("upwind_order must be 1 or 2");
  if (!(u_floor_factor > 0)) throw DomainError("u_floor factor must be positive");
}

void write_trace_csv(std::ostream& os, const SolveTrace& t) {
  os << "eps0,n,delta_u,delta_v,min_dzu,max_absK,seconds\n";
  for (const auto& r : t.records)
    os << format_double(r.eps0) << ',' << r.n << ',' << format_double(r.delta_u) << ',' << format_double(r.delta_v)
       << ',' << format_double(r.min_dzu) << ',' << format_double(r.max_absK) << ',' << format_double(r.seconds)
       << '\n';
}

namespace {

struct ZOps {
  std::vector<std::array<double, 3>> cen, back2, fwd2;
  std::vector<double> hm, hp;
};

ZOps z_ops(const Grid3& g) {
  const Index nz = g.nz();
  ZOps o;
  o.cen.resize(nz);
  o.back2.resize(nz);
  o.fwd2.resize(nz);
  o.hm.assign(nz, 0);
  o.hp.assign(nz, 0);
  const double* z = g.z.data();
  for (Index k = 1; k + 1 < nz; ++k) {
    auto c = fd_weights(z + k - 1, 3, z[k], 1);
    o.cen[k] = {c[0], c[1], c[2]};
    if (k >= 2) {
      auto b = fd_weights(z + k - 2, 3, z[k], 1);
      o.back2[k] = {b[0], b[1], b[2]};
    }
    if (k + 2 < nz) {
      auto f = fd_weights(z + k, 3, z[k], 1);
      o.fwd2[k] = {f[0], f[1], f[2]};
    }
    o.hm[k] = z[k] - z[k - 1];
    o.hp[k] = z[k + 1] - z[k];
  }
  return o;
}

// Pentadiagonal solve without pivoting; overwrites the bands.
void solve_band(std::vector<double>& l2, std::vector<double>& l1, std::vector<double>& d, std::vector<double>& u1,
                std::vector<double>& u2, std::vector<double>& r, double* x) {
  const std::size_t n = d.size();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double m1 = l1[k + 1] / d[k];
    d[k + 1] -= m1 * u1[k];
    u1[k + 1] -= m1 * u2[k];
    r[k + 1] -= m1 * r[k];
    if (k + 2 < n) {
      const double m2 = l2[k + 2] / d[k];
      l1[k + 2] -= m2 * u1[k];
      d[k + 2] -= m2 * u2[k];
      r[k + 2] -= m2 * r[k];
    }
  }
  x[n - 1] = r[n - 1] / d[n - 1];
  if (n >= 2) x[n - 2] = (r[n - 2] - u1[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t k = n - 2; k-- > 0;) x[k] = (r[k] - u1[k] * x[k + 1] - u2[k] * x[k + 2]) / d[k];
}

// Solves one component on slab i+1.
void march_component(const VFContext& c, const ZOps& zo, const Plane& wall, const Plane& top, const Plane& side,
                     const Field& wprev, Index i, Field& w, const SolverConfig& cfg, const Field* src) {
  const Grid3& g = c.g();
  const Index nz = g.nz(), ny = g.ny(), ip = i + 1;
  const bool ord2 = cfg.upwind_order == 2;
  const double dx = g.dx(), dy = g.dy();
  const double cx0 = (ord2 && ip >= 2) ? 1.5 : 1.0, cx1 = (ord2 && ip >= 2) ? -2.0 : -1.0,
               cx2 = (ord2 && ip >= 2) ? 0.5 : 0.0;
  const Field& P = c.u();

  for (Index k = 0; k < nz; ++k) w(ip, 0, k) = side(ip, k);
  std::vector<double> l2(nz), l1(nz), d(nz), u1(nz), u2(nz), r(nz);
  std::vector<double> base_l2(nz), base_l1(nz), base_d(nz), base_u1(nz), base_u2(nz), base_r(nz);
  std::vector<double> cur(nz), next(nz), D(nz);

  for (Index j = 1; j < ny; ++j) {
    const bool y2 = ord2 && j >= 2;
    const double cy0 = y2 ? 1.5 : 1.0, cy1 = y2 ? -2.0 : -1.0, cy2 = y2 ? 0.5 : 0.0;
    std::fill(base_l2.begin(), base_l2.end(), 0.0);
    std::fill(base_l1.begin(), base_l1.end(), 0.0);
    std::fill(base_u1.begin(), base_u1.end(), 0.0);
    std::fill(base_u2.begin(), base_u2.end(), 0.0);
    base_d[0] = 1.0;
    base_r[0] = wall(ip, j);
    base_d[nz - 1] = 1.0;
    base_r[nz - 1] = top(ip, j);
    for (Index k = 1; k + 1 < nz; ++k) {
      const double qt = c.qtilde(ip, j, k);
      const double a = 1.0 + qt;
      const double bt = c.G(ip, j, k) + a * c.F(ip, j, k);
      double rhs = src ? (*src)(ip, j, k) : 0.0;
      rhs -= (cx1 * w(i, j, k) + (cx2 != 0.0 ? cx2 * w(i - 1, j, k) : 0.0)) / dx;
      rhs -= a * (cy1 * w(ip, j - 1, k) + (cy2 != 0.0 ? cy2 * w(ip, j - 2, k) : 0.0)) / dy;
      double dk = cx0 / dx + a * cy0 / dy;
      const double beta = -bt;
      double lo2 = 0, lo1 = 0, up1 = 0, up2 = 0;
      if (ord2) {
        if (beta > 0 && k >= 2) {
          lo2 += beta * zo.back2[k][0];
          lo1 += beta * zo.back2[k][1];
          dk += beta * zo.back2[k][2];
        } else if (beta < 0 && k + 2 < nz) {
          dk += beta * zo.fwd2[k][0];
          up1 += beta * zo.fwd2[k][1];
          up2 += beta * zo.fwd2[k][2];
        } else {
          lo1 += beta * zo.cen[k][0];
          dk += beta * zo.cen[k][1];
          up1 += beta * zo.cen[k][2];
        }
      } else if (beta > 0) {
        lo1 -= beta / zo.hm[k];
        dk += beta / zo.hm[k];
      } else if (beta < 0) {
        dk -= beta / zo.hp[k];
        up1 += beta / zo.hp[k];
      }
      base_l2[k] = lo2;
      base_l1[k] = lo1;
      base_d[k] = dk;
      base_u1[k] = up1;
      base_u2[k] = up2;
      base_r[k] = rhs;
    }

    for (Index k = 0; k < nz; ++k) cur[k] = wprev(ip, j, k);
    cur[0] = base_r[0];
    cur[nz - 1] = base_r[nz - 1];
    bool converged = false;
    for (int it = 0; it < cfg.inner_max; ++it) {
      for (Index k = 0; k < nz; ++k) D[k] = cur[k] / wprev(ip, j, k);
      l2 = base_l2;
      l1 = base_l1;
      d = base_d;
      u1 = base_u1;
      u2 = base_u2;
      r = base_r;
      for (Index k = 1; k + 1 < nz; ++k) {
        const double hm = zo.hm[k], hp = zo.hp[k];
        const double coef = 2.0 / (P(ip, j, k) * (hm + hp));
        const double Dp = 0.5 * (D[k] + D[k + 1]) / hp, Dm = 0.5 * (D[k] + D[k - 1]) / hm;
        u1[k] -= coef * Dp;
        l1[k] -= coef * Dm;
        d[k] += coef * (Dp + Dm);
      }
      solve_band(l2, l1, d, u1, u2, r, next.data());
      double change = 0;
      for (Index k = 0; k < nz; ++k) {
        change = std::max(change, std::abs(next[k] - cur[k]));
        cur[k] = next[k];
      }
      if (!std::isfinite(change)) break;
      if (change < cfg.inner_tol) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw InnerDivergence("diffusion lag did not converge at slab " + std::to_string(ip) + ", line " +
                            std::to_string(j));
    for (Index k = 0; k < nz; ++k) w(ip, j, k) = cur[k];
  }
}

}  // namespace

void march_step(const VFContext& ctx, const BoundaryData& bd, Index i, Field& un, Field& vn,
                const SolverConfig& cfg, const Sources* src) {
  const ZOps zo = z_ops(ctx.g());
  parallel_for(0, 2, [&](std::ptrdiff_t comp) {
    if (comp == 0)
      march_component(ctx, zo, bd.wall_u, bd.top_u, bd.side_u, ctx.u(), i, un, cfg, src ? &src->su : nullptr);
    else
      march_component(ctx, zo, bd.wall_v, bd.top_v, bd.side_v, ctx.v(), i, vn, cfg, src ? &src->sv : nullptr);
  });
}

namespace {

void check_slab(const Field& w, Index i, double floor, const char* name) {
  for (Index j = 0; j < w.ny(); ++j)
    for (Index k = 0; k < w.nz(); ++k)
      if (!(w(i, j, k) > floor))
        throw AdmissibilityLost(std::string(name) + " below floor at slab " + std::to_string(i));
}

}  // namespace

FieldState march(const VFContext& ctx, const BoundaryData& bd, const SolverConfig& cfg, int n, const Sources* src) {
  cfg.validate();
  const Grid3& g = ctx.g();
  Field un = g.zeros(), vn = g.zeros();
  for (Index j = 0; j < g.ny(); ++j)
    for (Index k = 0; k < g.nz(); ++k) {
      un(0, j, k) = bd.inflow_u(j, k);
      vn(0, j, k) = bd.inflow_v(j, k);
    }
  check_slab(un, 0, ctx.u_floor, "u");
  check_slab(vn, 0, ctx.u_floor, "v");
  const ZOps zo = z_ops(g);
  for (Index i = 0; i + 1 < g.nx(); ++i) {
    parallel_for(0, 2, [&](std::ptrdiff_t comp) {
      if (comp == 0)
        march_component(ctx, zo, bd.wall_u, bd.top_u, bd.side_u, ctx.u(), i, un, cfg, src ? &src->su : nullptr);
      else
        march_component(ctx, zo, bd.wall_v, bd.top_v, bd.side_v, ctx.v(), i, vn, cfg, src ? &src->sv : nullptr);
    });
    check_slab(un, i + 1, ctx.u_floor, "u");
    check_slab(vn, i + 1, ctx.u_floor, "v");
  }
  return make_state(g, std::move(un), std::move(vn), n);
}

PicardResult picard_solve(const Grid3& g, const BackgroundProfile& bg, const BoundaryProvider& boundary,
                          const SolverConfig& cfg, const FieldState* initial, const Sources* src,
                          const std::function<void(int, const FieldState&)>& on_iterate) {
  cfg.validate();
  if (!bg.grid.same_as(g)) throw GridMismatch("background grid differs from solver grid");
  const double floor = cfg.u_floor(bg.eps0);
  PicardResult res;
  auto prev = std::make_unique<FieldState>(initial ? *initial : make_state(g, bg.ubar, bg.ubar, 0));
  for (int n = 1; n <= cfg.picard_max; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const VFContext ctx = make_context(g, *prev, floor, &bg, cfg.wall_flux);
    const BoundaryData bd = boundary(*prev);
    auto next = std::make_unique<FieldState>(march(ctx, bd, cfg, n, src));
    SolveRecord rec;
    rec.eps0 = bg.eps0;
    rec.n = n;
    rec.delta_u = max_abs_diff(next->u, prev->u);
    rec.delta_v = max_abs_diff(next->v, prev->v);
    rec.min_dzu = d_dz(next->u, g).array().minCoeff();
    if (cfg.track_K) {
      const VFContext cn = make_context(g, *next, floor, &bg, cfg.wall_flux);
      rec.max_absK = max_abs(commutator_K_direct(cn));
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.records.push_back(rec);
    if (on_iterate) on_iterate(n, *next);
    prev = std::move(next);
    res.iterations = n;
    if (rec.delta_u + rec.delta_v < cfg.picard_tol) {
      res.state = std::move(*prev);
      return res;
    }
  }
  throw PicardStall("no convergence within " + std::to_string(cfg.picard_max) + " iterations");
}

double probe_gap(const Grid3& g, const FieldState& a, const FieldState& b, double z_probe) {
  double m = 0;
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k)
        if (g.z[k] >= z_probe)
          m = std::max(m, std::abs(a.u(i, j, k) - b.u(i, j, k)) + std::abs(a.v(i, j, k) - b.v(i, j, k)));
  return m;
}

ContinuationResult eps0_continuation(const Grid3& g, const BlasiusProfile& b, const PerturbationSpec& p,
                                     const SolverConfig& cfg, double mu) {
  cfg.validate();
  ContinuationResult out;
  std::unique_ptr<BackgroundProfile> old_bg;
  for (double eps0 : cfg.eps0_schedule) {
    auto bg = std::make_unique<BackgroundProfile>(build_background(b, g, eps0, mu, false));
    std::unique_ptr<FieldState> warm;
    if (!out.states.empty()) {
      const FieldState& last = out.states.back();
      Field u = like(last.u, last.u.array() + bg->ubar.array() - old_bg->ubar.array());
      Field v = like(last.v, last.v.array() + bg->ubar.array() - old_bg->ubar.array());
      warm = std::make_unique<FieldState>(make_state(g, std::move(u), std::move(v), 0));
    }
    const BackgroundProfile& ref = *bg;
    BoundaryProvider provider = [&](const FieldState& prev) {
      return build_boundary_data(g, ref, prev, p, cfg.wall_flux);
    };
    PicardResult r = picard_solve(g, ref, provider, cfg, warm.get());
    out.trace.records.insert(out.trace.records.end(), r.trace.records.begin(), r.trace.records.end());
    out.eps0.push_back(eps0);
    out.states.push_back(std::move(r.state));
    if (out.states.size() >= 2)
      out.gaps.push_back(probe_gap(g, out.states[out.states.size() - 2], out.states.back(), cfg.z_probe));
    old_bg = std::move(bg);
  }
  return out;
}

}  // namespace prandtl3d
