#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdarg>
#include <cstring>
#include <limits>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "prandtl3d/barrier.hpp"
#include "prandtl3d/io.hpp"
#include "prandtl3d/parallel.hpp"

using namespace prandtl3d;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const BlasiusProfile& blasius() {
  static const BlasiusProfile p = solve_blasius();
  return p;
}

// RK4 on (f, f', f'') at half the library step, bisection on f''(0).
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

Outcome criterion1() {
  const auto t0 = Clock::now();
  const BlasiusProfile p = solve_blasius();
  const double t = seconds_since(t0);
  const double oracle = oracle_fpp0(p.zeta_max, 0.5 * p.step);
  double residual = 0;
  const double h = p.step;
  for (Index i = 2; i + 2 < p.fpp.size(); ++i) {
    const double fppp = (p.fpp[i - 2] - 8 * p.fpp[i - 1] + 8 * p.fpp[i + 1] - p.fpp[i + 2]) / (12 * h);
    residual = std::max(residual, std::abs(fppp + p.f[i] * p.fpp[i]));
  }
  const TailFit fit = fit_tail(p, 6.0, 10.0, 6.0, 10.0);
  const bool tail = fit.ratio_min > 0.5 && fit.ratio_max < 2.0;
  const double gap = std::abs(p.fpp0 - oracle);
  return {gap < 1e-6 && residual < 1e-8 && tail && t < 1.0,
          fmt("fpp0=%.10f oracle gap %.2e, residual %.2e, tail ratio [%.3f, %.3f], %.3f s", p.fpp0, gap, residual,
              fit.ratio_min, fit.ratio_max, t)};
}

double regression_error(Index n, const SolverConfig& cfg) {
  const Grid3 g = Grid3::make(n, n, 4 * n, 0.1, 0.1, 14.0);
  const BackgroundProfile bg = build_background(blasius(), g, cfg.eps0_schedule.front(), 0.2, false);
  BoundaryProvider bp = [&](const FieldState&) { return boundary_from_fields(bg.ubar, bg.ubar); };
  const PicardResult r = picard_solve(g, bg, bp, cfg);
  return std::max(max_abs_diff(r.state.u, bg.ubar), max_abs_diff(r.state.v, bg.ubar));
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  SolverConfig cfg;
  cfg.track_K = false;
  const double e1 = regression_error(32, cfg), e2 = regression_error(64, cfg), e3 = regression_error(128, cfg);
  const double t = seconds_since(t0);
  const double expect = cfg.upwind_order == 2 ? 4.0 : 2.0;
  const double r1 = e1 / e2, r2 = e2 / e3;
  const bool ok = std::abs(r1 / expect - 1) < 0.2 && std::abs(r2 / expect - 1) < 0.2 && t < 120.0;
  return {ok, fmt("order %d: |u-ubar| %.3e %.3e %.3e, ratios %.2f %.2f (expect %.0f), %.1f s", cfg.upwind_order, e1, e2,
                  e3, r1, r2, expect, t)};
}

struct KSetup {
  Grid3 g;
  BackgroundProfile bg;
  FieldState sym, asym;
  KSetup(Index n, double eps0)
      : g(Grid3::make(n, n, 4 * n, 0.1, 0.1, 8.0)), bg(build_background(blasius(), g, eps0, 0.2, false)) {
    Field v = bg.ubar;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < g.nz(); ++k)
          v(i, j, k) *= 1.0 + 0.01 * g.z[k] * std::exp(-g.z[k]) * (1.0 + g.x[i] - 2.0 * g.y[j]);
    sym = make_state(g, bg.ubar, bg.ubar, 0);
    asym = make_state(g, bg.ubar, v, 0);
  }
};

Outcome criterion3() {
  const auto t0 = Clock::now();
  std::vector<double> gaps;
  bool wall = true, symmetric = true;
  double worst_sym = 0, noise = 0;
  for (Index n : {17, 33, 65}) {
    const KSetup s(n, 0.05);
    const VFContext c = make_context(s.g, s.asym, 1e-4, &s.bg);
    const Field K1 = commutator_K_direct(c), K2 = commutator_K_integral(c);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) wall = wall && K1(i, j, 0) == 0.0 && K2(i, j, 0) == 0.0;
    gaps.push_back(max_abs_diff(K1, K2));
    const VFContext cs = make_context(s.g, s.sym, 1e-4, &s.bg);
    const double nz = roundtrip_noise(s.bg);
    const double ks = std::max(max_abs(commutator_K_direct(cs)), max_abs(commutator_K_integral(cs)));
    symmetric = symmetric && ks < 100.0 * nz;
    worst_sym = std::max(worst_sym, ks);
    noise = nz;
  }
  const double t = seconds_since(t0);
  const double p1 = std::log2(gaps[0] / gaps[1]), p2 = std::log2(gaps[1] / gaps[2]);
  const bool ok = p1 >= 0.8 && p2 >= 0.8 && wall && symmetric && t < 30.0;
  return {ok, fmt("gaps %.3e %.3e %.3e (orders %.2f %.2f), K(z=0)=0 %s, symmetric max|K| %.2e vs noise %.2e, %.1f s",
                  gaps[0], gaps[1], gaps[2], p1, p2, wall ? "yes" : "no", worst_sym, noise, t)};
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  double e1[2], e2[2];
  int slot = 0;
  for (Index n : {17, 33}) {
    const KSetup s(n, 0.5);
    const VFContext c = make_context(s.g, s.asym, 1e-4, &s.bg);
    Field f = s.g.zeros();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < s.g.nz(); ++k)
          f(i, j, k) = std::sin(3 * s.g.x[i] + 2 * s.g.y[j]) * std::exp(-0.5 * s.g.z[k]) + 0.1 * s.g.z[k] * s.g.z[k];
    e1[slot] = max_abs(commutator_bracket(c, VF::Xi, VF::Psi, f));
    const Field br = commutator_bracket(c, VF::Eta, VF::Psi, f);
    e2[slot] = max_abs_diff(br, like(f, eta_bracket_coefficient(c).array() * apply_psi(c, f).array()));
    ++slot;
  }
  const double t = seconds_since(t0);
  const double p1 = std::log2(e1[0] / e1[1]), p2 = std::log2(e2[0] / e2[1]);
  return {p1 >= 0.8 && p2 >= 0.8 && t < 30.0,
          fmt("[xi,psi] %.2e -> %.2e (order %.2f); [eta,psi] gap %.2e -> %.2e (order %.2f), %.1f s", e1[0], e1[1], p1,
              e2[0], e2[1], p2, t)};
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (double stretch : {0.0, 2.0}) {
    const Grid3 g = Grid3::make(16, 16, 256, 0.1, 0.1, 14.0, stretch);
    const BackgroundProfile bg = build_background(blasius(), g, 0.05, 0.2, false);
    const FieldState s = make_state(g, bg.ubar, bg.ubar, 0);
    const VFContext c = make_context(g, s, 5e-5, &bg);
    BarrierParams p;
    p.A = 1000;
    const BarrierSuiteResult r = verify_barrier_inequalities(c, s.u, p);
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& row : r.rows) {
      worst = std::min(worst, row.min_margin);
      ok = ok && row.nodes > 0 && row.min_margin > 0;
    }
    ok = ok && r.ridge_nodes > 0 && r.min_ridge_gap > 0 && r.all_pass();
    detail += fmt("stretch %.0f: %zu rows, min margin %.3e, %ld ridge nodes, min ridge gap %.3e; ", stretch,
                  r.rows.size(), worst, r.ridge_nodes, r.min_ridge_gap);
  }
  const double t = seconds_since(t0);
  return {ok && t < 60.0, detail + fmt("%.1f s", t)};
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  const Grid3 g = Grid3::make(16, 16, 256, 0.1, 0.1, 14.0);
  const BackgroundProfile bg = build_background(blasius(), g, 0.05, 0.2, false);
  const FieldState s = make_state(g, bg.ubar, bg.ubar, 0);
  const VFContext c = make_context(g, s, 5e-5, &bg);
  const BarrierParams p;
  int holds = 0, hyp = 0;
  const MPDomain open;

  const LSpec L{g.zeros(), g.zeros(), s.u};
  const BarrierEval f10 = eval_phi1(g, p, 0.0);
  if (discrete_max_principle(c, like(f10.values, -f10.values.array()), L, open).outcome == MPOutcome::Holds) ++holds;

  const LSpec L2{Field(g.nx(), g.ny(), g.nz(), 0.5), Field(g.nx(), g.ny(), g.nz(), 4.0), s.u};
  Field f = g.zeros(), fz = g.zeros();
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) {
        const double ps = s.psi(i, j, k), z = g.z[k];
        f(i, j, k) = -(1 + ps * ps * std::exp(-ps)) * std::exp(g.x[i]);
        fz(i, j, k) = -(1 + z * z * std::exp(-z)) * std::exp(g.x[i]);
      }
  if (discrete_max_principle(c, f, L2, open).outcome == MPOutcome::Holds) ++holds;

  const Field L0 = apply_L(c, L, fz);
  const double cz = 1.0 + 1.1 * (L0.array() / (-fz.array())).maxCoeff();
  const LSpec L3{g.zeros(), Field(g.nx(), g.ny(), g.nz(), cz), s.u};
  MPDomain bounded;
  bounded.bounded = true;
  bounded.z0 = 6.0;
  if (discrete_max_principle(c, fz, L3, bounded).outcome == MPOutcome::Holds) ++holds;

  const BarrierEval f21 = eval_phi2_ridge(g, p, s.psi, s.u);
  const MPVerdict bad = discrete_max_principle(c, f21.values, L, open);
  if (bad.outcome == MPOutcome::HypothesisFailed) ++hyp;
  const double t = seconds_since(t0);
  return {holds >= 3 && hyp >= 1 && t < 30.0,
          fmt("%d of 3 admissible pairs hold, violation classified %s (%s), %.1f s", holds, to_string(bad.outcome),
              bad.failed.c_str(), t)};
}

Outcome criterion7() {
  const auto t0 = Clock::now();
  const Grid3 g = Grid3::make(64, 64, 256, 0.1, 0.1, 14.0);
  const double eps0 = 0.05;
  const BackgroundProfile bg = build_background(blasius(), g, eps0, 0.2, false);
  SolverConfig cfg;
  cfg.eps0_schedule = {eps0};
  cfg.picard_tol = 1e-10;
  cfg.picard_max = 30;
  PerturbationSpec p;
  p.eps = 1e-3;
  auto provider = [&](const PerturbationSpec& ps) {
    return BoundaryProvider([&, ps](const FieldState& s) { return build_boundary_data(g, bg, s, ps, cfg.wall_flux); });
  };
  const PicardResult ref = picard_solve(g, bg, provider(PerturbationSpec::zero()), cfg);
  const PicardResult sol = picard_solve(g, bg, provider(p), cfg);
  const double t = seconds_since(t0);

  bool monotone = true;
  const auto& rec = sol.trace.records;
  for (std::size_t n = 1; n < rec.size(); ++n)
    monotone = monotone && rec[n].delta_u + rec[n].delta_v < rec[n - 1].delta_u + rec[n - 1].delta_v;
  const double last = rec.back().delta_u + rec.back().delta_v;

  LedgerParams lp;
  lp.eps = p.eps;
  lp.w.eps0 = eps0;
  lp.w.A = p.A;
  lp.u_floor = cfg.u_floor(eps0);
  lp = calibrate_ledger(ref.state, bg, lp);
  const DiagnosticsReport r = ledger_check(sol.state, bg, lp, &ref.state);
  bool zt = true;
  std::string margins;
  for (const char* id : {"zt.u", "zt.dz", "zt.dxy", "zt.dzdxy", "zt.dxydxy", "zt.dzz", "boot.mono"}) {
    const ReportEntry* e = r.find(id);
    zt = zt && e && e->pass;
    margins += fmt("%s %.3g ", id, e ? e->margin : -1.0);
  }
  const DiagnosticsReport ra = ledger_check(sol.state, bg, lp);
  std::string analytic;
  for (const char* id : {"zt.u", "zt.dz", "zt.dxy", "zt.dzdxy", "zt.dxydxy", "zt.dzz"})
    analytic += fmt("%s %.3g ", id, ra.find(id)->margin);
  std::printf("  info: criterion 7 margins against the analytic background: %s\n", analytic.c_str());
  const bool ok = zt && monotone && last < cfg.picard_tol && sol.iterations <= 30 && t < 600.0;
  return {ok, fmt("%d Picard iterations, final delta %.2e, monotone %s; margins vs discrete background: %s; %.1f s",
                  sol.iterations, last, monotone ? "yes" : "no", margins.c_str(), t)};
}

Outcome criterion8() {
  const auto t0 = Clock::now();
  const Grid3 g = Grid3::make(64, 64, 256, 0.1, 0.1, 14.0);
  SolverConfig cfg;
  cfg.eps0_schedule = {0.1, 0.05, 0.025};
  cfg.track_K = false;
  PerturbationSpec p;
  p.eps = 0.1;
  const ContinuationResult r = eps0_continuation(g, blasius(), p, cfg);
  const double t = seconds_since(t0);
  const bool ok = r.gaps.size() == 2 && r.gaps[1] < r.gaps[0] && t < 1800.0;
  return {ok, fmt("gaps on z >= %.1f: %.4e -> %.4e (ratio %.3f), %.1f s", cfg.z_probe, r.gaps[0], r.gaps[1],
                  r.gaps[1] / r.gaps[0], t)};
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  const Grid3 g = Grid3::make(16, 16, 64, 0.1, 0.1, 14.0);
  const BackgroundProfile bg = build_background(blasius(), g, 0.05, 0.2, false);
  SolverConfig cfg;
  PerturbationSpec p;
  p.eps = 0.1;
  auto run = [&](int threads, std::string& snap, std::string& report, std::string& trace, std::string& barriers) {
    set_thread_count(threads);
    BoundaryProvider bp = [&](const FieldState& s) { return build_boundary_data(g, bg, s, p, true); };
    const PicardResult r = picard_solve(g, bg, bp, cfg);
    std::ostringstream a, b, c, d;
    write_snapshot(a, snapshot_of(g, r.state));
    LedgerParams lp;
    lp.eps = p.eps;
    lp.w.eps0 = 0.05;
    write_report_csv(b, ledger_check(r.state, bg, lp));
    SolveTrace tr = r.trace;
    for (auto& rec : tr.records) rec.seconds = 0;
    write_trace_csv(c, tr);
    const VFContext ctx = make_context(g, r.state, cfg.u_floor(0.05), &bg, true);
    BarrierParams bpar;
    bpar.A = 1000;
    write_barrier_csv(d, verify_barrier_inequalities(ctx, r.state.u, bpar));
    snap = a.str();
    report = b.str();
    trace = c.str();
    barriers = d.str();
  };
  std::string s1, r1, t1, b1, s4, r4, t4, b4;
  run(1, s1, r1, t1, b1);
  run(4, s4, r4, t4, b4);
  set_thread_count(1);
  std::istringstream in(s1);
  std::ostringstream again;
  write_snapshot(again, read_snapshot(in));
  const bool roundtrip = again.str() == s1;
  bool rejected = false;
  std::istringstream cfgtext("grid.nx = 16\ngrid.ny = 16\ngrid.nz = 64\nsolver.picard_tolerance = 1e-9\n");
  try {
    parse_config(cfgtext);
  } catch (const ParseError& e) {
    rejected = e.line() == 4;
  }
  const bool repro = s1 == s4 && r1 == r4 && t1 == t4 && b1 == b4;
  const double t = seconds_since(t0);
  return {roundtrip && rejected && repro,
          fmt("snapshot round trip %s (%zu bytes), unknown key rejected at its line %s, 1 vs 4 threads identical %s, %.1f s",
              roundtrip ? "identical" : "differs", s1.size(), rejected ? "yes" : "no", repro ? "yes" : "no", t)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                     criterion6, criterion7, criterion8, criterion9};
  std::vector<int> pick;
  for (int a = 1; a < argc; ++a) pick.push_back(std::atoi(argv[a]));
  if (pick.empty())
    for (int n = 1; n <= 9; ++n) pick.push_back(n);
  int failed = 0;
  for (int n : pick) {
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try {
      o = all[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", n, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
