#include <cmath>

#include "doctest.h"
#include "prandtl3d/barrier.hpp"

using namespace prandtl3d;

namespace {

const BlasiusProfile& blasius() {
  static const BlasiusProfile p = solve_blasius();
  return p;
}

struct Setup {
  Grid3 g;
  BackgroundProfile bg;
  FieldState s;
  Setup(Index n, Index nz, double Zmax = 14.0, double eps0 = 0.05)
      : g(Grid3::make(n, n, nz, 0.1, 0.1, Zmax)),
        bg(build_background(blasius(), g, eps0)),
        s(make_state(g, bg.ubar, bg.ubar, 0)) {}
};

Field fill(const Grid3& g, double (*fn)(double, double, double)) {
  Field f = g.zeros();
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j)
      for (Index k = 0; k < g.nz(); ++k) f(i, j, k) = fn(g.x[i], g.y[j], g.z[k]);
  return f;
}

double interior_max(const Grid3& g, const Field& f) {
  double m = 0;
  for (Index i = 1; i + 1 < g.nx(); ++i)
    for (Index j = 1; j + 1 < g.ny(); ++j)
      for (Index k = 1; k + 1 < g.nz(); ++k) m = std::max(m, std::abs(f(i, j, k)));
  return m;
}

}  // namespace

TEST_CASE("three-piece profiles are continuous at their breakpoints") {
  BarrierParams p;
  for (double beta : {0.0, 0.1, 0.5}) {
    if (beta > 0) CHECK(three_zone_shape(p, beta, p.delta, 0) == doctest::Approx(three_zone_shape(p, beta, p.delta, 1)).epsilon(1e-15));
    CHECK(three_zone_shape(p, beta, p.N, 1) == doctest::Approx(three_zone_shape(p, beta, p.N, 2)).epsilon(1e-15));
  }
  const double d = p.delta, a = p.alpha;
  CHECK(d - std::pow(d, 1 + a) == doctest::Approx(d * (1 - std::pow(d, a))).epsilon(1e-15));
  CHECK(phi1(p, 0.0, 0.05, 0.0) > 0);
}

TEST_CASE("P1 and P2 on constants, on ubar, and across forms") {
  const Setup s(17, 128);
  const VFContext c = make_context(s.g, s.s, 5e-5, &s.bg, true);
  const Field one(s.g.nx(), s.g.ny(), s.g.nz(), 3.0);
  CHECK(max_abs(apply_P1(c, s.s.u, one)) < 1e-10);
  CHECK(max_abs(apply_P2(c, s.s.u, one)) < 1e-10);
  CHECK(max_abs(apply_P1(c, s.s.u, one, PForm::VectorField)) < 1e-10);
  CHECK(max_abs(apply_P2(c, s.s.u, one, PForm::VectorField)) < 1e-10);

  // With the lifted transpiration in b~, u P1 ubar is the steady residual and
  // P2 ubar - (grad_psi ubar)^2 equals P1 ubar.
  auto residuals = [](Index n) {
    const Setup t(n, 8 * (n - 1) + 1, 14.0);
    const VFContext ct = make_context(t.g, t.s, 5e-5, &t.bg, true);
    const Field P1 = apply_P1(ct, t.s.u, t.s.u);
    const Field gp = apply_psi(ct, t.s.u);
    const Field P2 = like(P1, apply_P2(ct, t.s.u, t.s.u).array() - gp.array().square());
    return std::pair{interior_max(t.g, like(P1, P1.array() * t.s.u.array())), interior_max(t.g, like(P1, P2.array() - P1.array()))};
  };
  const auto [r1, d1] = residuals(9);
  const auto [r2, d2] = residuals(17);
  MESSAGE("P1 ubar residual " << r1 << " -> " << r2);
  CHECK(r1 / r2 > 3.0);
  CHECK(d2 < 1e-9);

  // Euclidean and vector-field forms agree to O(h) on a smooth field.
  auto gap = [](Index n) {
    const Setup t(n, 4 * (n - 1) + 1, 8.0, 0.5);
    const VFContext ct = make_context(t.g, t.s, 1e-4, &t.bg);
    const Field w = fill(t.g, [](double x, double y, double z) { return std::sin(2 * x + y) * std::exp(-0.3 * z) * z; });
    const Field un = like(w, t.s.u.array() * 1.01);
    return std::pair{max_abs_diff(apply_P1(ct, un, w), apply_P1(ct, un, w, PForm::VectorField)),
                     max_abs_diff(apply_P2(ct, un, w), apply_P2(ct, un, w, PForm::VectorField))};
  };
  const auto [a1, b1] = gap(9);
  const auto [a2, b2] = gap(17);
  MESSAGE("form gaps " << a1 << " " << a2 << " / " << b1 << " " << b2);
  CHECK(a1 / a2 > 1.6);
  CHECK(b1 / b2 > 1.6);
}

TEST_CASE("barrier factorization matches direct differencing") {
  auto worst = [](Index n) {
    const Setup s(n, 129);
    BarrierParams p;
    p.A = 3.0;
    const VFContext c = make_context(s.g, s.s, 5e-5, &s.bg);
    const BarrierEval b = eval_phi2(s.g, p, s.s.psi, s.s.u, 0.5);
    const Field direct = apply_P2(c, s.s.u, b.values);
    const Field factored = apply_P2_barrier(c, s.s.u, b);
    double w = 0;
    for (Index i = 1; i + 1 < s.g.nx(); ++i)
      for (Index j = 1; j + 1 < s.g.ny(); ++j)
        for (Index k = 40; k < 100; ++k) {
          if (b.ridge_mask(i, j, k)) continue;
          const double scale = std::exp(p.A * s.g.x[i]);
          w = std::max(w, std::abs(direct(i, j, k) - scale * factored(i, j, k)) / (p.A * b.values(i, j, k)));
        }
    return w;
  };
  const double w1 = worst(17), w2 = worst(33);
  MESSAGE("factorization gap " << w1 << " -> " << w2);
  CHECK(w2 < 1e-2);
  CHECK(w1 / w2 > 3.0);
}

TEST_CASE("barrier suite on the background with A = 1000") {
  const Setup s(16, 256);
  const VFContext c = make_context(s.g, s.s, 5e-5, &s.bg);
  BarrierParams p;
  p.A = 1000;
  const BarrierSuiteResult r = verify_barrier_inequalities(c, s.s.u, p);
  for (const auto& row : r.rows) {
    INFO(row.inequality << " " << row.zone << " nodes " << row.nodes);
    CHECK(row.nodes > 0);
    CHECK(row.min_margin > 0);
  }
  CHECK(r.ridge_nodes > 0);
  CHECK(r.min_ridge_gap > 0);
  CHECK(r.all_pass());
  CHECK(r.report.all_pass());
  const BarrierEval f10 = eval_phi1(s.g, p, 0.0);
  long masked = 0;
  for (Index n = 0; n < f10.ridge_mask.size(); ++n) masked += f10.ridge_mask.array()[n];
  CHECK(masked > 0);
}

TEST_CASE("maximum principle verdicts") {
  const Setup s(16, 256);
  const VFContext c = make_context(s.g, s.s, 5e-5, &s.bg);
  const Grid3& g = s.g;
  LSpec L{g.zeros(), g.zeros(), s.s.u};
  MPDomain dom;

  BarrierParams p;
  const BarrierEval f10 = eval_phi1(g, p, 0.0);
  const Field minus_phi = like(f10.values, -f10.values.array());
  MPVerdict v = discrete_max_principle(c, minus_phi, L, dom);
  CHECK(v.outcome == MPOutcome::Holds);
  CHECK(v.tilt_max <= 0);

  LSpec L2{Field(g.nx(), g.ny(), g.nz(), 0.5), Field(g.nx(), g.ny(), g.nz(), 4.0), s.s.u};
  Field f = g.zeros();
  for (Index i = 0; i < g.nx(); ++i)
    for (Index n = 0; n < g.ny() * g.nz(); ++n) {
      const double ps = s.s.psi.array()[i * g.ny() * g.nz() + n];
      f.array()[i * g.ny() * g.nz() + n] = -(1 + ps * ps * std::exp(-ps)) * std::exp(g.x[i]);
    }
  v = discrete_max_principle(c, f, L2, dom);
  CHECK(v.outcome == MPOutcome::Holds);
  CHECK(v.max_Lf_interior < 0);

  const Field fz = fill(g, [](double x, double, double z) { return -(1 + z * z * std::exp(-z)) * std::exp(x); });
  // Constant zeroth-order coefficient large enough to make L f <= 0.
  const Field L0 = apply_L(c, L, fz);
  const double cz = 1.0 + 1.1 * (L0.array() / (-fz.array())).maxCoeff();
  LSpec L3{g.zeros(), Field(g.nx(), g.ny(), g.nz(), cz), s.s.u};
  MPDomain bounded;
  bounded.bounded = true;
  bounded.z0 = 6.0;
  v = discrete_max_principle(c, fz, L3, bounded);
  INFO(v.failed << " at " << v.x << "," << v.y << "," << v.z << " Lf " << v.max_Lf_interior);
  CHECK(v.outcome == MPOutcome::Holds);
  CHECK(v.tilt_max < 0);

  const BarrierEval f21 = eval_phi2_ridge(g, p, s.s.psi, s.s.u);
  v = discrete_max_principle(c, f21.values, L, dom);
  CHECK(v.outcome == MPOutcome::HypothesisFailed);
  CHECK(std::string(to_string(v.outcome)) == "hypothesis_failed");
}
