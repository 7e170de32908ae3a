#include "prandtl3d/background.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "prandtl3d/parallel.hpp"

namespace prandtl3d {

namespace {

// c * zeta^a * g^(b)(zeta) with g = f'.
struct Term {
  int a, b;
  double c;
};

// L^q * sum(terms), with L = sqrt(2 (s + x0)).
struct Expr {
  int q = 0;
  std::vector<Term> terms;
};

std::vector<Term> d_zeta(const std::vector<Term>& in) {
  std::vector<Term> out;
  for (const Term& t : in) {
    if (t.a > 0) out.push_back({t.a - 1, t.b, t.c * t.a});
    out.push_back({t.a, t.b + 1, t.c});
  }
  return out;
}

// d/dz [L^q G(zeta)] = L^(q-1) G'(zeta)
Expr d_z(const Expr& e) { return {e.q - 1, d_zeta(e.terms)}; }

// d/ds [L^q G(zeta)] = L^(q-2) (-zeta G'(zeta) + q G(zeta))
Expr d_s(const Expr& e) {
  Expr out{e.q - 2, {}};
  for (Term t : d_zeta(e.terms)) out.terms.push_back({t.a + 1, t.b, -t.c});
  for (const Term& t : e.terms) out.terms.push_back({t.a, t.b, t.c * e.q});
  return out;
}

Expr derivative_expr(int ns, int nz) {
  Expr e{0, {{0, 0, 1.0}}};
  for (int i = 0; i < nz; ++i) e = d_z(e);
  for (int i = 0; i < ns; ++i) e = d_s(e);
  return e;
}

int max_order(const Expr& e) {
  int m = 0;
  for (const Term& t : e.terms) m = std::max(m, t.b);
  return m;
}

// g^(b) = f^(b+1); g itself from the tail-accurate complement.
double evaluate(const Expr& e, double zeta, double L, const std::vector<double>& fd, double g0) {
  double acc = 0.0;
  for (const Term& t : e.terms) {
    const double gb = t.b == 0 ? g0 : fd[t.b + 1];
    acc += t.c * std::pow(zeta, t.a) * gb;
  }
  return acc * std::pow(L, e.q);
}

struct Similarity {
  double zeta, L, kappa;
};

Similarity similarity(double x, double y, double z, double eps0, double x0) {
  const double s = 0.5 * (x + y);
  const double kappa = 2.0 * (s + x0);
  const double L = std::sqrt(kappa);
  return {(z + eps0) / L, L, kappa};
}

BackgroundSample sample_at(const BlasiusProfile& b, double s, double z, double eps0, double x0) {
  const double kappa = 2.0 * (s + x0);
  const double L = std::sqrt(kappa);
  const double zeta = (z + eps0) / L;
  const auto d = b.derivatives(zeta, 4);
  const double g = 1.0 - b.at(zeta).one_minus_fp;
  BackgroundSample out;
  out.u = g;
  out.w = (zeta * g - d[0]) / L;
  out.dz = d[2] / L;
  out.dzz = d[3] / kappa;
  out.dzzz = d[4] / (kappa * L);
  out.dx = -zeta * d[2] / (2.0 * kappa);
  out.dxx = zeta * (zeta * d[3] + 3.0 * d[2]) / (4.0 * kappa * kappa);
  out.dzx = -(d[2] + zeta * d[3]) / (2.0 * kappa * L);
  return out;
}

}  // namespace

BackgroundSample BackgroundProfile::sample(double x, double y, double z) const {
  return sample_at(blasius, 0.5 * (x + y), z, eps0, x0);
}

double BackgroundProfile::mixed(int ns, int nz, double x, double y, double z) const {
  const Expr e = derivative_expr(ns, nz);
  const Similarity sim = similarity(x, y, z, eps0, x0);
  const auto d = blasius.derivatives(sim.zeta, max_order(e) + 1);
  const double g0 = 1.0 - blasius.at(sim.zeta).one_minus_fp;
  return evaluate(e, sim.zeta, sim.L, d, g0);
}

BarrierParams weights_for(const BackgroundProfile& p) {
  BarrierParams w;
  w.mu = p.mu;
  w.eps0 = p.eps0;
  return w;
}

BackgroundProfile build_background(const BlasiusProfile& b, const Grid3& g, double eps0, double mu,
                                   bool calibrate) {
  if (!(eps0 > 0)) throw DomainError("eps0 must be positive");
  if (!(g.X < 0.2)) throw DomainError("X must be below 1/5");
  if (!(mu > 0)) throw DomainError("mu must be positive");
  BackgroundProfile p;
  p.grid = g;
  p.blasius = b;
  p.eps0 = eps0;
  p.mu = mu;
  p.x0 = b.x0;
  p.ubar = g.zeros();
  p.d_z_ubar = g.zeros();
  p.d_x_ubar = g.zeros();
  p.d_zz_ubar = g.zeros();
  p.wbar = g.zeros();
  // On a square uniform (x, y) grid, x_i + y_j is formed from the integer
  // i + j so nodes on one diagonal receive bit-identical values.
  const bool diagonal = g.nx() == g.ny() && g.dx() == g.dy();
  auto store = [&](Index i, Index j, Index k, const BackgroundSample& v) {
    p.ubar(i, j, k) = v.u;
    p.d_z_ubar(i, j, k) = v.dz;
    p.d_x_ubar(i, j, k) = v.dx;
    p.d_zz_ubar(i, j, k) = v.dzz;
    p.wbar(i, j, k) = v.w;
  };
  if (diagonal) {
    const Index nd = g.nx() + g.ny() - 1, nz = g.nz();
    std::vector<BackgroundSample> diag(static_cast<std::size_t>(nd * nz));
    parallel_for(0, nd, [&](std::ptrdiff_t m) {
      const double s = 0.5 * static_cast<double>(m) * g.dx();
      for (Index k = 0; k < nz; ++k) diag[m * nz + k] = sample_at(b, s, g.z[k], eps0, p.x0);
    });
    parallel_for(0, g.nx(), [&](std::ptrdiff_t i) {
      for (Index j = 0; j < g.ny(); ++j)
        for (Index k = 0; k < nz; ++k) store(i, j, k, diag[(i + j) * nz + k]);
    });
  } else {
    parallel_for(0, g.nx(), [&](std::ptrdiff_t i) {
      for (Index j = 0; j < g.ny(); ++j)
        for (Index k = 0; k < g.nz(); ++k) store(i, j, k, sample_at(b, 0.5 * (g.x[i] + g.y[j]), g.z[k], eps0, p.x0));
    });
  }
  if (calibrate) p.constants = calibrate_assumptions(p, weights_for(p));
  return p;
}

namespace {

constexpr double kWeightFloor = 1e-300;

void offer_ratio(AssumptionRatio& r, double value, double weight, double x, double y, double z) {
  if (!(weight > kWeightFloor)) {
    ++r.excluded;
    return;
  }
  r.stat.offer(value / weight, x, y, z);
}

}  // namespace

std::vector<AssumptionRatio> assumption_ratios(const BackgroundProfile& p, const BarrierParams& w) {
  const Grid3& g = p.grid;
  std::vector<AssumptionRatio> out;
  auto add = [&](const std::string& id, bool lower) {
    AssumptionRatio r;
    r.id = id;
    r.lower = lower;
    r.stat = Extremum(lower);
    out.push_back(r);
    return out.size() - 1;
  };

  const std::size_t wall = add("bg.wall_positive", true);
  const std::size_t mono = add("bg.mono", true);
  struct Order {
    int n1, n2, n3;
    Expr e;
    std::size_t slot;
  };
  std::vector<Order> orders;
  for (int n1 = 0; n1 <= 2; ++n1)
    for (int n2 = 0; n2 <= 2; ++n2)
      for (int n3 = 0; n3 <= 2; ++n3) {
        if (n1 + n2 + n3 == 0) continue;
        const std::string id = "bg.decay." + std::to_string(n1) + std::to_string(n2) + std::to_string(n3);
        orders.push_back({n1, n2, n3, derivative_expr(n1 + n2, n3), add(id, false)});
      }
  const std::size_t tau1 = add("bg.tau1", false);
  const std::size_t tau1sq = add("bg.tau1_2", false);
  const std::size_t dzz = add("bg.dzz", false);
  const std::size_t dzzz = add("bg.dzzz", false);
  const std::size_t dx = add("bg.dx", false);
  const std::size_t dxx = add("bg.dxx", false);
  const std::size_t nn = add("bg.nn", false);
  const std::size_t nnsq = add("bg.nn_u2", false);

  int kmax = 0;
  for (const auto& o : orders) kmax = std::max(kmax, max_order(o.e));

  // tau_1 derivatives: d_x - (int_0^z d_x u / u) d_z, second application by differences.
  const Field Gt = like(p.ubar, cumulative_z(p.d_x_ubar, g).array() / p.ubar.array());
  const Field T1 = like(p.ubar, p.d_x_ubar.array() - Gt.array() * p.d_z_ubar.array());
  const Field T2 = like(p.ubar, d_dx(T1, g).array() - Gt.array() * d_dz(T1, g).array());

  for (Index i = 0; i < g.nx(); ++i) {
    for (Index j = 0; j < g.ny(); ++j) {
      const double x = g.x[i], y = g.y[j];
      offer_ratio(out[wall], p.ubar(i, j, 0), 1.0, x, y, 0.0);
      for (Index k = 0; k < g.nz(); ++k) {
        const double z = g.z[k];
        const double Z = z + p.eps0;
        const Similarity sim = similarity(x, y, z, p.eps0, p.x0);
        const auto d = p.blasius.derivatives(sim.zeta, kmax + 1);
        const double g0 = 1.0 - p.blasius.at(sim.zeta).one_minus_fp;
        const double u = p.ubar(i, j, k);
        const double phi10 = phi1(w, 0.0, x, z);
        const double phi11 = phi1(w, 1.0, x, z);
        offer_ratio(out[mono], p.d_z_ubar(i, j, k),
                    std::exp(-1.5 * p.mu * Z * Z / (1.0 + g.X)), x, y, z);
        const double decay = std::exp(-p.mu * Z * Z / (x + 1.0));
        for (const auto& o : orders) {
          const double v = std::ldexp(evaluate(o.e, sim.zeta, sim.L, d, g0), -(o.n1 + o.n2));
          offer_ratio(out[o.slot], std::abs(v), decay, x, y, z);
        }
        const double sdzzz = d[4] / (sim.kappa * sim.L);
        const double sdxx = sim.zeta * (sim.zeta * d[3] + 3.0 * d[2]) / (4.0 * sim.kappa * sim.kappa);
        const double uz = p.d_z_ubar(i, j, k), uzz = p.d_zz_ubar(i, j, k);
        offer_ratio(out[tau1], std::abs(T1(i, j, k)), u * phi10, x, y, z);
        offer_ratio(out[tau1sq], std::abs(T2(i, j, k)), u * phi10, x, y, z);
        offer_ratio(out[dzz], std::abs(uzz), u * u * phi10, x, y, z);
        offer_ratio(out[dzzz], std::abs(sdzzz), phi11, x, y, z);
        offer_ratio(out[dx], std::abs(p.d_x_ubar(i, j, k)), phi11, x, y, z);
        offer_ratio(out[dxx], std::abs(sdxx), phi11, x, y, z);
        // grad_n = (1/u) d_z
        const double nn_u = uzz / (u * u) - uz * uz / (u * u * u);
        offer_ratio(out[nn], std::abs(nn_u), phi10 / (u * u * u), x, y, z);
        offer_ratio(out[nnsq], std::abs(2.0 * uzz / u), u * phi10, x, y, z);
      }
    }
  }
  return out;
}

std::map<std::string, double> calibrate_assumptions(const BackgroundProfile& p, const BarrierParams& w,
                                                    double safety) {
  std::map<std::string, double> c;
  for (const auto& r : assumption_ratios(p, w))
    c[r.id] = r.lower ? r.stat.value / safety : r.stat.value * safety;
  return c;
}

DiagnosticsReport check_assumptions(const BackgroundProfile& p, const BarrierParams& w) {
  DiagnosticsReport rep;
  for (const auto& r : assumption_ratios(p, w)) {
    ReportEntry e;
    e.check_id = r.id;
    e.zone = "all";
    e.x = r.stat.x;
    e.y = r.stat.y;
    e.z = r.stat.z;
    e.excluded = r.excluded;
    e.estimate = r.stat.value;
    const auto it = p.constants.find(r.id);
    if (r.id == "bg.wall_positive") {
      e.margin = r.stat.value;
    } else if (it == p.constants.end() || !(it->second > 0)) {
      e.margin = -1.0;
    } else if (r.lower) {
      e.margin = r.stat.value / it->second - 1.0;
    } else {
      e.margin = 1.0 - r.stat.value / it->second;
    }
    e.pass = e.margin > 0.0;
    rep.add(e);
  }
  rep.metadata["eps0"] = format_double(p.eps0);
  rep.metadata["mu"] = format_double(p.mu);
  return rep;
}

DiagnosticsReport check_assumptions(const BackgroundProfile& p) {
  return check_assumptions(p, weights_for(p));
}

}  // namespace prandtl3d
