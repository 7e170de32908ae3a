#include <cmath>

#include "doctest.h"
#include "prandtl3d/background.hpp"

using namespace prandtl3d;

namespace {
const BlasiusProfile& blasius() {
  static const BlasiusProfile p = solve_blasius();
  return p;
}
}  // namespace

TEST_CASE("background symmetry and analytic derivatives") {
  const Grid3 g = Grid3::make(17, 17, 65, 0.1, 0.1, 14.0);
  const BackgroundProfile p = build_background(blasius(), g, 0.05);
  for (Index i = 0; i + 1 < 17; ++i)
    for (Index j = 1; j < 17; ++j)
      for (Index k = 0; k < 65; k += 7) CHECK(p.ubar(i + 1, j - 1, k) == p.ubar(i, j, k));
  for (Index i = 0; i < 17; ++i)
    for (Index j = 0; j < 17; ++j) CHECK(p.ubar(i, j, 0) > 0.0);

  const BackgroundSample s = p.sample(0.03, 0.07, 0.0);
  const double L = std::sqrt(2.0 * (0.05 + 1.0));
  CHECK(s.dz == doctest::Approx(blasius().at(0.05 / L).fpp / L).epsilon(1e-14));
  CHECK(s.dz > 0.0);
  for (double z : {0.0, 0.4, 2.0, 5.0}) {
    const BackgroundSample t = p.sample(0.02, 0.06, z);
    CHECK(p.mixed(0, 1, 0.02, 0.06, z) == doctest::Approx(t.dz).epsilon(1e-12));
    CHECK(p.mixed(0, 2, 0.02, 0.06, z) == doctest::Approx(t.dzz).epsilon(1e-12));
    CHECK(p.mixed(0, 3, 0.02, 0.06, z) == doctest::Approx(t.dzzz).epsilon(1e-12));
    CHECK(0.5 * p.mixed(1, 0, 0.02, 0.06, z) == doctest::Approx(t.dx).epsilon(1e-12));
    CHECK(0.25 * p.mixed(2, 0, 0.02, 0.06, z) == doctest::Approx(t.dxx).epsilon(1e-12));
    CHECK(0.5 * p.mixed(1, 1, 0.02, 0.06, z) == doctest::Approx(t.dzx).epsilon(1e-12));
  }
}

TEST_CASE("analytic and difference derivatives agree at second order") {
  auto err = [&](Index n) {
    const Grid3 g = Grid3::make(n, n, 4 * n, 0.1, 0.1, 8.0);
    const BackgroundProfile p = build_background(blasius(), g, 0.05, 0.2, false);
    return std::max({max_abs_diff(d_dz(p.ubar, g), p.d_z_ubar), max_abs_diff(d_zz(p.ubar, g), p.d_zz_ubar),
                     max_abs_diff(d_dx(p.ubar, g), p.d_x_ubar) * 10.0});
  };
  const double r = err(17) / err(33);
  CHECK(r > 3.0);
  CHECK(r < 5.0);
}

TEST_CASE("background is a steady boundary-layer solution") {
  auto residual = [&](Index n) {
    const Grid3 g = Grid3::make(n, n, 4 * n, 0.1, 0.1, 8.0);
    const BackgroundProfile p = build_background(blasius(), g, 0.05, 0.2, false);
    const Field ux = d_dx(p.ubar, g), uy = d_dy(p.ubar, g), uz = d_dz(p.ubar, g), uzz = d_zz(p.ubar, g);
    const Field wz = d_dz(p.wbar, g);
    double mom = 0, cont = 0;
    for (Index i = 1; i + 1 < n; ++i)
      for (Index j = 1; j + 1 < n; ++j)
        for (Index k = 1; k + 1 < 4 * n; ++k) {
          const double u = p.ubar(i, j, k);
          mom = std::max(mom, std::abs(u * ux(i, j, k) + u * uy(i, j, k) + p.wbar(i, j, k) * uz(i, j, k) -
                                       uzz(i, j, k)));
          cont = std::max(cont, std::abs(ux(i, j, k) + uy(i, j, k) + wz(i, j, k)));
        }
    return std::pair{mom, cont};
  };
  const auto a = residual(32), b = residual(64);
  CHECK(a.first / b.first > 3.0);
  CHECK(a.first / b.first < 5.0);
  CHECK(a.second / b.second > 3.0);
  CHECK(a.second / b.second < 5.0);
}

TEST_CASE("far field approaches the outer flow within the tail envelope") {
  const Grid3 g = Grid3::make(9, 9, 141, 0.1, 0.1, 14.0);
  const BackgroundProfile p = build_background(blasius(), g, 0.05, 0.2, false);
  const double env = std::exp(-p.mu * g.Zmax * g.Zmax / (g.X + 1.0));
  for (Index i = 0; i < 9; ++i)
    for (Index j = 0; j < 9; ++j) CHECK(std::abs(p.ubar(i, j, 140) - 1.0) <= env);
}

TEST_CASE("assumption checks: calibration passes, doubled mu fails the decay bound") {
  const Grid3 g = Grid3::make(9, 9, 71, 0.1, 0.1, 14.0);
  const BackgroundProfile p = build_background(blasius(), g, 0.05, calibrated_mu());
  const DiagnosticsReport ok = check_assumptions(p);
  CHECK(ok.all_pass());
  CHECK(ok.entries.size() == 2 + 26 + 8);

  BackgroundProfile doubled = build_background(blasius(), g, 0.05, 2.0 * calibrated_mu(), false);
  doubled.constants = p.constants;
  const DiagnosticsReport bad = check_assumptions(doubled);
  const ReportEntry* e = bad.find("bg.decay.001");
  REQUIRE(e != nullptr);
  CHECK(e->margin < 0.0);
  CHECK_FALSE(e->pass);

  CHECK_THROWS_AS(build_background(blasius(), Grid3::make(9, 9, 9, 0.25, 0.1, 5.0), 0.05), DomainError);
}
