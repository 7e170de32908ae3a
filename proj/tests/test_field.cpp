#include <cmath>

#include "doctest.h"
#include "prandtl3d/field.hpp"

using namespace prandtl3d;

TEST_CASE("grid construction") {
  const Grid3 g = Grid3::make(9, 10, 17, 0.1, 0.2, 4.0);
  CHECK(g.z[0] == 0.0);
  CHECK(g.z[16] == 4.0);
  CHECK_THROWS_AS(Grid3::make(7, 10, 17, 0.1, 0.1, 1.0), DomainError);
  const Grid3 s = Grid3::make(9, 9, 33, 0.1, 0.1, 4.0, 2.0);
  for (Index k = 1; k < 33; ++k) CHECK(s.z[k] > s.z[k - 1]);
  CHECK(s.z[1] < 4.0 / 32);
}

TEST_CASE("finite-difference weights") {
  const double nodes[3] = {-1.0, 0.0, 1.0};
  auto w = fd_weights(nodes, 3, 0.0, 1);
  CHECK(w[0] == doctest::Approx(-0.5));
  CHECK(w[2] == doctest::Approx(0.5));
  auto w2 = fd_weights(nodes, 3, 0.0, 2);
  CHECK(w2[1] == doctest::Approx(-2.0));
}

TEST_CASE("derivatives are second order, including stretched z") {
  for (double stretch : {0.0, 1.5}) {
    auto err = [&](Index n) {
      const Grid3 g = Grid3::make(n, n, 2 * n, 1.0, 1.0, 2.0, stretch);
      Field f = g.zeros();
      for (Index i = 0; i < g.nx(); ++i)
        for (Index j = 0; j < g.ny(); ++j)
          for (Index k = 0; k < g.nz(); ++k) f(i, j, k) = std::sin(g.x[i] + 2 * g.y[j]) * std::exp(-g.z[k]);
      const Field fx = d_dx(f, g), fy = d_dy(f, g), fz = d_dz(f, g), fzz = d_zz(f, g);
      double e = 0;
      for (Index i = 0; i < g.nx(); ++i)
        for (Index j = 0; j < g.ny(); ++j)
          for (Index k = 0; k < g.nz(); ++k) {
            const double c = std::cos(g.x[i] + 2 * g.y[j]) * std::exp(-g.z[k]);
            e = std::max(e, std::abs(fx(i, j, k) - c));
            e = std::max(e, std::abs(fy(i, j, k) - 2 * c));
            e = std::max(e, std::abs(fz(i, j, k) + f(i, j, k)));
            if (stretch == 0.0) e = std::max(e, std::abs(fzz(i, j, k) - f(i, j, k)));
          }
      return e;
    };
    const double r = err(17) / err(33);
    CHECK(r > 3.0);
    CHECK(r < 5.0);
  }
}

TEST_CASE("cumulative_z and stream function") {
  const Grid3 g = Grid3::make(8, 8, 33, 0.1, 0.1, 3.0);
  Field one(8, 8, 33, 1.0);
  const Field c = cumulative_z(one, g);
  for (Index k = 0; k < 33; ++k) CHECK(c(3, 4, k) == doctest::Approx(g.z[k]).epsilon(1e-15));
  CHECK(max_abs(cumulative_z(g.zeros(), g)) == 0.0);
  Field lin = g.zeros();
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j)
      for (Index k = 0; k < 33; ++k) lin(i, j, k) = 2.0 + 3.0 * g.z[k];
  const Field cl = cumulative_z(lin, g);
  for (Index k = 0; k < 33; ++k)
    CHECK(cl(1, 1, k) == doctest::Approx(2 * g.z[k] + 1.5 * g.z[k] * g.z[k]).epsilon(1e-14));
  CHECK(stream_function(one, g)(0, 0, 32) == doctest::Approx(3.0));
  Field bad = one;
  bad(2, 2, 5) = -1.0;
  CHECK_THROWS_AS(stream_function(bad, g), NonPositiveField);

  auto err = [&](Index nz) {
    const Grid3 h = Grid3::make(8, 8, nz, 0.1, 0.1, 3.0);
    Field u = h.zeros();
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j)
        for (Index k = 0; k < nz; ++k) u(i, j, k) = 1.0 - std::exp(-h.z[k]) + 0.1;
    const Field psi = stream_function(u, h);
    double e = 0;
    for (Index k = 0; k < nz; ++k)
      e = std::max(e, std::abs(psi(0, 0, k) - (1.1 * h.z[k] + std::exp(-h.z[k]) - 1.0)));
    return e;
  };
  const double r = err(33) / err(65);
  CHECK(r > 3.5);
  CHECK(r < 4.5);
}

TEST_CASE("state derived storage") {
  const Grid3 g = Grid3::make(8, 8, 16, 0.1, 0.1, 3.0);
  Field u(8, 8, 16, 1.0), v(8, 8, 16, 1.5);
  const FieldState s = make_state(g, u, v, 2);
  CHECK(s.q(1, 1, 1) == 0.5);
  CHECK(s.int_dx_u(4, 4, 0) == 0.0);
  CHECK(s.psi(4, 4, 0) == 0.0);
  CHECK(s.iterate_index == 2);
}
