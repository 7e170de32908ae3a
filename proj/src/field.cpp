#include "prandtl3d/field.hpp"

#include <cmath>

#include "prandtl3d/parallel.hpp"

namespace prandtl3d {

std::vector<double> fd_weights(const double* nodes, int n, double x0, int m) {
  // c[j][k]: weight of node j for derivative k.
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

namespace {

Stencil make_stencil(const Eigen::ArrayXd& nodes, Index at, Index start, int n, int m,
                     bool uniform) {
  Stencil s;
  s.start = start;
  s.n = n;
  double local[5];
  if (uniform) {
    // Integer offsets keep weights bit-identical along a uniform axis.
    const double h = nodes[1] - nodes[0];
    for (int q = 0; q < n; ++q) local[q] = static_cast<double>(start + q - at);
    auto w = fd_weights(local, n, 0.0, m);
    const double scale = m == 1 ? h : h * h;
    for (int q = 0; q < n; ++q) s.w[q] = w[q] / scale;
  } else {
    for (int q = 0; q < n; ++q) local[q] = nodes[start + q] - nodes[at];
    auto w = fd_weights(local, n, 0.0, m);
    for (int q = 0; q < n; ++q) s.w[q] = w[q];
  }
  return s;
}

std::vector<Stencil> stencils(const Eigen::ArrayXd& nodes, int m, bool uniform) {
  const Index n = nodes.size();
  std::vector<Stencil> out(n);
  for (Index k = 0; k < n; ++k) {
    if (m == 1) {
      Index start = k == 0 ? 0 : (k == n - 1 ? n - 3 : k - 1);
      out[k] = make_stencil(nodes, k, start, 3, 1, uniform);
    } else if (k == 0 || k == n - 1) {
      out[k] = make_stencil(nodes, k, k == 0 ? 0 : n - 4, 4, 2, uniform);
    } else {
      out[k] = make_stencil(nodes, k, k - 1, 3, 2, uniform);
    }
  }
  return out;
}

void check_axis(const Eigen::ArrayXd& a, const char* name) {
  if (a.size() < 8) throw DomainError(std::string(name) + " axis needs at least 8 nodes");
  if (a[0] != 0.0) throw DomainError(std::string(name) + " axis must start at 0");
  for (Index i = 1; i < a.size(); ++i)
    if (!(a[i] > a[i - 1])) throw DomainError(std::string(name) + " axis not ascending");
}

}  // namespace

Grid3 Grid3::make(Index nx, Index ny, Index nz, double X, double Y, double Zmax, double stretch) {
  if (nx < 8 || ny < 8 || nz < 8) throw DomainError("each axis needs at least 8 nodes");
  if (!(X > 0 && Y > 0 && Zmax > 0)) throw DomainError("extents must be positive");
  Grid3 g;
  g.X = X;
  g.Y = Y;
  g.Zmax = Zmax;
  g.stretch = stretch;
  g.x.resize(nx);
  g.y.resize(ny);
  g.z.resize(nz);
  const double hx = X / static_cast<double>(nx - 1);
  const double hy = Y / static_cast<double>(ny - 1);
  for (Index i = 0; i < nx; ++i) g.x[i] = static_cast<double>(i) * hx;
  for (Index j = 0; j < ny; ++j) g.y[j] = static_cast<double>(j) * hy;
  const double hz = Zmax / static_cast<double>(nz - 1);
  for (Index k = 0; k < nz; ++k) {
    if (stretch > 0) {
      const double t = static_cast<double>(k) / static_cast<double>(nz - 1);
      g.z[k] = Zmax * (1.0 - std::tanh(stretch * (1.0 - t)) / std::tanh(stretch));
    } else {
      g.z[k] = static_cast<double>(k) * hz;
    }
  }
  g.z[0] = 0.0;
  g.z[nz - 1] = Zmax;
  check_axis(g.x, "x");
  check_axis(g.y, "y");
  check_axis(g.z, "z");
  g.d1 = {stencils(g.x, 1, true), stencils(g.y, 1, true), stencils(g.z, 1, stretch <= 0)};
  g.d2 = {stencils(g.x, 2, true), stencils(g.y, 2, true), stencils(g.z, 2, stretch <= 0)};
  return g;
}

bool Grid3::same_as(const Grid3& o) const {
  return x.size() == o.x.size() && y.size() == o.y.size() && z.size() == o.z.size() &&
         (x == o.x).all() && (y == o.y).all() && (z == o.z).all();
}

Plane Grid3::face(Axis normal) const {
  switch (normal) {
    case Axis::X: return Plane::Zero(ny(), nz());
    case Axis::Y: return Plane::Zero(nx(), nz());
    default: return Plane::Zero(nx(), ny());
  }
}

Field diff(const Field& f, const Grid3& g, Axis a, int order) {
  if (f.nx() != g.nx() || f.ny() != g.ny() || f.nz() != g.nz())
    throw GridMismatch("field shape does not match grid");
  const auto& st = (order == 1 ? g.d1 : g.d2)[static_cast<int>(a)];
  Field out(f.nx(), f.ny(), f.nz());
  const Index ny = f.ny(), nz = f.nz();
  const Index stride = a == Axis::X ? ny * nz : (a == Axis::Y ? nz : 1);
  const double* src = f.array().data();
  double* dst = out.array().data();
  parallel_for(0, f.nx(), [&](std::ptrdiff_t i) {
    for (Index j = 0; j < ny; ++j) {
      for (Index k = 0; k < nz; ++k) {
        const Index pos = a == Axis::X ? i : (a == Axis::Y ? j : k);
        const Stencil& s = st[pos];
        const Index base = f.offset(i, j, k) - pos * stride;
        double acc = 0.0;
        for (int q = 0; q < s.n; ++q) acc += s.w[q] * src[base + (s.start + q) * stride];
        dst[f.offset(i, j, k)] = acc;
      }
    }
  });
  return out;
}

Plane diff_plane(const Plane& p, const Grid3& g, Axis a) {
  const auto& st = g.d1[static_cast<int>(a)];
  Plane out(p.rows(), p.cols());
  for (Index r = 0; r < p.rows(); ++r) {
    for (Index c = 0; c < p.cols(); ++c) {
      const Stencil& s = st[a == Axis::X ? r : c];
      double acc = 0.0;
      for (int q = 0; q < s.n; ++q)
        acc += s.w[q] * (a == Axis::X ? p(s.start + q, c) : p(r, s.start + q));
      out(r, c) = acc;
    }
  }
  return out;
}

Field cumulative_z(const Field& f, const Grid3& g) {
  Field out(f.nx(), f.ny(), f.nz());
  const Index nz = f.nz();
  parallel_for(0, f.nx(), [&](std::ptrdiff_t i) {
    for (Index j = 0; j < f.ny(); ++j) {
      double acc = 0.0;
      out(i, j, 0) = 0.0;
      for (Index k = 1; k < nz; ++k) {
        acc += 0.5 * (g.z[k] - g.z[k - 1]) * (f(i, j, k) + f(i, j, k - 1));
        out(i, j, k) = acc;
      }
    }
  });
  return out;
}

Field stream_function(const Field& u, const Grid3& g) {
  for (Index i = 0; i < u.nx(); ++i)
    for (Index j = 0; j < u.ny(); ++j)
      for (Index k = 1; k < u.nz(); ++k)
        if (!(u(i, j, k) > 0.0)) throw NonPositiveField("u <= 0 above the wall");
  return cumulative_z(u, g);
}

Plane slice_z(const Field& f, Index k) {
  Plane p(f.nx(), f.ny());
  for (Index i = 0; i < f.nx(); ++i)
    for (Index j = 0; j < f.ny(); ++j) p(i, j) = f(i, j, k);
  return p;
}

FieldState make_state(const Grid3& g, Field u, Field v, int iterate_index) {
  FieldState s;
  s.u = std::move(u);
  s.v = std::move(v);
  if (!s.u.same_shape(s.v) || s.u.nx() != g.nx() || s.u.ny() != g.ny() || s.u.nz() != g.nz())
    throw GridMismatch("state fields do not match grid");
  s.q = like(s.u, s.v.array() - s.u.array());
  s.int_dx_u = cumulative_z(d_dx(s.u, g), g);
  s.int_dy_v = cumulative_z(d_dy(s.v, g), g);
  s.psi = stream_function(s.u, g);
  s.iterate_index = iterate_index;
  return s;
}

double max_abs(const Field& f) { return f.array().abs().maxCoeff(); }

double max_abs_diff(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw GridMismatch("fields differ in shape");
  return (a.array() - b.array()).abs().maxCoeff();
}

}  // namespace prandtl3d
