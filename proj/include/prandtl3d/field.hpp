#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "prandtl3d/errors.hpp"

namespace prandtl3d {

using Index = Eigen::Index;

// Node-centred 3D array on an (x, y, z) grid, row-major with z fastest.
template <typename Scalar>
class Field3 {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Field3() = default;
  Field3(Index nx, Index ny, Index nz, Scalar fill = Scalar(0))
      : nx_(nx), ny_(ny), nz_(nz), data_(Array::Constant(nx * ny * nz, fill)) {}

  template <typename Other, typename Derived>
  Field3(const Field3<Other>& shape, const Eigen::ArrayBase<Derived>& values)
      : nx_(shape.nx()), ny_(shape.ny()), nz_(shape.nz()), data_(values) {}

  Index nx() const { return nx_; }
  Index ny() const { return ny_; }
  Index nz() const { return nz_; }
  Index size() const { return data_.size(); }

  Index offset(Index i, Index j, Index k) const { return (i * ny_ + j) * nz_ + k; }
  Scalar& operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }
  const Scalar& operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }

  Array& array() { return data_; }
  const Array& array() const { return data_; }

  auto column(Index i, Index j) { return data_.segment(offset(i, j, 0), nz_); }
  auto column(Index i, Index j) const { return data_.segment(offset(i, j, 0), nz_); }

  template <typename Other>
  bool same_shape(const Field3<Other>& o) const {
    return nx_ == o.nx() && ny_ == o.ny() && nz_ == o.nz();
  }

 private:
  Index nx_ = 0, ny_ = 0, nz_ = 0;
  Array data_;
};

using Field = Field3<double>;
using Mask = Field3<std::uint8_t>;

// 2D array on a grid face, row-major in its two in-plane indices.
using Plane = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Derived>
Field like(const Field& shape, const Eigen::ArrayBase<Derived>& values) {
  return Field(shape, values);
}

// Finite-difference stencil: weights for nodes start .. start+n-1.
struct Stencil {
  Index start = 0;
  int n = 0;
  std::array<double, 5> w{};
};

enum class Axis { X = 0, Y = 1, Z = 2 };

struct Grid3 {
  Eigen::ArrayXd x, y, z;
  double X = 0, Y = 0, Zmax = 0, stretch = 0;

  Index nx() const { return x.size(); }
  Index ny() const { return y.size(); }
  Index nz() const { return z.size(); }
  Index nodes() const { return nx() * ny() * nz(); }
  double dx() const { return x[1] - x[0]; }
  double dy() const { return y[1] - y[0]; }
  const Eigen::ArrayXd& axis(Axis a) const { return a == Axis::X ? x : (a == Axis::Y ? y : z); }

  Field zeros() const { return Field(nx(), ny(), nz()); }
  Plane face(Axis normal) const;

  // First and second derivative stencils per node along each axis; second
  // order everywhere, one-sided at the ends.
  std::array<std::vector<Stencil>, 3> d1, d2;

  // Uniform in x and y; z uniform when stretch == 0, otherwise clustered
  // toward z = 0 by z = Zmax (1 - tanh(s (1 - t)) / tanh(s)).
  static Grid3 make(Index nx, Index ny, Index nz, double X, double Y, double Zmax,
                    double stretch = 0.0);

  bool same_as(const Grid3& o) const;
};

// Finite-difference weights (Fornberg) for derivative order m at x0.
std::vector<double> fd_weights(const double* nodes, int n, double x0, int m);

Field diff(const Field& f, const Grid3& g, Axis a, int order = 1);
inline Field d_dx(const Field& f, const Grid3& g) { return diff(f, g, Axis::X); }
inline Field d_dy(const Field& f, const Grid3& g) { return diff(f, g, Axis::Y); }
inline Field d_dz(const Field& f, const Grid3& g) { return diff(f, g, Axis::Z); }
inline Field d_zz(const Field& f, const Grid3& g) { return diff(f, g, Axis::Z, 2); }

// In-plane derivative of a z = const face (rows x, columns y).
Plane diff_plane(const Plane& p, const Grid3& g, Axis a);

// Trapezoidal running integral along z; zero on the first layer.
Field cumulative_z(const Field& f, const Grid3& g);

// psi = cumulative_z(u); requires u > 0 above the wall.
Field stream_function(const Field& u, const Grid3& g);

Plane slice_z(const Field& f, Index k);

// One iterate (u_n, v_n) with its derived storage.
struct FieldState {
  Field u, v, q, int_dx_u, int_dy_v, psi;
  int iterate_index = 0;
};

FieldState make_state(const Grid3& g, Field u, Field v, int iterate_index);

double max_abs(const Field& f);
double max_abs_diff(const Field& a, const Field& b);

}  // namespace prandtl3d
