#include "prandtl3d/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prandtl3d/parallel.hpp"

namespace prandtl3d {

void PerturbationSpec::validate() const {
  if (!(eps > 0)) throw DomainError("perturbation eps must be positive");
  if (!(A > 0 && delta > 0 && N > delta && mu > 0)) throw DomainError("envelope constants out of range");
  if (std::abs(amp_u) * (1 + std::abs(kappa_u)) + std::abs(amp_v) * (1 + std::abs(kappa_v)) > 0.8)
    throw DomainError("perturbation amplitude exceeds 0.8");
  if (i_max < 0 || i_max > 3) throw DomainError("compatibility order must lie in 0..3");
}

PerturbationDerivs perturbation(const PerturbationSpec& p, bool v_component, double x, double y, double z) {
  const double c = v_component ? p.amp_v : p.amp_u;
  const double kappa = v_component ? p.kappa_v : p.kappa_u;
  PerturbationDerivs d;
  if (c == 0.0) return d;
  const double w = v_component ? p.wavenumber_v : p.wavenumber_u;
  const double Y0 = 1.0 + kappa * std::sin(w * y);
  const double Y1 = kappa * w * std::cos(w * y);
  const double Y2 = -kappa * w * w * std::sin(w * y);
  const double d3 = p.delta * p.delta * p.delta;
  const double E = std::exp(-z * z * z / d3);
  const double E1 = -3.0 * z * z / d3 * E;
  const double E2 = (-6.0 * z / d3 + 9.0 * std::pow(z, 4) / (d3 * d3)) * E;
  const double G = std::exp(-p.mu * z * z);
  const double G1 = -2.0 * p.mu * z * G;
  const double G2 = (4.0 * p.mu * p.mu * z * z - 2.0 * p.mu) * G;
  const double Z0 = (1.0 - E) * G;
  const double Z1 = -E1 * G + (1.0 - E) * G1;
  const double Z2 = -E2 * G - 2.0 * E1 * G1 + (1.0 - E) * G2;
  const double K = c * std::pow(p.eps, 8) * p.delta * p.delta * std::exp(p.A * x);
  d.v = K * Y0 * Z0;
  d.dx = p.A * d.v;
  d.dy = K * Y1 * Z0;
  d.dz = K * Y0 * Z1;
  d.dzz = K * Y0 * Z2;
  d.dzx = p.A * d.dz;
  d.dzy = K * Y1 * Z1;
  d.dxx = p.A * p.A * d.v;
  d.dxy = p.A * d.dy;
  d.dyy = K * Y2 * Z0;
  return d;
}

double Phi(const PerturbationSpec& p, int i, double x, double z) {
  const double t = z / std::sqrt(x + 1.0);
  const double e = std::exp(p.A * x);
  if (t <= p.delta) return e * std::pow(t, i);
  const double plateau = e * std::pow(p.delta, i);
  if (t <= p.N) return plateau;
  return plateau * std::exp(p.mu * (p.N * p.N - t * t));
}

DiagnosticsReport check_envelopes(const PerturbationSpec& p, const BackgroundProfile& bg) {
  p.validate();
  const Grid3& g = bg.grid;
  const double e6 = std::pow(p.eps, 6), e7 = e6 * p.eps, e8 = e7 * p.eps;
  Extremum r_u(false), r_dz(false), r_dxy(false), r_dzdxy(false), r_dd(false), mono(true);
  long excluded = 0;
  auto visit = [&](Index i, Index j) {
    const double x = g.x[i], y = g.y[j];
    for (Index k = 0; k < g.nz(); ++k) {
      const double z = g.z[k];
      const PerturbationDerivs a = perturbation(p, false, x, y, z);
      const PerturbationDerivs b = perturbation(p, true, x, y, z);
      const double uz = bg.mixed(0, 1, x, y, z - bg.eps0);
      mono.offer(std::min(uz + a.dz, uz + b.dz) / std::exp(-1.5 * p.mu * z * z / (1.0 + g.X)), x, y, z);
      const double P1 = Phi(p, 1, x, z), P2 = Phi(p, 2, x, z);
      if (P2 <= 1e-300 || P1 <= 1e-300) {
        ++excluded;
        continue;
      }
      r_u.offer((std::abs(a.v) + std::abs(b.v)) / (e8 * P2), x, y, z);
      r_dz.offer((std::abs(a.dz) + std::abs(b.dz)) / (e7 * P2), x, y, z);
      r_dxy.offer(std::max(std::abs(a.dx) + std::abs(b.dx), std::abs(a.dy) + std::abs(b.dy)) / (e6 * P1), x, y, z);
      r_dzdxy.offer(std::max(std::abs(a.dzx) + std::abs(b.dzx), std::abs(a.dzy) + std::abs(b.dzy)) / (e6 * P1), x, y,
                    z);
      const double dd = std::max({std::abs(a.dxx) + std::abs(b.dxx), std::abs(a.dxy) + std::abs(b.dxy),
                                  std::abs(a.dyy) + std::abs(b.dyy)});
      r_dd.offer(dd / (e6 * P1), x, y, z);
    }
  };
  for (Index j = 0; j < g.ny(); ++j) visit(0, j);
  for (Index i = 1; i < g.nx(); ++i) visit(i, 0);

  DiagnosticsReport r;
  auto upper = [&](const char* id, const Extremum& e) {
    ReportEntry en;
    en.check_id = id;
    en.zone = "inflow";
    // a face with no admissible node has ratio -inf; treat it as a zero ratio
    const double v = std::max(e.value, 0.0);
    en.margin = 1.0 - v;
    en.estimate = v;
    en.x = e.x;
    en.y = e.y;
    en.z = e.z;
    en.pass = en.margin >= 0;
    en.excluded = excluded;
    r.add(en);
  };
  upper("bd.u", r_u);
  upper("bd.dz", r_dz);
  upper("bd.dxy", r_dxy);
  upper("bd.dzdxy", r_dzdxy);
  upper("bd.dxydxy", r_dd);
  ReportEntry m;
  m.check_id = "bd.mono";
  m.zone = "inflow";
  m.margin = mono.value;
  m.estimate = mono.value;
  m.x = mono.x;
  m.y = mono.y;
  m.z = mono.z;
  m.pass = mono.value > 0;
  r.add(m);
  return r;
}

double sample_plane(const Grid3& g, const Plane& p, double x, double y) {
  const double hx = g.dx(), hy = g.dy();
  double fx = std::clamp(x / hx, 0.0, double(g.nx() - 1));
  double fy = std::clamp(y / hy, 0.0, double(g.ny() - 1));
  const Index i = std::min<Index>(Index(fx), g.nx() - 2);
  const Index j = std::min<Index>(Index(fy), g.ny() - 2);
  fx -= i;
  fy -= j;
  return (1 - fx) * (1 - fy) * p(i, j) + fx * (1 - fy) * p(i + 1, j) + (1 - fx) * fy * p(i, j + 1) +
         fx * fy * p(i + 1, j + 1);
}

namespace {

// Gradient of the bilinear interpolant on the cell containing (x, y).
std::pair<double, double> plane_gradient(const Grid3& g, const Plane& p, double x, double y) {
  const double hx = g.dx(), hy = g.dy();
  double fx = std::clamp(x / hx, 0.0, double(g.nx() - 1));
  double fy = std::clamp(y / hy, 0.0, double(g.ny() - 1));
  const Index i = std::min<Index>(Index(fx), g.nx() - 2);
  const Index j = std::min<Index>(Index(fy), g.ny() - 2);
  fx -= i;
  fy -= j;
  const double gx = ((1 - fy) * (p(i + 1, j) - p(i, j)) + fy * (p(i + 1, j + 1) - p(i, j + 1))) / hx;
  const double gy = ((1 - fx) * (p(i, j + 1) - p(i, j)) + fx * (p(i + 1, j + 1) - p(i + 1, j))) / hy;
  // outside the plane the clamped sample is constant in that direction
  return {(x < 0 || x > g.X) ? 0.0 : gx, (y < 0 || y > g.Y) ? 0.0 : gy};
}

void integrate_path(const Grid3& g, const Plane& q, CharPath& path, bool bottom_seed, int substeps) {
  const Index n = g.nx() - path.first;
  path.y.assign(n, 0.0);
  path.dseed.assign(n, 0.0);
  double y = path.eta, J = bottom_seed ? 0.0 : 1.0;
  path.y[0] = y;
  path.dseed[0] = J;
  auto rhs = [&](double x, double yy, double jj, double& dy, double& dj) {
    dy = 1.0 + sample_plane(g, q, x, yy);
    const auto [qx, qy] = plane_gradient(g, q, x, yy);
    dj = (bottom_seed ? qx : 0.0) + qy * jj;
  };
  for (Index st = 1; st < n; ++st) {
    const double x0 = g.x[path.first + st - 1];
    const double h = (g.x[path.first + st] - x0) / substeps;
    for (int sub = 0; sub < substeps; ++sub) {
      const double x = x0 + sub * h;
      double k1y, k1j, k2y, k2j, k3y, k3j, k4y, k4j;
      rhs(x, y, J, k1y, k1j);
      rhs(x + 0.5 * h, y + 0.5 * h * k1y, J + 0.5 * h * k1j, k2y, k2j);
      rhs(x + 0.5 * h, y + 0.5 * h * k2y, J + 0.5 * h * k2j, k3y, k3j);
      rhs(x + h, y + h * k3y, J + h * k3j, k4y, k4j);
      y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
      J += h / 6.0 * (k1j + 2 * k2j + 2 * k3j + k4j);
    }
    path.y[st] = y;
    path.dseed[st] = J;
  }
}

}  // namespace

CharField solve_characteristics(const Grid3& g, const Plane& qtilde0, int substeps) {
  if (qtilde0.rows() != g.nx() || qtilde0.cols() != g.ny()) throw GridMismatch("qtilde plane does not match grid");
  if (qtilde0.abs().maxCoeff() > 0.5) throw DomainError("|qtilde| > 1/2 on the wall");
  CharField cf;
  for (Index i = g.nx() - 1; i >= 1; --i) {
    CharPath p;
    p.xi = g.x[i];
    p.first = i;
    cf.paths.push_back(p);
  }
  const std::size_t n_bottom = cf.paths.size();
  for (Index j = 0; j < g.ny(); ++j) {
    CharPath p;
    p.eta = g.y[j];
    cf.paths.push_back(p);
  }
  parallel_for(0, std::ptrdiff_t(cf.paths.size()), [&](std::ptrdiff_t n) {
    integrate_path(g, qtilde0, cf.paths[n], std::size_t(n) < n_bottom, substeps);
  });

  const double tol = 1e-12 * std::max(g.Y, 1.0);
  for (Index st = 0; st < g.nx(); ++st) {
    double prev = -std::numeric_limits<double>::infinity();
    for (const CharPath& p : cf.paths) {
      if (p.first > st) continue;
      const double y = p.y[st - p.first];
      if (!(y > prev + tol)) throw CrossingDetected("characteristics cross at x station " + std::to_string(st));
      prev = y;
    }
  }
  for (std::size_t n = n_bottom; n < cf.paths.size(); ++n)
    for (double J : cf.paths[n].dseed) cf.max_deta_y = std::max(cf.max_deta_y, std::abs(J));
  return cf;
}

Plane compat_F1(const Grid3& g, const BackgroundProfile& bg, const FieldState&, const PerturbationSpec& p,
                bool v_component, bool wall_flux) {
  Plane F(g.nx(), g.ny());
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j) {
      // wall inputs from the data traces, not the iterate
      const PerturbationDerivs du = perturbation(p, false, g.x[i], g.y[j], bg.eps0);
      const PerturbationDerivs dv = perturbation(p, true, g.x[i], g.y[j], bg.eps0);
      const double u = bg.ubar(i, j, 0) + du.v, v = bg.ubar(i, j, 0) + dv.v;
      const double qt = (v - u) / u;
      const double ds_ubar = bg.d_x_ubar(i, j, 0) * (2.0 + qt);
      const double bt = wall_flux ? -0.5 * bg.wall_w(i, j) * (1.0 / u + (1.0 + qt) / v) : 0.0;
      const PerturbationDerivs& d = v_component ? dv : du;
      const double ub = bg.ubar(i, j, 0) + d.v;
      const double ub_z = bg.d_z_ubar(i, j, 0) + d.dz;
      const double ub_zz = bg.d_zz_ubar(i, j, 0) + d.dzz;
      const double w = ub, w_z = ub_z;
      const double diffusion = ((ub_z / w - ub * w_z / (w * w)) * ub_z + ub / w * ub_zz) / u;
      F(i, j) = ds_ubar - bt * ub_z - diffusion;
    }
  return F;
}

CompatTables compat_coefficients(const Grid3& g, const BackgroundProfile& bg, const FieldState& prev,
                                 const PerturbationSpec& p, const CharField& cf, bool v_component, bool wall_flux) {
  p.validate();
  const Plane qt = slice_z(prev.q, 0) / slice_z(prev.u, 0);
  std::vector<Plane> D{compat_F1(g, bg, prev, p, v_component, wall_flux)};
  for (int i = 2; i <= p.i_max; ++i) {
    const Plane& f = D.back();
    D.push_back(diff_plane(f, g, Axis::X) + (1.0 + qt) * diff_plane(f, g, Axis::Y));
  }
  CompatTables t;
  t.a.assign(p.i_max + 1, std::vector<double>(cf.paths.size(), 0.0));
  for (std::size_t n = 0; n < cf.paths.size(); ++n) {
    const CharPath& c = cf.paths[n];
    const Index i = c.first;
    const Index j = Index(std::llround(c.eta / g.dy()));
    t.a[0][n] = perturbation(p, v_component, c.xi, c.eta, bg.eps0).v;
    for (int m = 1; m <= p.i_max; ++m) t.a[m][n] = -D[m - 1](i, j);
  }
  return t;
}

double cutoff(int i, double M, double s) {
  if (i == 8) throw DomainError("cutoff undefined for i = 8");
  if (i == 0) return 1.0;
  const double s1 = 0.25 * std::pow(1.0 / (M + 1.0), 1.0 / (i - 8));
  const double s2 = 2.0 * s1;
  if (s <= s1) return std::pow(s, i);
  const double plateau = 2.0 * std::pow(s1, i);
  if (s >= s2) return plateau;
  // quintic Hermite from (s1^i, i s1^{i-1}, i(i-1) s1^{i-2}) to (plateau, 0, 0)
  const double h = s2 - s1, t = (s - s1) / h;
  const double p0 = std::pow(s1, i), p1 = i * std::pow(s1, i - 1) * h,
               p2 = i > 1 ? i * (i - 1) * std::pow(s1, i - 2) * h * h : 0.0;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double h20 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
  return h00 * p0 + h10 * p1 + h20 * p2 + h01 * plateau;
}

namespace {

// Local cubic Lagrange interpolation in a strictly increasing table.
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const std::size_t n = xs.size();
  if (n == 1) return ys[0];
  std::size_t hi = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
  std::size_t lo = hi >= 2 ? hi - 2 : 0;
  lo = std::min(lo, n >= 4 ? n - 4 : 0);
  const std::size_t m = std::min<std::size_t>(4, n);
  double acc = 0;
  for (std::size_t a = lo; a < lo + m; ++a) {
    double w = 1;
    for (std::size_t b = lo; b < lo + m; ++b)
      if (b != a) w *= (x - xs[b]) / (xs[a] - xs[b]);
    acc += w * ys[a];
  }
  return acc;
}

}  // namespace

BoundaryData boundary_from_fields(const Field& u, const Field& v) {
  BoundaryData b;
  const Index nx = u.nx(), ny = u.ny(), nz = u.nz();
  b.wall_u = slice_z(u, 0);
  b.wall_v = slice_z(v, 0);
  b.top_u = slice_z(u, nz - 1);
  b.top_v = slice_z(v, nz - 1);
  b.inflow_u.resize(ny, nz);
  b.inflow_v.resize(ny, nz);
  b.side_u.resize(nx, nz);
  b.side_v.resize(nx, nz);
  for (Index j = 0; j < ny; ++j)
    for (Index k = 0; k < nz; ++k) {
      b.inflow_u(j, k) = u(0, j, k);
      b.inflow_v(j, k) = v(0, j, k);
    }
  for (Index i = 0; i < nx; ++i)
    for (Index k = 0; k < nz; ++k) {
      b.side_u(i, k) = u(i, 0, k);
      b.side_v(i, k) = v(i, 0, k);
    }
  return b;
}

BoundaryData build_boundary_data(const Grid3& g, const BackgroundProfile& bg, const FieldState& prev,
                                 const PerturbationSpec& p, bool wall_flux, CharField* out_chars) {
  p.validate();
  const DiagnosticsReport env = check_envelopes(p, bg);
  for (const auto& e : env.entries)
    if (!e.pass) throw EnvelopeViolation(e.check_id + " violated at z=" + format_double(e.z));

  const Plane qt = slice_z(prev.q, 0) / slice_z(prev.u, 0);
  CharField cf = solve_characteristics(g, qt);
  const CompatTables tu = compat_coefficients(g, bg, prev, p, cf, false, wall_flux);
  const CompatTables tv = compat_coefficients(g, bg, prev, p, cf, true, wall_flux);
  auto bound = [&](const CompatTables& t) {
    double M = 0;
    for (const auto& a : t.a)
      for (double v : a) M = std::max(M, std::abs(v));
    return M * t.a.size();
  };
  const double Mu = bound(tu), Mv = bound(tv);

  BoundaryData b = boundary_from_fields(bg.ubar, bg.ubar);
  for (Index j = 0; j < g.ny(); ++j)
    for (Index k = 0; k < g.nz(); ++k) {
      b.inflow_u(j, k) += perturbation(p, false, 0.0, g.y[j], g.z[k] + bg.eps0).v;
      b.inflow_v(j, k) += perturbation(p, true, 0.0, g.y[j], g.z[k] + bg.eps0).v;
    }
  for (Index i = 0; i < g.nx(); ++i)
    for (Index k = 0; k < g.nz(); ++k) {
      b.side_u(i, k) += perturbation(p, false, g.x[i], 0.0, g.z[k] + bg.eps0).v;
      b.side_v(i, k) += perturbation(p, true, g.x[i], 0.0, g.z[k] + bg.eps0).v;
    }
  const double ztop = g.z[g.nz() - 1] + bg.eps0;
  for (Index i = 0; i < g.nx(); ++i)
    for (Index j = 0; j < g.ny(); ++j) {
      b.top_u(i, j) += perturbation(p, false, g.x[i], g.y[j], ztop).v;
      b.top_v(i, j) += perturbation(p, true, g.x[i], g.y[j], ztop).v;
    }

  std::vector<double> ys, du, dv;
  for (Index st = 0; st < g.nx(); ++st) {
    ys.clear();
    du.clear();
    dv.clear();
    for (std::size_t n = 0; n < cf.paths.size(); ++n) {
      const CharPath& c = cf.paths[n];
      if (c.first > st) continue;
      const double s = g.x[st] - c.xi;
      double a = tu.a[0][n], bv = tv.a[0][n];
      double fact = 1;
      for (int m = 1; m <= p.i_max; ++m) {
        fact *= m;
        a += tu.a[m][n] * cutoff(m, Mu, s) / fact;
        bv += tv.a[m][n] * cutoff(m, Mv, s) / fact;
      }
      ys.push_back(c.y[st - c.first]);
      du.push_back(a);
      dv.push_back(bv);
    }
    for (Index j = 0; j < g.ny(); ++j) {
      b.wall_u(st, j) = bg.ubar(st, j, 0) + interp(ys, du, g.y[j]);
      b.wall_v(st, j) = bg.ubar(st, j, 0) + interp(ys, dv, g.y[j]);
    }
  }
  for (Index j = 0; j < g.ny(); ++j) {
    b.wall_u(0, j) = b.inflow_u(j, 0);
    b.wall_v(0, j) = b.inflow_v(j, 0);
  }
  for (Index i = 0; i < g.nx(); ++i) {
    b.wall_u(i, 0) = b.side_u(i, 0);
    b.wall_v(i, 0) = b.side_v(i, 0);
  }
  if (out_chars) *out_chars = std::move(cf);
  return b;
}

Plane trace_dx_u_at_inflow(const Grid3& g, const Plane& u, const Plane& v, double u_floor,
                           const std::vector<double>* wall_w) {
  const Index ny = g.ny(), nz = g.nz();
  if (u.rows() != ny || u.cols() != nz || v.rows() != ny || v.cols() != nz)
    throw GridMismatch("inflow planes do not match grid");
  if (u.minCoeff() <= u_floor) throw DegenerateU("inflow u below floor");
  auto dir = [](const Plane& f, const std::vector<Stencil>& st, bool along_y) {
    Plane out(f.rows(), f.cols());
    for (Index r = 0; r < f.rows(); ++r)
      for (Index c = 0; c < f.cols(); ++c) {
        const Stencil& s = st[along_y ? r : c];
        double acc = 0;
        for (int q = 0; q < s.n; ++q) acc += s.w[q] * (along_y ? f(s.start + q, c) : f(r, s.start + q));
        out(r, c) = acc;
      }
    return out;
  };
  const Plane uy = dir(u, g.d1[1], true), vy = dir(v, g.d1[1], true);
  const Plane uz = dir(u, g.d1[2], false), uzz = dir(u, g.d2[2], false);
  auto cumulative = [&](const Plane& f) {
    Plane out(ny, nz);
    for (Index j = 0; j < ny; ++j) {
      out(j, 0) = 0;
      for (Index k = 1; k < nz; ++k) out(j, k) = out(j, k - 1) + 0.5 * (g.z[k] - g.z[k - 1]) * (f(j, k) + f(j, k - 1));
    }
    return out;
  };
  const Plane Ivy = cumulative(vy);
  Plane rhs = -v * uy + Ivy * uz + uzz;
  if (wall_w)
    for (Index j = 0; j < ny; ++j) rhs.row(j) -= (*wall_w)[j] * uz.row(j);
  const Plane I = cumulative(rhs / (u * u));
  return dir(u * I, g.d1[2], false);
}

}  // namespace prandtl3d
