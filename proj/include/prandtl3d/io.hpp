#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "prandtl3d/boundary.hpp"
#include "prandtl3d/diagnostics.hpp"
#include "prandtl3d/solver.hpp"

namespace prandtl3d {

struct RunConfig {
  // grid
  Index nx = 0, ny = 0, nz = 0;
  double X = 0.1, Y = 0.1, Zmax = 14.0, stretch = 0.0;
  // physics
  double mu = 0.2, x0 = 1.0, eps = 1e-3;
  std::vector<double> eps0_schedule{0.05};
  // barrier
  double A = 10.0, delta = 0.25, N = 8.0, alpha = 0.1;
  // perturbation
  double amp_u = 0.3, amp_v = -0.3, kappa_u = 0.3, kappa_v = 0.3;
  double wavenumber_u = 3.0, wavenumber_v = 5.0;
  int i_max = 2;
  // solver
  double picard_tol = 1e-10, inner_tol = 1e-12, u_floor_factor = 1e-3;
  int picard_max = 30, inner_max = 50, upwind_order = 2, threads = 0;
  bool wall_flux = true;
  // ledger
  double d0 = 0.1, c0 = 0.0, C2 = 0.0, C_dzK = 0.0;
  // io
  std::string out_dir = "out";
  int snapshot_every = 0;

  Grid3 grid() const;
  SolverConfig solver() const;
  PerturbationSpec perturbation() const;
  BarrierParams barrier(double eps0) const;
  LedgerParams ledger(double eps0) const;
};

// Lines `section.key = value`; `#` starts a comment. grid.nx, grid.ny and
// grid.nz are required, every other key has a default.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Every key with its value, sorted, one `key = value` per line.
std::string canonical_text(const RunConfig& c);
std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const RunConfig& c);

// `zeta,f,fp,fpp` at every tabulated node, then `# fpp0=<value>`.
void write_blasius_csv(std::ostream& os, const BlasiusProfile& b);

struct SnapshotBlock {
  std::string name;
  std::vector<double> data;
};

struct Snapshot {
  static constexpr std::uint32_t kVersion = 1;
  Index nx = 0, ny = 0, nz = 0;
  std::vector<double> x, y, z;
  std::vector<SnapshotBlock> blocks;

  void add(const std::string& name, const Field& f);
  void add(const std::string& name, const Plane& p);
  const SnapshotBlock& block(const std::string& name) const;
  Field field(const std::string& name) const;
  Plane plane(const std::string& name, Index rows, Index cols) const;
};

Snapshot make_snapshot(const Grid3& g);
// A grid whose axes equal the snapshot's bit for bit.
Grid3 snapshot_grid(const Snapshot& s);
Snapshot snapshot_of(const Grid3& g, const FieldState& s);
Snapshot snapshot_of(const BackgroundProfile& p);
Snapshot snapshot_of(const Grid3& g, const BoundaryData& b);

void write_snapshot(std::ostream& os, const Snapshot& s);
void write_snapshot(const std::string& path, const Snapshot& s);
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

struct SliceSpec {
  Axis axis = Axis::Z;
  Index index = 0;
};

// Quantities: u, v, q, K, dzu, psi, residual, barrier.
std::vector<std::string> plot_quantities();
Field plot_quantity(const std::string& id, const FieldState& s, const BackgroundProfile& bg,
                    const BarrierParams& w, double u_floor);
// Rows `coord1,coord2,value` over the two remaining axes in (x, y, z) order.
void emit_plot_data(std::ostream& os, const Grid3& g, const Field& f, const SliceSpec& slice);

}  // namespace prandtl3d
