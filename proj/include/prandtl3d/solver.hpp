#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "prandtl3d/boundary.hpp"
#include "prandtl3d/vector_calculus.hpp"

namespace prandtl3d {

struct SolverConfig {
  std::vector<double> eps0_schedule{0.05};
  double picard_tol = 1e-10;
  int picard_max = 30;
  double inner_tol = 1e-12;
  int inner_max = 50;
  int upwind_order = 2;
  // u_floor = u_floor_factor * eps0
  double u_floor_factor = 1e-3;
  // Include the lifted wall transpiration in b~ so the lifted background is steady.
  bool wall_flux = true;
  bool track_K = true;
  double z_probe = 0.2;

  void validate() const;
  double u_floor(double eps0) const { return u_floor_factor * eps0; }
};

struct SolveRecord {
  double eps0 = 0;
  int n = 0;
  double delta_u = 0, delta_v = 0, min_dzu = 0, max_absK = 0, seconds = 0;
};

struct SolveTrace {
  std::vector<SolveRecord> records;
};

void write_trace_csv(std::ostream& os, const SolveTrace& t);

// Manufactured-solution forcing added to the right-hand sides.
struct Sources {
  Field su, sv;
};

using BoundaryProvider = std::function<BoundaryData(const FieldState& prev)>;

// Advances both equations from slab i to slab i + 1. un and vn hold slabs
// 0..i of the current iterate; ctx is built from the previous iterate.
void march_step(const VFContext& ctx, const BoundaryData& bd, Index i, Field& un, Field& vn,
                const SolverConfig& cfg, const Sources* src = nullptr);

// One full march in x for a fixed previous iterate.
FieldState march(const VFContext& ctx, const BoundaryData& bd, const SolverConfig& cfg, int n,
                 const Sources* src = nullptr);

struct PicardResult {
  FieldState state;
  SolveTrace trace;
  int iterations = 0;
};

// Iterates the scheme from `initial` (the lifted background when null) until
// sup|u_n - u_{n-1}| + sup|v_n - v_{n-1}| < picard_tol.
PicardResult picard_solve(const Grid3& g, const BackgroundProfile& bg, const BoundaryProvider& boundary,
                          const SolverConfig& cfg, const FieldState* initial = nullptr,
                          const Sources* src = nullptr,
                          const std::function<void(int, const FieldState&)>& on_iterate = {});

struct ContinuationResult {
  std::vector<double> eps0;
  std::vector<FieldState> states;
  // sup over z >= z_probe of |u_a - u_b| + |v_a - v_b| for consecutive eps0
  std::vector<double> gaps;
  SolveTrace trace;
};

ContinuationResult eps0_continuation(const Grid3& g, const BlasiusProfile& b, const PerturbationSpec& p,
                                     const SolverConfig& cfg, double mu = 0.2);

// sup over nodes with z >= z_probe of |a.u - b.u| + |a.v - b.v|.
double probe_gap(const Grid3& g, const FieldState& a, const FieldState& b, double z_probe);

}  // namespace prandtl3d
