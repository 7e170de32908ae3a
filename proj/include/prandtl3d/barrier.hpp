#pragma once

#include <string>
#include <vector>

#include "prandtl3d/report.hpp"
#include "prandtl3d/vector_calculus.hpp"
#include "prandtl3d/weights.hpp"

namespace prandtl3d {

// A barrier e^{Ax} S on the grid. The x-smooth factor S is kept so operators
// can differentiate e^{Ax} exactly. Nodes whose difference stencil straddles a
// branch junction are in ridge_mask; there left_dz and right_dz hold the
// slopes of the branches below and above the junction.
struct BarrierEval {
  Field values, shape, left_dz, right_dz;
  Mask ridge_mask;
  Mask zone;
  double A = 0;
};

BarrierEval eval_phi1(const Grid3& g, const BarrierParams& p, double beta);
BarrierEval eval_phi2(const Grid3& g, const BarrierParams& p, const Field& psi, const Field& u, double beta);
// phi_{2,1}: e^{Ax}(psi - psi^{1+alpha}) up to psi = delta, then constant.
BarrierEval eval_phi2_ridge(const Grid3& g, const BarrierParams& p, const Field& psi, const Field& u);

enum class PForm { Euclidean, VectorField };

// P1 w = grad_xi w + (1+qt) grad_eta w - grad_psi(u_n grad_psi w)
Field apply_P1(const VFContext& c, const Field& un, const Field& w, PForm form = PForm::Euclidean);
// P2 w = grad_xi w + (1+qt) grad_eta w - u_n grad_psi^2 w
Field apply_P2(const VFContext& c, const Field& un, const Field& w, PForm form = PForm::Euclidean);

// e^{-Ax} P(e^{Ax} S) = P S + A S for a barrier.
Field apply_P1_barrier(const VFContext& c, const Field& un, const BarrierEval& b);
Field apply_P2_barrier(const VFContext& c, const Field& un, const BarrierEval& b);

struct BarrierCheckRow {
  std::string inequality;
  std::string zone;
  double min_margin = 0;
  double x = 0, y = 0, z = 0;
  double c2_est = 0;
  long nodes = 0;
};

struct BarrierSuiteResult {
  std::vector<BarrierCheckRow> rows;
  // Smallest one-sided slope gap over every ridge node of every barrier.
  double min_ridge_gap = 0;
  long ridge_nodes = 0;
  DiagnosticsReport report;
  bool all_pass() const;
};

BarrierSuiteResult verify_barrier_inequalities(const VFContext& c, const Field& un, const BarrierParams& p);

void write_barrier_csv(std::ostream& os, const BarrierSuiteResult& r);

// Discrete maximum principle for
//   L f = grad_xi f + (1+qt) grad_eta f + b grad_psi f - u_n grad_psi^2 f + c f.
struct LSpec {
  Field b, c, un;
};

struct MPDomain {
  // Bounded: top face at z0 with f <= 0 imposed there. Unbounded: f <= M.
  bool bounded = false;
  double z0 = 0;
  double M = 0;
  double tol = 1e-10;
};

enum class MPOutcome { Holds, HypothesisFailed, ConclusionFailed };

struct MPVerdict {
  MPOutcome outcome = MPOutcome::Holds;
  std::string failed;
  double max_Lf_interior = 0;
  double max_f_boundary = 0;
  double max_f = 0;
  double tilt_B = 0;
  double tilt_max = 0;
  double x = 0, y = 0, z = 0;
};

Field apply_L(const VFContext& c, const LSpec& L, const Field& f);
MPVerdict discrete_max_principle(const VFContext& c, const Field& f, const LSpec& L, const MPDomain& d);

const char* to_string(MPOutcome o);

}  // namespace prandtl3d
