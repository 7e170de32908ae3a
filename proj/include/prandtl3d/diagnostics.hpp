#pragma once

#include "prandtl3d/background.hpp"
#include "prandtl3d/field.hpp"
#include "prandtl3d/report.hpp"
#include "prandtl3d/weights.hpp"

namespace prandtl3d {

struct LedgerParams {
  // perturbation size: budget of the conclusion bounds
  double eps = 1e-3;
  BarrierParams w;
  double d0 = 0.1;
  // c0 <= 0 means: calibrate from the background
  double c0 = 0.0;
  double C2 = 1.0;
  double C_dzK = 1.0;
  double u_floor = 0.0;
};

constexpr double kLedgerWeightFloor = 1e-300;

// Half the smallest ratio d_z ubar / phi_{1,0}^{3/2} over the grid.
double calibrate_c0(const BackgroundProfile& bg, const BarrierParams& w);

// Sets C2 and C_dzK to twice the values measured on a zero-perturbation
// state, and c0 from the background when unset.
LedgerParams calibrate_ledger(const FieldState& zero_state, const BackgroundProfile& bg, LedgerParams p);

// Ids: zt.{u,dz,dxy,dzdxy,dxydxy,dzz}, boot.{u,dz,tau,dztau,tautau,dzz,mono},
// K.sup, K.dz, adm.qtilde. Differences are taken against ref when given (the
// zero-perturbation solution on the same grid), otherwise against ubar.
DiagnosticsReport ledger_check(const FieldState& s, const BackgroundProfile& bg, const LedgerParams& p,
                               const FieldState* ref = nullptr);

}  // namespace prandtl3d
