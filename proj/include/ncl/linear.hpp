#pragma once

// Regularized linear solvers: the sixth-order heat step, the constant- and
// variable-coefficient dispersive-dissipative equation
//     u_t + b(x,t) H[u'''] - eps u'''''' = f,
// and a per-step energy ledger.
//
// The variable-coefficient solver splits b = bbar + (b - bbar) with bbar the
// spatial mean: the bbar|lambda|^3 + eps*lambda^6 part advances by the exact
// per-mode exponential, the remainder and the forcing enter explicitly with
// phi1 weighting (first order in dt).  A step-size guard
//     dt * max|b - bbar| * lambda_max^3 <= 1/2
// rejects configurations the explicit remainder cannot carry.

#include <vector>

#include "ncl/spectral.hpp"
#include "ncl/trajectory.hpp"

namespace ncl::linsolve {

using spectral::RealField;
using spectral::SobolevIndex;

// Exact exponential step of u_t - eps u'''''' = f (forcing frozen over dt).
RealField heat6_step(const RealField& u, const RealField& f, double eps, double dt);

// Exact exponential step of u_t + bbar H[u'''] - eps u'''''' = f.
RealField linstep_constant_b(const RealField& u, const RealField& f, double bbar,
                             double eps, double dt);

struct EnergyLedgerRow {
  double t;             // end of the step
  double l2_sq;         // ||u||_{L2}^2 at the end of the step
  double hs_sq;         // ||u||_{H^{s+1/2}}^2 at the end of the step
  double diss_mean_l2;  // exact per-mode dissipation of the mean part, L2 weights
  double diss_mean_hs;
  double rem_pair_l2;   // 2 dt <u, -(b-bbar) H[u''']> pairing
  double rem_pair_hs;
  double force_pair_l2; // 2 dt <u, f>
  double force_pair_hs;
  double beta_dxs2_sq;  // beta_eff ||d^{s+2} u||^2
  double eps_diss;      // eps || |D|^{1/2} d^{s+3} u ||^2
  double res_l2;        // energy-identity residual over the step
  double res_hs;
};

struct EnergyLedger {
  double s = 5.0;
  double beta_eff = 0.0;
  std::vector<EnergyLedgerRow> rows;
};

struct LedgerReport {
  double max_res_l2 = 0.0;
  double max_res_hs = 0.0;
  double cumulative_balance_l2 = 0.0;  // |X_T - X_0 - sum(force + rem - diss)|
  bool dissipation_nonneg = true;
  bool finite = true;
  bool ok() const { return dissipation_nonneg && finite; }
};

LedgerReport energy_ledger_check(const EnergyLedger& ledger);

struct LinearProblem {
  RealField b;                      // coefficient; used when b_series is empty
  std::vector<RealField> b_series;  // optional per-step coefficient
  RealField f;                      // forcing; empty field means zero
  std::vector<RealField> f_series;  // optional per-step forcing
  double epsilon = 0.0;
  RealField u0;
  double t_final = 0.0;
  double dt = 0.0;
  int output_stride = 1;
  double t0 = 0.0;
};

struct LinearResult {
  Trajectory traj;
  EnergyLedger ledger;
};

// One splitting step with its ledger row; shared with the nonlinear steppers.
// Throws StabilityGuardError when the explicit-remainder guard fails.
struct SplitStepResult {
  RealField u_next;
  EnergyLedgerRow row;
  double bbar;
  double bmin;
};
SplitStepResult split_step(const RealField& u, const RealField& b,
                           const RealField& f, double eps, double dt, double s,
                           double t_end);

// Throws StabilityGuardError on a guard violation, BlowUp on NaN or on
// ||u||_{L2} exceeding 1e6 times its initial size.
LinearResult solve_linear_ivp(const LinearProblem& prob, SobolevIndex s);

// The fixed-point construction behind the splitting solver, kept as an
// optional cross-check at moderate eps: iterate heat6 solves with the
// transport term lagged.  Returns the final-time field.
RealField solve_linear_by_iteration(const LinearProblem& prob, int max_iter,
                                    double tol);

}  // namespace ncl::linsolve
