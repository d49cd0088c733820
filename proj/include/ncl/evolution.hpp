#pragma once

// Time integration of u_t + B[u] H[u'''] = N[u] by
//   * imex: freeze B and N at the step start, advance with the exact
//     mean-coefficient exponential plus explicit remainder (first order), or
//   * picard: on each time slab iterate the frozen-coefficient linear solve
//     v^{k+1}: v_t + B[v^k] H[v'''] = N[v^k] until the iterates contract,
//     then march slabs, adapting the slab length to the observed contraction.
//
// Either way the zero state on a flat background is preserved exactly and the
// ellipticity floor beta_eff = min B[u] is checked at every accepted step.

#include <vector>

#include "ncl/crystal.hpp"
#include "ncl/linear.hpp"
#include "ncl/trajectory.hpp"

namespace ncl::evolve {

using crystal::Background;
using crystal::PhysicsParams;
using spectral::RealField;

enum class Scheme { imex, picard };

struct EvolveConfig {
  PhysicsParams params;
  Background bg;
  double s = 5.0;
  double dt = 1e-4;
  double t_final = 0.1;
  Scheme scheme = Scheme::imex;
  double picard_tol = 1e-10;  // convergence norm is H^{s-1/2}
  int picard_max_iter = 50;
  int output_stride = 1;
  double slab_dt = 0.0;       // 0 selects the default 16*dt starting slab
  bool adapt_slab = true;
};

RealField step_imex(const RealField& u_n, const EvolveConfig& cfg);

struct PicardSlab {
  std::vector<RealField> path;     // micro-step states, path[0] = u_n
  std::vector<double> distances;   // sup-over-slab iterate distances
  std::vector<linsolve::EnergyLedgerRow> ledger_rows;  // converged iterate
  bool converged = false;
  int iterations = 0;
  double floor = 0.0;              // stagnation level when roundoff-limited
};

// Iterates the linear slab solves started from u_n over [0, slab_dt].
// Convergence: distance below picard_tol, or stagnation at the roundoff
// floor (two consecutive iterations shrinking by less than half while the
// distance is already below 1e-6 * max(1, ||u_n||_{H^{s-1/2}})).
PicardSlab step_picard_slab(const RealField& u_n, const EvolveConfig& cfg,
                            double slab_dt);

// March to t_final.  Numerical aborts (blow-up, ellipticity loss, overflow
// guard, mid-run stability-guard trips) are recorded on the trajectory rather
// than thrown; configuration errors still throw.
Trajectory evolve(const RealField& u0, const EvolveConfig& cfg);

struct ViscosityTable {
  std::vector<double> eps;
  std::vector<double> dist_to_min;   // ||u^eps(T) - u^{eps_min}(T)||_{H^{s+1/2}}
  std::vector<double> consec_dist;   // ||u^{eps_i}(T) - u^{eps_{i+1}}(T)||
  std::vector<double> ratios;        // consec_dist[i] / consec_dist[i+1]
  double fitted_rate = 0.0;          // mean log2 of the ratios
  bool partial = false;              // some member run aborted
};

ViscosityTable viscosity_sweep(const RealField& u0, const EvolveConfig& cfg,
                               const std::vector<double>& eps_list);

}  // namespace ncl::evolve
