#pragma once

// Experiment layer: the smoothing functional, the Picard contraction study,
// the Lipschitz data-dependence study, and all file output (norms.csv,
// field_<index>.csv snapshots, run.json).  The unknowable constants in the
// underlying estimates are replaced by boundedness-under-refinement checks
// with explicit thresholds; every pass/fail cites its threshold.

#include <map>
#include <string>
#include <vector>

#include "ncl/evolution.hpp"
#include "ncl/trajectory.hpp"

namespace ncl::lab {

using evolve::EvolveConfig;
using spectral::RealField;

struct NormSeries {
  std::vector<double> t;
  std::vector<double> l2;
  std::vector<double> hs_half;
  std::vector<double> dxs2_l2;
  std::vector<double> smooth_cum;  // running trapezoid of dxs2_l2^2
  std::vector<double> b_min;
  std::vector<double> ledger_res;
};

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparator = "<=";
  bool pass = false;
};

struct StudyReport {
  std::string kind;
  std::string inputs_digest;
  std::vector<CheckResult> checks;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> environment;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct SmoothingResult {
  double value = 0.0;         // integral of ||d^{s+2} u||^2 dt (trapezoid)
  double ratio_to_m0sq = 0.0; // value / M0^2 with M0 the initial H^{s+1/2} norm
  NormSeries series;
};

// Needs at least 20 trajectory samples.
SmoothingResult smoothing_integral(const Trajectory& traj, double s);

// Runs Picard slabs from u0, auto-halving the slab until the measured
// contraction ratio is at most 1/2 (forced_slab_dt > 0 skips adaptation).
// Ratios are measured on iterate distances above 100x the roundoff floor.
StudyReport contraction_study(const RealField& u0, const EvolveConfig& cfg,
                              double forced_slab_dt = 0.0);

// For each delta runs the perturbed problem and records
//   R(delta) = (sup_t ||u - u~||^2_{H^{s+1/2}} + beta int ||u - u~||^2_{H^{s+2}})
//              / ||delta * perturbation||^2_{H^{s+1/2}};
// passes when R is stable within 20% over the two smallest deltas.
StudyReport lipschitz_study(const RealField& u0, const RealField& perturbation,
                            const std::vector<double>& deltas,
                            const EvolveConfig& cfg);

struct RunMeta {
  std::string config_text;  // canonical config echo, reparseable
  std::string scheme;
  int n = 0;
  double length = 0.0;
  std::vector<CheckResult> checks;
  double wall_seconds = 0.0;
};

// Writes norms.csv, field_<index>.csv snapshots and run.json under out_dir.
// All floats are written with 17 significant digits; repeated runs with the
// same seed and config produce bit-identical CSVs.
void emit_outputs(const Trajectory& traj, const EvolveConfig& cfg,
                  const RunMeta& meta, const std::string& out_dir);

void write_norms_csv(const NormSeries& series, const std::string& path);

NormSeries norm_series_from(const Trajectory& traj);

}  // namespace ncl::lab
