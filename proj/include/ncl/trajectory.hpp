#pragma once

#include <string>
#include <vector>

#include "ncl/spectral.hpp"

namespace ncl {

// Time-indexed solution samples plus the per-time diagnostics every study
// consumes.  Entries are appended at the configured output stride; times are
// strictly increasing and the initial state is always included.
struct Trajectory {
  double s = 5.0;  // Sobolev base index the norm columns refer to
  std::vector<double> times;
  std::vector<spectral::RealField> fields;
  std::vector<double> hs_half;      // ||u||_{H^{s+1/2}}
  std::vector<double> dxs2_l2;      // ||d^{s+2} u||_{L^2}
  std::vector<double> beta_eff;     // min B[u] over the grid (or min b)
  std::vector<double> ledger_res;   // energy-identity residual of the last step
  std::vector<int> picard_iters;    // 0 outside the picard scheme

  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;

  size_t size() const { return times.size(); }
  const spectral::RealField& final_field() const { return fields.back(); }
};

}  // namespace ncl
