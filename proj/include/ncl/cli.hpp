#pragma once

#include <string>
#include <vector>

#include "ncl/config.hpp"
#include "ncl/evolution.hpp"

namespace ncl::cli {

// Subcommand dispatch.  Exit codes: 0 success, 1 usage/config error,
// 2 numerical abort (blow-up or ellipticity loss), 3 verification or study
// threshold failure.
int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args);  // args without argv[0]

// RunConfig -> ready-to-run pieces (grid, background, scheme, initial data).
struct PreparedRun {
  spectral::GridPtr grid;
  evolve::EvolveConfig cfg;
  spectral::RealField u0;
};
PreparedRun prepare_run(const RunConfig& rc);

}  // namespace ncl::cli
