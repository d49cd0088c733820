#pragma once

// Run configuration: a plain-text "key = value" grammar with '#' comments,
// documented defaults for every key, strict validation, and a canonical
// serializer whose output reparses to an identical config.

#include <cstdint>
#include <string>

#include "ncl/initial_data.hpp"

namespace ncl::cli {

struct RunConfig {
  int n = 256;
  double length = 40.0;
  double tau = 1.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double dt = 1e-4;
  double t_final = 0.1;
  double s = 5.0;
  std::string scheme = "imex";        // imex | picard
  std::string background = "flat";    // flat | ivantsov
  double window_inner_fraction = 0.6;
  double picard_tol = 1e-10;
  int picard_max_iter = 50;
  int output_stride = 10;
  std::string out_dir;                // empty: --out, then NCL_OUT_DIR, then ./ncl_out
  std::uint64_t seed = 1;
  InitSpec init;

  bool operator==(const RunConfig&) const = default;
};

// Throws ConfigError naming the offending line.
RunConfig parse_config(const std::string& text);

// Canonical serialization; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& c);

// 17-significant-digit float formatting shared by every writer.
std::string format_double(double v);

}  // namespace ncl::cli
