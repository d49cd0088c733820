#pragma once

// Operator-identity verification suite: Hilbert-transform identities,
// route equivalence through the operator tower, linear decay laws and
// steady states, aggregated into a StudyReport.  Deterministic given the
// seed.  A deliberate-fault mode flips the sign of the Hilbert multiplier
// inside the suite's own computations so tests can confirm the checks have
// teeth.

#include <cstdint>
#include <vector>

#include "ncl/diagnostics.hpp"

namespace ncl::verify {

enum class Fault { none, flip_hilbert_sign };

// Building blocks, reused by the acceptance suite at its own tolerances.
lab::CheckResult check_involution(std::uint64_t seed, int nfields, int n,
                                  double length, double tol);
lab::CheckResult check_pairing(std::uint64_t seed, int nfields, int n,
                               double length, double tol);
lab::CheckResult check_tripling(std::uint64_t seed, int nfields, int n,
                                double length, double tol);

// Route equivalence ||q_direct - q_decomposed||/||q_direct|| plus the
// derivative identity and the Hilbert identity residuals, on nfields seeded
// fields with ||u||_{H^5} <= 1.
std::vector<lab::CheckResult> check_routes(std::uint64_t seed, int nfields,
                                           int n, double length, bool ivantsov,
                                           double tol);

lab::CheckResult check_dispersion_decay(double tol);

// Seeded band-limited field with a prescribed H^s norm.
spectral::RealField random_bandlimited(spectral::GridPtr grid, int kmax,
                                       std::uint64_t seed, double s,
                                       double norm_target);

lab::StudyReport verify_suite(std::uint64_t seed = 1, Fault fault = Fault::none);

}  // namespace ncl::verify
