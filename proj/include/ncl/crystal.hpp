#pragma once

// Physics layer for the needle-crystal interface equation: windowed Ivantsov
// backgrounds, the quasilinear operator tower Q1, B, Q2, Q3, Q, Q4, Q5, N,
// interface curvature, and reconstruction of the (x, y) curve from u.
//
// The evolution equation in the variables used here is
//     u_t + B[u] H[u'''] = N[u]
// with B the anisotropic elliptic coefficient and N the lower-order remainder.
// Two routes to Q[u] are kept deliberately distinct: q_direct evaluates the
// closed form, q_decomposed assembles -B u'' + Q2 + Q3; their discrete
// agreement is a standing verification target, not an implementation detail.

#include <vector>

#include "ncl/spectral.hpp"

namespace ncl::crystal {

using spectral::GridPtr;
using spectral::RealField;

struct PhysicsParams {
  double tau = 1.0;      // surface tension
  double gamma = 0.0;    // fourfold anisotropy strength, in [0, 1)
  double epsilon = 0.0;  // sixth-order viscosity used by the linear solvers

  double beta() const { return tau * (1.0 - gamma); }
  void validate() const;
};

enum class BackgroundKind { flat, ivantsov };

// Windowed Ivantsov profiles (or the zero background).  The stored first
// derivatives are spectral derivatives of the stored windowed profiles, so
// discrete identities involving them hold exactly.
struct Background {
  BackgroundKind kind = BackgroundKind::flat;
  RealField h_i;
  RealField q_i;
  RealField h_i_xi;
  RealField q_i_xi;
  RealField window;
  double inner_fraction = 0.6;

  const spectral::SpectralGrid& grid() const { return h_i.grid(); }
};

Background flat_background(GridPtr grid);

// h_i = chi * ln(1+xi^2)/2, q_i = chi * (-atan xi); chi == 1 on
// |xi| <= alpha*L/2 and == 0 beyond 0.9*L/2, a C^9 smoothstep between.
Background ivantsov_background(GridPtr grid, double inner_fraction = 0.6);

// Smoothstep used for the window, exposed for tests: the regularized
// incomplete beta I_t(10,10), monotone from 0 at t<=0 to 1 at t>=1.
double window_profile(double t);

struct EllipticCoeff {
  RealField field;
  double beta_eff;  // min over the grid
};

RealField q1(const RealField& u, const Background& bg, const PhysicsParams& p);
EllipticCoeff big_b(const RealField& u, const Background& bg, const PhysicsParams& p);
RealField q2(const RealField& u, const Background& bg, const PhysicsParams& p);
RealField q3(const RealField& u, const Background& bg, const PhysicsParams& p);
RealField q_direct(const RealField& u, const Background& bg, const PhysicsParams& p);
RealField q_decomposed(const RealField& u, const Background& bg, const PhysicsParams& p);
RealField q4(const RealField& u, const Background& bg, const PhysicsParams& p);
RealField q5(const RealField& u, const Background& bg, const PhysicsParams& p);

// N[u] = (h_i' + u') H[Q] - (q_i' - (H u)') Q + Q5
RealField rhs_n(const RealField& u, const Background& bg, const PhysicsParams& p);

// Full right-hand side -B[u] H[u'''] + N[u]
RealField rhs_full(const RealField& u, const Background& bg, const PhysicsParams& p);

// One tower evaluation shared by the time steppers.
struct RhsEval {
  RealField n_field;  // N[u]
  RealField b_field;  // B[u]
  double beta_eff;
};
RhsEval evaluate_rhs(const RealField& u, const Background& bg, const PhysicsParams& p);

// kappa = H[h'] e^{-h} with h = h_i + u
RealField curvature(const RealField& u, const Background& bg);

struct InterfaceCurve {
  std::vector<double> x;
  std::vector<double> y;
};

// z' = e^{(h_i+u) + i(q_i - H[u])}; the deviation from the background curve
// integrates spectrally and rides on the exact parabola z_I = xi - i xi^2/2.
InterfaceCurve reconstruct_interface(const RealField& u, const Background& bg);

}  // namespace ncl::crystal
