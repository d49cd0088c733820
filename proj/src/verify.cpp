#include "ncl/verify.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "ncl/initial_data.hpp"
#include "ncl/linear.hpp"

namespace ncl::verify {

using lab::CheckResult;
using spectral::derivative;
using spectral::hilbert;
using spectral::inner_product;
using spectral::l2_norm;
using spectral::mean;
using spectral::product;
using spectral::RealField;
using spectral::SobolevIndex;

namespace {
using HilbertFn = std::function<RealField(const RealField&)>;

HilbertFn make_h(Fault fault) {
  if (fault == Fault::flip_hilbert_sign)
    return [](const RealField& f) { return (-1.0) * hilbert(f); };
  return [](const RealField& f) { return hilbert(f); };
}

double rel(double r, double scale) { return r / std::max(scale, 1e-300); }
}  // namespace

RealField random_bandlimited(spectral::GridPtr grid, int kmax, std::uint64_t seed,
                             double s, double norm_target) {
  InitSpec spec;
  spec.kind = InitSpec::Kind::random_bandlimited;
  spec.kmax = kmax;
  spec.amplitude = norm_target;
  // make_initial normalizes in H^{s+1/2}
  return make_initial(std::move(grid), spec, s - 0.5, seed);
}

CheckResult check_involution(std::uint64_t seed, int nfields, int n, double length,
                             double tol) {
  auto grid = spectral::make_grid(n, length);
  double worst = 0.0;
  for (int i = 0; i < nfields; ++i) {
    RealField f = random_bandlimited(grid, n / 3, seed + static_cast<unsigned>(i),
                                     0.0, 1.0);
    RealField lhs = hilbert(hilbert(f));
    RealField rhs = (-1.0) * (f - RealField::constant(grid, mean(f)));
    worst = std::max(worst, rel(l2_norm(lhs - rhs), l2_norm(f)));
  }
  return {"hilbert_involution", worst, tol, "<=", worst <= tol};
}

CheckResult check_pairing(std::uint64_t seed, int nfields, int n, double length,
                          double tol) {
  auto grid = spectral::make_grid(n, length);
  double worst = 0.0;
  for (int i = 0; i < nfields; ++i) {
    RealField f = random_bandlimited(grid, n / 3, seed + 1000 + static_cast<unsigned>(i), 0.0, 1.0);
    RealField g = random_bandlimited(grid, n / 3, seed + 2000 + static_cast<unsigned>(i), 0.0, 1.0);
    const RealField f0 = f - RealField::constant(grid, mean(f));
    const RealField g0 = g - RealField::constant(grid, mean(g));
    const double scale = l2_norm(f) * l2_norm(g);
    const double r1 =
        std::abs(inner_product(hilbert(f), hilbert(g)) - inner_product(f0, g0));
    const double r2 =
        std::abs(inner_product(g, hilbert(f)) + inner_product(f, hilbert(g)));
    worst = std::max(worst, rel(std::max(r1, r2), scale));
  }
  return {"hilbert_pairing", worst, tol, "<=", worst <= tol};
}

namespace {
CheckResult tripling_impl(std::uint64_t seed, int nfields, int n, double length,
                          double tol, const HilbertFn& H) {
  auto grid = spectral::make_grid(n, length);
  double worst = 0.0;
  for (int i = 0; i < nfields; ++i) {
    RealField f = random_bandlimited(grid, n / 3, seed + 3000 + static_cast<unsigned>(i), 0.0, 1.0);
    RealField g = random_bandlimited(grid, n / 3, seed + 4000 + static_cast<unsigned>(i), 0.0, 1.0);
    RealField lhs = H(product(f, g, true));
    RealField rhs = H(product(H(f), H(g), true)) + product(g, H(f), true) +
                    product(f, H(g), true);
    worst = std::max(worst, rel(l2_norm(lhs - rhs), l2_norm(lhs) + 1e-30));
  }
  return {"hilbert_tripling", worst, tol, "<=", worst <= tol};
}
}  // namespace

CheckResult check_tripling(std::uint64_t seed, int nfields, int n, double length,
                           double tol) {
  return tripling_impl(seed, nfields, n, length, tol, make_h(Fault::none));
}

std::vector<CheckResult> check_routes(std::uint64_t seed, int nfields, int n,
                                      double length, bool ivantsov, double tol) {
  auto grid = spectral::make_grid(n, length);
  crystal::Background bg = ivantsov ? crystal::ivantsov_background(grid, 0.6)
                                    : crystal::flat_background(grid);
  crystal::PhysicsParams p;
  p.tau = 1.0;
  p.gamma = 0.3;

  double w_route = 0.0, w_49 = 0.0, w_412 = 0.0;
  for (int i = 0; i < nfields; ++i) {
    RealField u = random_bandlimited(grid, 10, seed + 100 + static_cast<unsigned>(i), 5.0, 0.8);
    const RealField qd = crystal::q_direct(u, bg, p);
    const RealField qc = crystal::q_decomposed(u, bg, p);
    w_route = std::max(w_route, rel(l2_norm(qd - qc), l2_norm(qd)));

    const RealField b = crystal::big_b(u, bg, p).field;
    const RealField dq = derivative(qd, 1);
    const RealField r49 =
        dq + product(b, derivative(u, 3), true) - crystal::q4(u, bg, p);
    w_49 = std::max(w_49, rel(l2_norm(r49), l2_norm(dq)));

    const RealField hdq = hilbert(dq);
    const RealField r412 = hdq + product(b, hilbert(derivative(u, 3)), true) -
                           crystal::q5(u, bg, p);
    w_412 = std::max(w_412, rel(l2_norm(r412), l2_norm(hdq)));
  }
  const std::string tag = ivantsov ? "_ivantsov" : "_flat";
  return {{"route_equivalence" + tag, w_route, tol, "<=", w_route <= tol},
          {"derivative_identity" + tag, w_49, tol, "<=", w_49 <= tol},
          {"hilbert_identity" + tag, w_412, tol, "<=", w_412 <= tol}};
}

CheckResult check_dispersion_decay(double tol) {
  auto grid = spectral::make_grid(256, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (double bbar : {0.4, 1.0}) {
    for (double eps : {0.0, 1e-3}) {
      for (int k : {1, 2, 4}) {
        const double lam = grid->wavenumber(k);
        RealField u0 = RealField::from_function(
            grid, [&](double xi) { return std::sin(lam * xi); });
        linsolve::LinearProblem prob;
        prob.b = RealField::constant(grid, bbar);
        prob.u0 = u0;
        prob.epsilon = eps;
        prob.dt = 1e-3;
        prob.t_final = 0.1;
        prob.output_stride = 100;
        auto res = linsolve::solve_linear_ivp(prob, SobolevIndex(3.0));
        const double a = bbar * lam * lam * lam + eps * std::pow(lam, 6.0);
        const double expected = std::exp(-a * 0.1);
        const double measured =
            l2_norm(res.traj.final_field()) / l2_norm(u0);
        worst = std::max(worst, std::abs(measured - expected) / expected);
      }
    }
  }
  return {"dispersion_decay", worst, tol, "<=", worst <= tol};
}

namespace {

CheckResult forced_hilbert_examples(const HilbertFn& H) {
  auto grid = spectral::make_grid(64, 2.0 * std::numbers::pi);
  RealField s1 = RealField::from_function(grid, [](double x) { return std::sin(x); });
  RealField c1 = RealField::from_function(grid, [](double x) { return std::cos(x); });
  RealField one = RealField::constant(grid, 1.0);
  double worst = 0.0;
  worst = std::max(worst, spectral::max_abs(H(s1) - c1));
  worst = std::max(worst, spectral::max_abs(H(c1) + s1));
  worst = std::max(worst, spectral::max_abs(H(one)));
  worst = std::max(worst, std::abs(mean(H(s1 + c1))));
  return {"hilbert_forced_examples", worst, 1e-12, "<=", worst <= 1e-12};
}

CheckResult frac_vs_composition(const HilbertFn& H) {
  auto grid = spectral::make_grid(128, 40.0);
  RealField f = random_bandlimited(grid, 30, 99, 0.0, 1.0);
  RealField lhs = spectral::frac_derivative(f, 1.0);
  RealField rhs = (-1.0) * H(derivative(f, 1));
  const double r = rel(l2_norm(lhs - rhs), l2_norm(lhs));
  return {"fractional_derivative_vs_minus_H_d", r, 1e-12, "<=", r <= 1e-12};
}

CheckResult parseval_check(std::uint64_t seed) {
  auto grid = spectral::make_grid(256, 40.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    RealField f = random_bandlimited(grid, 80, seed + 5000 + static_cast<unsigned>(i), 0.0, 1.0);
    const double a = spectral::sobolev_norm(f, SobolevIndex(0.0));
    const double b = std::sqrt(inner_product(f, f));
    worst = std::max(worst, std::abs(a * a - b * b) / (b * b));
  }
  return {"parseval", worst, 1e-12, "<=", worst <= 1e-12};
}

CheckResult interpolation_check(std::uint64_t seed) {
  // ||u||_{H^1} <= eta ||u||_{H^2} + K(eta) ||u||_{L2} with the constructive
  // K = sqrt(N^2 + 1), N = eta^{-1}, eta = 0.1
  auto grid = spectral::make_grid(256, 40.0);
  const double eta = 0.1;
  const double K = std::sqrt(std::pow(eta, -2.0) + 1.0);
  double worst = -1e300;
  for (int i = 0; i < 20; ++i) {
    RealField f = random_bandlimited(grid, 100, seed + 6000 + static_cast<unsigned>(i), 0.0, 1.0);
    const double lhs = spectral::sobolev_norm(f, SobolevIndex(1.0));
    const double rhs = eta * spectral::sobolev_norm(f, SobolevIndex(2.0)) +
                       K * l2_norm(f);
    worst = std::max(worst, lhs - rhs);
  }
  return {"interpolation_inequality", worst, 0.0, "<=", worst <= 0.0};
}

CheckResult steady_flat(const crystal::PhysicsParams& p) {
  auto grid = spectral::make_grid(256, 40.0);
  crystal::Background bg = crystal::flat_background(grid);
  RealField zero = RealField::zeros(grid);
  const double r = spectral::max_abs(crystal::rhs_full(zero, bg, p));
  return {"steady_state_flat_rhs", r, 1e-12, "<=", r <= 1e-12};
}

CheckResult evolve_zero_check() {
  auto grid = spectral::make_grid(256, 40.0);
  evolve::EvolveConfig cfg;
  cfg.params.tau = 1.0;
  cfg.params.gamma = 0.2;
  cfg.bg = crystal::flat_background(grid);
  cfg.dt = 1e-4;
  cfg.t_final = 2e-3;
  cfg.output_stride = 5;
  double worst = 0.0;
  for (auto scheme : {evolve::Scheme::imex, evolve::Scheme::picard}) {
    cfg.scheme = scheme;
    Trajectory t = evolve::evolve(RealField::zeros(grid), cfg);
    for (const auto& f : t.fields) worst = std::max(worst, spectral::max_abs(f));
  }
  return {"steady_state_evolve_zero", worst, 1e-13, "<=", worst <= 1e-13};
}

struct IvantsovResiduals {
  double r40;
  double r80;
};

// tau = 0 steady-state residual of the windowed background, evaluated from
// the primitive composition so the fault injection can reach it
IvantsovResiduals ivantsov_tau0(const HilbertFn& H) {
  auto eval = [&](int n, double L) {
    auto grid = spectral::make_grid(n, L);
    crystal::Background bg = crystal::ivantsov_background(grid, 0.6);
    std::vector<double> q(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
      q[static_cast<size_t>(j)] = std::exp(-2.0 * bg.h_i[j]);
    RealField Q(grid, std::move(q));
    RealField E = product(bg.h_i_xi, H(Q), true) - product(bg.q_i_xi, Q, true) +
                  H(derivative(Q, 1));
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      if (std::abs(grid->node(j)) <= 0.6 * L / 2.0)
        worst = std::max(worst, std::abs(E[j]));
    return worst;
  };
  return {eval(256, 40.0), eval(512, 80.0)};
}

CheckResult curvature_tip(const HilbertFn& H) {
  auto grid = spectral::make_grid(1024, 160.0);
  crystal::Background bg = crystal::ivantsov_background(grid, 0.6);
  std::vector<double> eh(static_cast<size_t>(grid->size()));
  for (int j = 0; j < grid->size(); ++j)
    eh[static_cast<size_t>(j)] = std::exp(-bg.h_i[j]);
  RealField kappa = product(H(bg.h_i_xi), RealField(grid, std::move(eh)), true);
  int j0 = 0;
  for (int j = 0; j < grid->size(); ++j)
    if (std::abs(grid->node(j)) < std::abs(grid->node(j0))) j0 = j;
  const double err = std::abs(kappa[j0] - 1.0);
  return {"ivantsov_tip_curvature", err, 0.05, "<=", err <= 0.05};
}

}  // namespace

lab::StudyReport verify_suite(std::uint64_t seed, Fault fault) {
  const HilbertFn H = make_h(fault);
  lab::StudyReport rep;
  rep.kind = "verify";
  rep.inputs_digest = std::to_string(seed);
  rep.environment["seed"] = std::to_string(seed);
  rep.environment["fault"] =
      fault == Fault::none ? "none" : "flip_hilbert_sign";

  rep.checks.push_back(forced_hilbert_examples(H));
  rep.checks.push_back(check_involution(seed, 100, 256, 40.0, 1e-10));
  rep.checks.push_back(check_pairing(seed, 100, 256, 40.0, 1e-10));
  rep.checks.push_back(tripling_impl(seed, 100, 256, 40.0, 1e-10, H));
  rep.checks.push_back(frac_vs_composition(H));
  rep.checks.push_back(parseval_check(seed));
  rep.checks.push_back(interpolation_check(seed));

  for (auto& c : check_routes(seed, 5, 256, 40.0, false, 1e-9)) rep.checks.push_back(c);
  for (auto& c : check_routes(seed, 5, 512, 40.0, true, 1e-9)) rep.checks.push_back(c);

  rep.checks.push_back(check_dispersion_decay(1e-8));

  crystal::PhysicsParams p;
  p.tau = 0.5;
  p.gamma = 0.2;
  rep.checks.push_back(steady_flat(p));
  rep.checks.push_back(evolve_zero_check());

  const IvantsovResiduals ir = ivantsov_tau0(H);
  rep.metrics["ivantsov_tau0_residual_L40"] = ir.r40;
  rep.metrics["ivantsov_tau0_residual_L80"] = ir.r80;
  rep.checks.push_back({"ivantsov_tau0_residual_ceiling", ir.r40, 0.5, "<=",
                        ir.r40 <= 0.5});
  rep.checks.push_back({"ivantsov_tau0_residual_decreases_with_L",
                        ir.r80 / ir.r40, 1.0, "<", ir.r80 < ir.r40});
  rep.checks.push_back(curvature_tip(H));
  return rep;
}

}  // namespace ncl::verify
