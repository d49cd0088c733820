#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ncl/diagnostics.hpp"
#include "ncl/initial_data.hpp"
#include "ncl/linear.hpp"
#include "ncl/verify.hpp"

using namespace ncl;
using namespace ncl::linsolve;
using spectral::l2_norm;
using spectral::make_grid;
using spectral::max_abs;
using spectral::RealField;
using spectral::SobolevIndex;

namespace {
constexpr double kPi = std::numbers::pi;

RealField sine(spectral::GridPtr g, int k, double amp = 1.0) {
  const double lam = g->wavenumber(k);
  return RealField::from_function(g, [=](double x) { return amp * std::sin(lam * x); });
}
}  // namespace

TEST_CASE("heat6 step is the exact mode solution") {
  auto g = make_grid(64, 2.0 * kPi);
  RealField none;
  CHECK(max_abs(heat6_step(sine(g, 1), none, 1.0, 1.0) - std::exp(-1.0) * sine(g, 1)) <= 1e-14);
  CHECK(max_abs(heat6_step(sine(g, 2), none, 1e-3, 0.1) -
                std::exp(-0.0064) * sine(g, 2)) <= 1e-14);
  // zero mode is undamped: u = c dt after one step from zero
  RealField f = RealField::constant(g, 3.0);
  RealField u1 = heat6_step(RealField::zeros(g), f, 5.0, 0.25);
  CHECK(max_abs(u1 - RealField::constant(g, 0.75)) <= 1e-14);
}

TEST_CASE("constant-coefficient dispersive step") {
  auto g = make_grid(64, 2.0 * kPi);
  RealField none;
  CHECK(max_abs(linstep_constant_b(sine(g, 2), none, 1.0, 0.0, 0.1) -
                std::exp(-0.8) * sine(g, 2)) <= 1e-14);

  // semigroup: two half steps equal one full step
  RealField u = sine(g, 3) + 0.5 * sine(g, 1);
  RealField a = linstep_constant_b(u, none, 0.7, 1e-3, 0.2);
  RealField b = linstep_constant_b(
      linstep_constant_b(u, none, 0.7, 1e-3, 0.1), none, 0.7, 1e-3, 0.1);
  CHECK(max_abs(a - b) <= 1e-15);

  // monotone decay with preserved zero mode
  RealField w = RealField::constant(g, 1.0) + sine(g, 1);
  double prev = l2_norm(w - RealField::constant(g, 1.0));
  for (int i = 0; i < 50; ++i) {
    w = linstep_constant_b(w, none, 0.4, 0.0, 0.05);
    const double cur = l2_norm(w - RealField::constant(g, 1.0));
    CHECK(cur <= prev + 1e-15);
    prev = cur;
    CHECK(spectral::mean(w) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("solve_linear_ivp with constant b matches the one-step kernel") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::constant(g, 0.9);
  prob.u0 = sine(g, 2) + 0.3 * sine(g, 5);
  prob.epsilon = 1e-3;
  prob.dt = 1e-2;
  prob.t_final = 0.5;
  auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
  RealField expect = prob.u0;
  RealField none;
  for (int i = 0; i < 50; ++i) expect = linstep_constant_b(expect, none, 0.9, 1e-3, 1e-2);
  CHECK(max_abs(res.traj.final_field() - expect) <= 1e-13);
  CHECK(res.ledger.rows.size() == 50);
}

TEST_CASE("variable-coefficient solve dissipates L2 under the guard") {
  auto g = make_grid(128, 2.0 * kPi);
  for (int n : {128, 256}) {
    auto gr = make_grid(n, 2.0 * kPi);
    LinearProblem prob;
    prob.b = RealField::from_function(gr, [](double x) { return 0.4 + 0.1 * std::sin(x); });
    prob.u0 = sine(gr, 2);
    prob.dt = 2e-6;
    prob.t_final = 2e-4;
    prob.output_stride = 10;
    auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
    double prev = l2_norm(res.traj.fields.front());
    for (size_t i = 1; i < res.traj.size(); ++i) {
      const double cur = l2_norm(res.traj.fields[i]);
      CHECK(cur <= prev * (1.0 + 1e-12));
      prev = cur;
    }
  }
}

TEST_CASE("stability guard rejects oversized steps") {
  auto g = make_grid(256, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::from_function(g, [](double x) { return 1.0 + 0.5 * std::sin(x); });
  prob.u0 = sine(g, 1);
  prob.dt = 1e-2;
  prob.t_final = 0.1;
  CHECK_THROWS_AS(solve_linear_ivp(prob, SobolevIndex(3.0)), StabilityGuardError);
}

TEST_CASE("blow-up guard aborts on runaway growth and on NaN") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::constant(g, 1.0);
  prob.u0 = sine(g, 1);
  prob.dt = 1e-3;
  prob.t_final = 0.02;
  // forcing that explodes tenfold per step is a genuine runaway
  double amp = 1.0;
  for (int j = 0; j < 20; ++j) {
    prob.f_series.push_back(amp * sine(g, 1));
    amp *= 10.0;
  }
  CHECK_THROWS_AS(solve_linear_ivp(prob, SobolevIndex(3.0)), BlowUp);

  prob.f_series.clear();
  prob.f = RealField::constant(g, 0.0);
  prob.f.mutable_sample(5) = std::nan("");
  CHECK_THROWS_AS(solve_linear_ivp(prob, SobolevIndex(3.0)), BlowUp);

  // a forced start from zero data is a legitimate response, not a blow-up
  prob.f = RealField::constant(g, 3.0);
  prob.u0 = RealField::zeros(g);
  CHECK_NOTHROW(solve_linear_ivp(prob, SobolevIndex(3.0)));
}

TEST_CASE("manufactured solution converges at first order") {
  // u* = e^{-t} sin(x); f = u*_t + b H[u*'''] - eps u*'''''' has a closed form
  auto g = make_grid(64, 2.0 * kPi);
  const double eps = 1e-4;
  RealField b = RealField::from_function(g, [](double x) { return 1.0 + 0.05 * std::sin(x); });
  auto err_at = [&](double dt) {
    const double T = 0.2;
    const int steps = static_cast<int>(std::llround(T / dt));
    LinearProblem prob;
    prob.b = b;
    prob.u0 = sine(g, 1);
    prob.epsilon = eps;
    prob.dt = dt;
    prob.t_final = T;
    prob.output_stride = steps;
    prob.f_series.reserve(static_cast<size_t>(steps));
    for (int j = 0; j < steps; ++j) {
      const double t = j * dt;  // forcing sampled at step start, like the scheme
      prob.f_series.push_back(RealField::from_function(g, [&](double x) {
        const double s = std::sin(x);
        return std::exp(-t) * (-s + (1.0 + 0.05 * s) * s + eps * s);
      }));
    }
    auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
    RealField exact = std::exp(-T) * sine(g, 1);
    return l2_norm(res.traj.final_field() - exact);
  };
  const double e1 = err_at(1e-4);
  const double e2 = err_at(5e-5);
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("energy ledger: exact identity for constant coefficients") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::constant(g, 0.8);
  prob.u0 = sine(g, 1) + 0.2 * sine(g, 4);
  prob.epsilon = 1e-3;
  prob.dt = 1e-3;
  prob.t_final = 0.05;
  auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
  LedgerReport rep = energy_ledger_check(res.ledger);
  CHECK(rep.ok());
  CHECK(rep.max_res_l2 <= 1e-12);
  CHECK(rep.max_res_hs <= 1e-10);
  CHECK(rep.cumulative_balance_l2 <= 1e-11);
}

TEST_CASE("energy ledger: cumulative balance is O(dt) for variable b") {
  auto g = make_grid(64, 2.0 * kPi);
  auto balance_at = [&](double dt) {
    LinearProblem prob;
    prob.b = RealField::from_function(g, [](double x) { return 0.6 + 0.2 * std::sin(x); });
    prob.u0 = sine(g, 2);
    prob.dt = dt;
    prob.t_final = 0.02;
    auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
    // f = 0: total L2 decrease must match recorded dissipation up to O(dt)
    return energy_ledger_check(res.ledger).cumulative_balance_l2;
  };
  const double b1 = balance_at(4e-5);
  const double b2 = balance_at(2e-5);
  CHECK(b1 <= 1e-4);
  CHECK(b2 <= 0.7 * b1);  // shrinks with dt
}

TEST_CASE("energy ledger: zero solution gives an all-zero ledger") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::constant(g, 1.0);
  prob.u0 = RealField::zeros(g);
  prob.dt = 1e-3;
  prob.t_final = 0.01;
  auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
  for (const auto& r : res.ledger.rows) {
    CHECK(r.l2_sq == 0.0);
    CHECK(r.hs_sq == 0.0);
    CHECK(r.diss_mean_l2 == 0.0);
    CHECK(r.res_l2 == 0.0);
  }
}

TEST_CASE("viscosity ordering: stronger eps decays no slower") {
  auto g = make_grid(64, 2.0 * kPi);
  RealField u0 = sine(g, 2) + 0.4 * sine(g, 7);
  auto final_norm = [&](double eps) {
    LinearProblem prob;
    prob.b = RealField::constant(g, 0.5);
    prob.u0 = u0;
    prob.epsilon = eps;
    prob.dt = 1e-3;
    prob.t_final = 0.1;
    return l2_norm(solve_linear_ivp(prob, SobolevIndex(3.0)).traj.final_field());
  };
  CHECK(final_norm(1e-2) <= final_norm(1e-3));
  CHECK(final_norm(1e-3) <= final_norm(0.0));
}

TEST_CASE("eps -> 0 limit at first order (constant b, exact oracle)") {
  auto g = make_grid(64, 2.0 * kPi);
  RealField u0 = sine(g, 1) + 0.5 * sine(g, 3);
  const double T = 0.1;
  auto final_at = [&](double eps) {
    LinearProblem prob;
    prob.b = RealField::constant(g, 1.0);
    prob.u0 = u0;
    prob.epsilon = eps;
    prob.dt = 1e-3;
    prob.t_final = T;
    return solve_linear_ivp(prob, SobolevIndex(5.0)).traj.final_field();
  };
  RealField u_eps = final_at(4e-4);
  RealField u_half = final_at(2e-4);
  RealField u_quar = final_at(1e-4);
  const double d1 = spectral::sobolev_norm(u_eps - u_half, SobolevIndex(5.5));
  const double d2 = spectral::sobolev_norm(u_half - u_quar, SobolevIndex(5.5));
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("smoothing transfer: the integral is stable under refinement") {
  // rough-ish data: coefficients ~ (1+lambda)^{-7}, H^{5.5} norm 1
  auto build_u0 = [&](int n, double L) {
    auto g = make_grid(n, L);
    std::vector<std::complex<double>> c(static_cast<size_t>(g->spectrum_size()), 0.0);
    std::mt19937_64 rng(77);
    for (int k = 1; k <= 127; ++k) {
      const double mag = std::pow(1.0 + g->wavenumber(k), -7.0);
      const double ph = 2.0 * kPi * ncl::uniform01(rng);
      c[static_cast<size_t>(k)] = std::polar(mag, ph);
    }
    double nsq = 0.0;
    for (int k = 1; k <= 127; ++k)
      nsq += 2.0 * std::pow(1.0 + g->wavenumber(k), 11.0) *
             std::norm(c[static_cast<size_t>(k)]);
    nsq *= L;
    for (auto& v : c) v /= std::sqrt(nsq);
    return RealField::from_spectrum(g, c);
  };
  auto smoothing = [&](int n, double dt) {
    LinearProblem prob;
    prob.u0 = build_u0(n, 40.0);
    prob.b = RealField::constant(prob.u0.grid_ptr(), 0.7);
    prob.dt = dt;
    prob.t_final = 0.02;
    prob.output_stride = static_cast<int>(std::llround(5e-4 / dt));
    auto res = solve_linear_ivp(prob, SobolevIndex(5.0));
    return lab::smoothing_integral(res.traj, 5.0).value;
  };
  const double base = smoothing(256, 5e-6);
  const double fine = smoothing(512, 2.5e-6);
  CHECK(base > 0.0);
  CHECK(std::abs(fine - base) / base <= 0.01);
}

TEST_CASE("iteration construction agrees with the splitting solver") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::from_function(g, [](double x) { return 1.0 + 0.1 * std::sin(x); });
  prob.u0 = sine(g, 1);
  prob.epsilon = 0.5;  // moderate viscosity keeps the lagged iteration contractive
  prob.dt = 1e-4;
  prob.t_final = 0.01;
  RealField via_iteration = solve_linear_by_iteration(prob, 200, 1e-12);
  RealField via_split = solve_linear_ivp(prob, SobolevIndex(3.0)).traj.final_field();
  CHECK(l2_norm(via_iteration - via_split) <= 1e-5 * std::max(1.0, l2_norm(via_split)));
  prob.epsilon = 0.0;
  CHECK_THROWS_AS(solve_linear_by_iteration(prob, 10, 1e-12), ConfigError);
}

TEST_CASE("problem validation") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.b = RealField::constant(g, 1.0);
  prob.u0 = sine(g, 1);
  prob.dt = 1e-3;
  prob.t_final = 0.0105;  // not an integer multiple of dt
  CHECK_THROWS_AS(solve_linear_ivp(prob, SobolevIndex(3.0)), ConfigError);
  prob.t_final = 0.01;
  prob.b = RealField::constant(g, 0.0);
  CHECK_THROWS_AS(solve_linear_ivp(prob, SobolevIndex(3.0)), ConfigError);
}

TEST_CASE("per-step coefficient series is honored") {
  auto g = make_grid(64, 2.0 * kPi);
  LinearProblem prob;
  prob.u0 = sine(g, 2);
  prob.dt = 1e-2;
  prob.t_final = 2e-2;
  prob.b_series = {RealField::constant(g, 0.5), RealField::constant(g, 2.0)};
  auto res = solve_linear_ivp(prob, SobolevIndex(3.0));
  RealField none;
  RealField expect = linstep_constant_b(
      linstep_constant_b(prob.u0, none, 0.5, 0.0, 1e-2), none, 2.0, 0.0, 1e-2);
  CHECK(max_abs(res.traj.final_field() - expect) <= 1e-14);
  prob.b_series.pop_back();
  CHECK_THROWS_AS(solve_linear_ivp(prob, SobolevIndex(3.0)), ConfigError);
}
