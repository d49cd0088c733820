// Acceptance suite: one criterion per entry, one pass/fail line each, all
// tolerances pinned in code.  Run everything, or a single criterion with
// --only <k>.  Exit code 0 iff every executed criterion passed.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ncl/cli.hpp"
#include "ncl/config.hpp"
#include "ncl/diagnostics.hpp"
#include "ncl/evolution.hpp"
#include "ncl/initial_data.hpp"
#include "ncl/linear.hpp"
#include "ncl/verify.hpp"

using namespace ncl;
using spectral::l2_norm;
using spectral::make_grid;
using spectral::max_abs;
using spectral::RealField;
using spectral::SobolevIndex;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

RealField sine(spectral::GridPtr g, int k, double amp) {
  const double lam = g->wavenumber(k);
  return RealField::from_function(g, [=](double x) { return amp * std::sin(lam * x); });
}

// ---- C1: Lemma 2.7 identity suite on 100 seeded band-limited fields ----
Outcome c1_operator_identities() {
  const double tol = 1e-10;
  auto inv = verify::check_involution(1, 100, 256, 40.0, tol);
  auto pair = verify::check_pairing(1, 100, 256, 40.0, tol);
  auto trip = verify::check_tripling(1, 100, 256, 40.0, tol);
  std::ostringstream d;
  d << "involution " << inv.measured << ", pairing " << pair.measured
    << ", tripling " << trip.measured << " (tol " << tol << ", 100 fields)";
  return {inv.pass && pair.pass && trip.pass, d.str()};
}

// ---- C2: route equivalence and identities on 20 fields, both backgrounds ----
Outcome c2_route_equivalence() {
  const double tol = 1e-9;
  bool pass = true;
  std::ostringstream d;
  for (bool iv : {false, true}) {
    // n = 512: the windowed background's transcendental compositions reach
    // the identity floor ~1e-6 at n = 256; at 512 they sit near 1e-12
    auto checks = verify::check_routes(2, 20, 512, 40.0, iv, tol);
    for (const auto& c : checks) {
      pass = pass && c.pass;
      d << c.name << " " << c.measured << "  ";
    }
  }
  d << "(tol " << tol << ")";
  return {pass, d.str()};
}

// ---- C3: single-mode decay law over 100 exact-integrator steps ----
Outcome c3_dispersion_law() {
  auto c = verify::check_dispersion_decay(1e-8);
  std::ostringstream d;
  d << "max relative decay error " << c.measured
    << " over b in {0.4,1} x eps in {0,1e-3} x k in {1,2,4} (tol 1e-8)";
  return {c.pass, d.str()};
}

// ---- C4: Ivantsov consistency at tau = 0 ----
Outcome c4_ivantsov_consistency() {
  crystal::PhysicsParams p0;
  p0.tau = 0.0;
  p0.gamma = 0.0;
  auto residual = [&](int n, double L) {
    auto g = make_grid(n, L);
    crystal::Background bg = crystal::ivantsov_background(g, 0.6);
    RealField r = crystal::rhs_full(RealField::zeros(g), bg, p0);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      if (std::abs(g->node(j)) <= 0.3 * L) worst = std::max(worst, std::abs(r[j]));
    return worst;
  };
  const double r40 = residual(256, 40.0);
  const double r80 = residual(512, 80.0);
  const bool small_enough = r40 <= 1e-4;
  const bool decreases = r80 < r40;
  std::ostringstream d;
  d << "max inner-window |rhs|: L=40 " << r40 << " (required <= 1e-4: "
    << (small_enough ? "yes" : "NO") << "), L=80 " << r80
    << " (decreasing: " << (decreases ? "yes" : "NO") << ")";
  return {small_enough && decreases, d.str()};
}

// ---- C5: zero steady state for both schemes over T = 0.1 ----
Outcome c5_steady_state() {
  auto g = make_grid(256, 40.0);
  evolve::EvolveConfig cfg;
  cfg.params.tau = 1.0;
  cfg.params.gamma = 0.2;
  cfg.bg = crystal::flat_background(g);
  cfg.dt = 1e-4;
  cfg.t_final = 0.1;
  cfg.s = 5.0;
  cfg.output_stride = 100;
  double worst = 0.0;
  for (auto scheme : {evolve::Scheme::imex, evolve::Scheme::picard}) {
    cfg.scheme = scheme;
    Trajectory t = evolve::evolve(RealField::zeros(g), cfg);
    if (t.aborted) return {false, "run aborted: " + t.abort_reason};
    for (const auto& f : t.fields) worst = std::max(worst, max_abs(f));
  }
  std::ostringstream d;
  d << "sup |u| over both schemes " << worst << " (tol 1e-13)";
  return {worst <= 1e-13, d.str()};
}

// ---- C6: smoothing functional ----
Outcome c6_smoothing() {
  // closed form: b = beta const, u0 = sin, s = 1
  const double beta = 0.7, T = 0.5;
  auto g = make_grid(256, 2.0 * kPi);
  linsolve::LinearProblem prob;
  prob.b = RealField::constant(g, beta);
  prob.u0 = sine(g, 1, 1.0);
  prob.dt = 1e-3;
  prob.t_final = T;
  prob.output_stride = 1;
  auto res = linsolve::solve_linear_ivp(prob, SobolevIndex(1.0));
  const double got = lab::smoothing_integral(res.traj, 1.0).value;
  const double exact = kPi * (1.0 - std::exp(-2.0 * beta * T)) / (2.0 * beta);
  const double closed_err = std::abs(got - exact) / exact;

  // nonlinear: random M0 = 1 data, drift under simultaneous dt/2 and 2n
  auto smoothing_value = [&](int n, double dt, int stride) {
    auto gr = make_grid(n, 40.0);
    evolve::EvolveConfig cfg;
    cfg.params.tau = 1.0;
    cfg.bg = crystal::flat_background(gr);
    cfg.dt = dt;
    cfg.t_final = 0.05;
    cfg.s = 5.0;
    cfg.output_stride = stride;
    InitSpec spec;
    spec.kind = InitSpec::Kind::random_bandlimited;
    spec.kmax = 8;
    spec.amplitude = 1.0;  // M0
    RealField u0 = make_initial(gr, spec, 5.0, 11);
    Trajectory t = evolve::evolve(u0, cfg);
    if (t.aborted) throw BlowUp("smoothing run aborted", t.abort_time);
    return lab::smoothing_integral(t, 5.0).value;
  };
  const double base = smoothing_value(256, 2e-4, 10);
  const double fine = smoothing_value(512, 1e-4, 20);
  const double drift = std::abs(fine - base) / base;

  std::ostringstream d;
  d << "closed-form error " << closed_err << " (tol 1e-6); integral " << base
    << ", refinement drift " << drift << " (tol 0.05)";
  return {closed_err <= 1e-6 && std::isfinite(base) && drift < 0.05, d.str()};
}

// ---- C7: Picard contraction ratio and slab monotonicity ----
Outcome c7_contraction() {
  auto g = make_grid(256, 2.0 * kPi);
  evolve::EvolveConfig cfg;
  cfg.params.tau = 1.0;
  cfg.bg = crystal::flat_background(g);
  cfg.dt = 5e-5;
  cfg.t_final = 1.0;
  cfg.s = 5.0;
  cfg.scheme = evolve::Scheme::picard;
  RealField u0 = sine(g, 1, 1e-3);

  lab::StudyReport adapted = lab::contraction_study(u0, cfg);
  const double r_adapted = adapted.metrics.at("max_ratio");
  lab::StudyReport forced =
      lab::contraction_study(u0, cfg, 4.0 * adapted.metrics.at("slab_dt"));
  const double r_forced = forced.metrics.at("max_ratio");

  std::ostringstream d;
  d << "adapted slab " << adapted.metrics.at("slab_dt") << " ratio " << r_adapted
    << " (tol 0.5); 4x slab ratio " << r_forced << " (must increase)";
  return {adapted.pass() && r_adapted <= 0.5 && r_forced > r_adapted, d.str()};
}

// ---- C8: viscosity-limit Richardson ratios ----
Outcome c8_viscosity_limit() {
  auto g = make_grid(256, 2.0 * kPi);
  evolve::EvolveConfig cfg;
  cfg.params.tau = 1.0;
  cfg.bg = crystal::flat_background(g);
  cfg.dt = 1e-5;
  cfg.t_final = 0.02;
  cfg.s = 5.0;
  cfg.output_stride = 1 << 20;
  RealField u0 = sine(g, 1, 1e-3) + sine(g, 2, 5e-4);
  evolve::ViscosityTable table =
      evolve::viscosity_sweep(u0, cfg, {1e-2, 5e-3, 2.5e-3});
  if (table.partial) return {false, "a member run aborted"};
  bool ok = !table.ratios.empty();
  std::ostringstream d;
  d << "ratios";
  for (double r : table.ratios) {
    d << " " << r;
    ok = ok && r >= 1.7 && r <= 2.3;
  }
  d << " (window [1.7, 2.3])";
  return {ok, d.str()};
}

// ---- C9: Lipschitz data dependence ----
Outcome c9_lipschitz() {
  auto g = make_grid(256, 2.0 * kPi);
  evolve::EvolveConfig cfg;
  cfg.params.tau = 1.0;
  cfg.bg = crystal::flat_background(g);
  cfg.dt = 2e-5;
  cfg.t_final = 0.02;
  cfg.s = 5.0;
  cfg.output_stride = 50;
  RealField pert = verify::random_bandlimited(g, 4, 3, 5.0, 1.0);
  lab::StudyReport rep = lab::lipschitz_study(RealField::zeros(g), pert,
                                              {1e-2, 5e-3, 2.5e-3}, cfg);
  std::ostringstream d;
  d << "R(1e-2) " << rep.metrics.at("R_delta0") << ", R(5e-3) "
    << rep.metrics.at("R_delta1") << ", R(2.5e-3) " << rep.metrics.at("R_delta2")
    << "; variation " << rep.metrics.at("variation") << " (tol 0.2)";
  return {rep.pass(), d.str()};
}

// ---- C10: determinism and output format ----
Outcome c10_determinism() {
  namespace fs = std::filesystem;
  const std::string base = (fs::temp_directory_path() / "ncl_accept_c10").string();
  fs::remove_all(base);

  cli::RunConfig rc = cli::parse_config(
      "n = 256\nlength = 40\ndt = 1e-4\nt_final = 0.01\noutput_stride = 20\n"
      "init = random_bandlimited 6 0.005\nseed = 42\n");
  auto run_once = [&](const std::string& dir) {
    cli::PreparedRun run = cli::prepare_run(rc);
    Trajectory t = evolve::evolve(run.u0, run.cfg);
    if (t.aborted) throw BlowUp("determinism run aborted", t.abort_time);
    lab::RunMeta meta;
    meta.config_text = cli::emit_config(rc);
    meta.scheme = rc.scheme;
    meta.n = rc.n;
    meta.length = rc.length;
    lab::emit_outputs(t, run.cfg, meta, dir);
    return t.size();
  };
  const size_t count = run_once(base + "/a");
  run_once(base + "/b");

  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool identical = true;
  identical = identical && slurp(base + "/a/norms.csv") == slurp(base + "/b/norms.csv");
  for (size_t i = 0; i < count; ++i) {
    const std::string f = "/field_" + std::to_string(i) + ".csv";
    identical = identical && slurp(base + "/a" + f) == slurp(base + "/b" + f);
  }
  const std::string norms = slurp(base + "/a/norms.csv");
  const bool header_ok =
      norms.rfind("t,l2,hs_half,dxs2_l2,smooth_cum,b_min,ledger_res\n", 0) == 0;

  // run.json round-trips through the config parser
  const std::string run_json = slurp(base + "/a/run.json");
  const std::string key = "\"config_text\": \"";
  const size_t at = run_json.find(key);
  bool roundtrip = false;
  if (at != std::string::npos) {
    std::string esc = run_json.substr(at + key.size());
    esc = esc.substr(0, esc.find('"'));
    std::string text;
    for (size_t i = 0; i < esc.size(); ++i) {
      if (esc[i] == '\\' && i + 1 < esc.size() && esc[i + 1] == 'n') {
        text += '\n';
        ++i;
      } else {
        text += esc[i];
      }
    }
    roundtrip = cli::parse_config(text) == rc;
  }
  fs::remove_all(base);
  std::ostringstream d;
  d << (identical ? "CSVs bit-identical" : "CSV MISMATCH") << "; header "
    << (header_ok ? "exact" : "WRONG") << "; config round-trip "
    << (roundtrip ? "ok" : "FAILED");
  return {identical && header_ok && roundtrip, d.str()};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }

  const std::vector<Criterion> criteria = {
      {"operator-identity-suite", c1_operator_identities},
      {"route-equivalence", c2_route_equivalence},
      {"linear-dispersion-law", c3_dispersion_law},
      {"ivantsov-consistency", c4_ivantsov_consistency},
      {"steady-state-preservation", c5_steady_state},
      {"smoothing-functional", c6_smoothing},
      {"picard-contraction", c7_contraction},
      {"viscosity-limit", c8_viscosity_limit},
      {"lipschitz-dependence", c9_lipschitz},
      {"determinism-and-format", c10_determinism},
  };

  bool all_pass = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int idx = static_cast<int>(i) + 1;
    if (only != 0 && only != idx) continue;
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("C%02d %-28s %s  [%s]\n", idx, criteria[i].name,
                out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
