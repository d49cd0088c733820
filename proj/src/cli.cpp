#include "ncl/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ncl/diagnostics.hpp"
#include "ncl/initial_data.hpp"
#include "ncl/verify.hpp"

namespace ncl::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve_out_dir(const std::string& flag, const RunConfig& rc) {
  if (!flag.empty()) return flag;
  if (!rc.out_dir.empty()) return rc.out_dir;
  if (const char* env = std::getenv("NCL_OUT_DIR"); env && *env) return env;
  return "./ncl_out";
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ConfigError("bad number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

void print_report(const lab::StudyReport& rep) {
  for (const auto& c : rep.checks) {
    std::printf("  %-42s %s   (measured %.6g %s %.6g)\n", c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.measured, c.comparator.c_str(),
                c.threshold);
  }
  std::printf("%s: %s\n", rep.kind.c_str(), rep.pass() ? "PASS" : "FAIL");
}

// sup ||u||^2_{H^{s+1/2}} + beta_eff int ||d^{s+2}u||^2 dt <= 8 M0^2,
// checked and reported on every run rather than assumed
lab::CheckResult uniform_bound_shadow(const Trajectory& t) {
  const double m0sq = t.hs_half.front() * t.hs_half.front();
  double sup_sq = 0.0, integral = 0.0, beta = t.beta_eff.front();
  for (size_t i = 0; i < t.size(); ++i) {
    sup_sq = std::max(sup_sq, t.hs_half[i] * t.hs_half[i]);
    beta = std::min(beta, t.beta_eff[i]);
    if (i > 0)
      integral += 0.5 * (t.times[i] - t.times[i - 1]) *
                  (t.dxs2_l2[i] * t.dxs2_l2[i] + t.dxs2_l2[i - 1] * t.dxs2_l2[i - 1]);
  }
  const double shadow = sup_sq + beta * integral;
  return {"uniform_bound_shadow", shadow, 8.0 * m0sq, "<=", shadow <= 8.0 * m0sq};
}

int run_simulate(const RunConfig& rc, const std::string& out_flag) {
  PreparedRun run = prepare_run(rc);
  const auto t0 = std::chrono::steady_clock::now();
  Trajectory traj = evolve::evolve(run.u0, run.cfg);
  const auto t1 = std::chrono::steady_clock::now();

  lab::RunMeta meta;
  meta.config_text = emit_config(rc);
  meta.scheme = rc.scheme;
  meta.n = rc.n;
  meta.length = rc.length;
  meta.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  meta.checks.push_back(uniform_bound_shadow(traj));
  const std::string dir = resolve_out_dir(out_flag, rc);
  lab::emit_outputs(traj, run.cfg, meta, dir);
  if (traj.aborted) {
    std::cerr << "run aborted at t = " << traj.abort_time << ": "
              << traj.abort_reason << "\n";
    return 2;
  }
  std::printf("simulate: %zu output times written to %s\n", traj.size(),
              dir.c_str());
  return 0;
}

int run_verify(const RunConfig& rc) {
  lab::StudyReport rep = verify::verify_suite(rc.seed);
  print_report(rep);
  return rep.pass() ? 0 : 3;
}

int run_smoothing(const RunConfig& rc, const std::string& out_flag) {
  PreparedRun base = prepare_run(rc);
  Trajectory tb = evolve::evolve(base.u0, base.cfg);
  if (tb.aborted) return 2;
  lab::SmoothingResult rb = lab::smoothing_integral(tb, rc.s);

  RunConfig rc2 = rc;
  rc2.n *= 2;
  rc2.dt /= 2.0;
  rc2.output_stride *= 2;
  PreparedRun fine = prepare_run(rc2);
  Trajectory tf = evolve::evolve(fine.u0, fine.cfg);
  if (tf.aborted) return 2;
  lab::SmoothingResult rf = lab::smoothing_integral(tf, rc.s);

  const double drift = std::abs(rf.value - rb.value) / std::max(rb.value, 1e-300);
  std::printf("smoothing integral: base %.12g  refined %.12g  drift %.3g\n",
              rb.value, rf.value, drift);
  std::printf("value / M0^2 = %.6g\n", rb.ratio_to_m0sq);
  const std::string dir = resolve_out_dir(out_flag, rc);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + dir);
  lab::write_norms_csv(rb.series, dir + "/norms.csv");
  return drift < 0.05 ? 0 : 3;
}

int run_viscosity(const RunConfig& rc, const std::string& eps_text) {
  PreparedRun run = prepare_run(rc);
  const std::vector<double> eps = parse_list(eps_text);
  evolve::ViscosityTable table = evolve::viscosity_sweep(run.u0, run.cfg, eps);
  if (table.partial) {
    std::cerr << "viscosity sweep: a member run aborted; table is partial\n";
    return 2;
  }
  for (size_t i = 0; i < table.consec_dist.size(); ++i)
    std::printf("  |u^{%.3g}(T) - u^{%.3g}(T)|_{H^{s+1/2}} = %.9g\n",
                table.eps[i], table.eps[i + 1], table.consec_dist[i]);
  bool ok = !table.ratios.empty();
  for (double r : table.ratios) {
    std::printf("  richardson ratio %.4f\n", r);
    ok = ok && r >= 1.7 && r <= 2.3;
  }
  std::printf("fitted rate (log2) %.4f\n", table.fitted_rate);
  return ok ? 0 : 3;
}

int run_lipschitz(const RunConfig& rc, const std::string& delta_text) {
  PreparedRun run = prepare_run(rc);
  const std::vector<double> deltas = parse_list(delta_text);
  spectral::RealField pert =
      verify::random_bandlimited(run.grid, 4, rc.seed + 1, rc.s, 1.0);
  lab::StudyReport rep = lab::lipschitz_study(run.u0, pert, deltas, run.cfg);
  print_report(rep);
  return rep.pass() ? 0 : 3;
}

int run_contraction(const RunConfig& rc, double slab_dt) {
  RunConfig rcp = rc;
  rcp.scheme = "picard";
  PreparedRun run = prepare_run(rcp);
  lab::StudyReport rep = lab::contraction_study(run.u0, run.cfg, slab_dt);
  print_report(rep);
  return rep.pass() ? 0 : 3;
}

}  // namespace

PreparedRun prepare_run(const RunConfig& rc) {
  PreparedRun run;
  run.grid = spectral::make_grid(rc.n, rc.length);
  run.cfg.params.tau = rc.tau;
  run.cfg.params.gamma = rc.gamma;
  run.cfg.params.epsilon = rc.epsilon;
  run.cfg.params.validate();
  run.cfg.bg = rc.background == "ivantsov"
                   ? crystal::ivantsov_background(run.grid, rc.window_inner_fraction)
                   : crystal::flat_background(run.grid);
  run.cfg.s = rc.s;
  run.cfg.dt = rc.dt;
  run.cfg.t_final = rc.t_final;
  run.cfg.scheme = rc.scheme == "picard" ? evolve::Scheme::picard : evolve::Scheme::imex;
  run.cfg.picard_tol = rc.picard_tol;
  run.cfg.picard_max_iter = rc.picard_max_iter;
  run.cfg.output_stride = rc.output_stride;
  run.u0 = make_initial(run.grid, rc.init, rc.s, rc.seed);
  return run;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"needle-crystal interface evolution laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::string eps_text = "1e-2,5e-3,2.5e-3";
  std::string delta_text = "1e-2,5e-3,2.5e-3";
  double slab_dt = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file (key = value lines)");
    sub->add_option("--out", out_dir, "output directory");
  };
  CLI::App* sim = app.add_subcommand("simulate", "run one evolution and write outputs");
  add_common(sim);
  CLI::App* ver = app.add_subcommand("verify", "run the operator-identity suite");
  add_common(ver);
  CLI::App* smo = app.add_subcommand("smoothing", "smoothing-functional refinement study");
  add_common(smo);
  CLI::App* vis = app.add_subcommand("viscosity-limit", "eps -> 0 Richardson study");
  add_common(vis);
  vis->add_option("--eps", eps_text, "comma-separated decreasing eps list");
  CLI::App* lip = app.add_subcommand("lipschitz", "data-dependence study");
  add_common(lip);
  lip->add_option("--deltas", delta_text, "comma-separated decreasing delta list");
  CLI::App* con = app.add_subcommand("contraction", "picard contraction study");
  add_common(con);
  con->add_option("--slab-dt", slab_dt, "force a slab length (skips adaptation)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig rc = config_path.empty() ? RunConfig{} : parse_config(read_file(config_path));
    if (sim->parsed()) return run_simulate(rc, out_dir);
    if (ver->parsed()) return run_verify(rc);
    if (smo->parsed()) return run_smoothing(rc, out_dir);
    if (vis->parsed()) return run_viscosity(rc, eps_text);
    if (lip->parsed()) return run_lipschitz(rc, delta_text);
    if (con->parsed()) return run_contraction(rc, slab_dt);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const BlowUp& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const EllipticityLoss& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  } catch (const GuardViolation& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace ncl::cli
