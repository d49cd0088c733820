#include "ncl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncl/config.hpp"

namespace ncl::lab {

using cli::format_double;
using spectral::SobolevIndex;

NormSeries norm_series_from(const Trajectory& traj) {
  NormSeries s;
  s.t = traj.times;
  s.hs_half = traj.hs_half;
  s.dxs2_l2 = traj.dxs2_l2;
  s.b_min = traj.beta_eff;
  s.ledger_res = traj.ledger_res;
  s.l2.reserve(traj.size());
  for (const auto& f : traj.fields) s.l2.push_back(spectral::l2_norm(f));
  s.smooth_cum.assign(traj.size(), 0.0);
  for (size_t i = 1; i < traj.size(); ++i) {
    const double h = traj.times[i] - traj.times[i - 1];
    const double a = traj.dxs2_l2[i - 1] * traj.dxs2_l2[i - 1];
    const double b = traj.dxs2_l2[i] * traj.dxs2_l2[i];
    s.smooth_cum[i] = s.smooth_cum[i - 1] + 0.5 * h * (a + b);
  }
  return s;
}

SmoothingResult smoothing_integral(const Trajectory& traj, double s) {
  if (traj.size() < 20)
    throw ConfigError("smoothing integral needs at least 20 trajectory samples");
  if (s != traj.s)
    throw ConfigError("smoothing integral asked for s = " + format_double(s) +
                      " but the trajectory recorded s = " + format_double(traj.s));
  SmoothingResult r;
  r.series = norm_series_from(traj);
  r.value = r.series.smooth_cum.back();
  const double m0 = traj.hs_half.front();
  r.ratio_to_m0sq = m0 > 0.0 ? r.value / (m0 * m0) : 0.0;
  return r;
}

namespace {

std::string digest(const std::string& text) {
  // FNV-1a, hex
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

void fill_env(StudyReport& rep, const EvolveConfig& cfg) {
  rep.environment["n"] = std::to_string(cfg.bg.grid().size());
  rep.environment["length"] = format_double(cfg.bg.grid().length());
  rep.environment["tau"] = format_double(cfg.params.tau);
  rep.environment["gamma"] = format_double(cfg.params.gamma);
  rep.environment["epsilon"] = format_double(cfg.params.epsilon);
  rep.environment["dt"] = format_double(cfg.dt);
  rep.environment["s"] = format_double(cfg.s);
  rep.environment["scheme"] = cfg.scheme == evolve::Scheme::picard ? "picard" : "imex";
}

// contraction ratios measured only where the denominator clears the floor
double filtered_max_ratio(const std::vector<double>& d, double tol) {
  if (d.size() < 2) return 0.0;
  const double floor = *std::min_element(d.begin(), d.end());
  const double cut = std::max(100.0 * floor, 10.0 * tol);
  double r = 0.0;
  for (size_t k = 0; k + 1 < d.size(); ++k)
    if (d[k] >= cut) r = std::max(r, d[k + 1] / d[k]);
  return r;
}

}  // namespace

StudyReport contraction_study(const RealField& u0, const EvolveConfig& cfg,
                              double forced_slab_dt) {
  if (cfg.scheme != evolve::Scheme::picard)
    throw ConfigError("contraction study needs the picard scheme");
  StudyReport rep;
  rep.kind = "contraction";
  fill_env(rep, cfg);
  rep.inputs_digest = digest(rep.environment["n"] + rep.environment["dt"] +
                             format_double(forced_slab_dt) +
                             format_double(spectral::l2_norm(u0)));

  double slab = forced_slab_dt > 0.0 ? forced_slab_dt : 32.0 * cfg.dt;
  const bool adapt = forced_slab_dt <= 0.0;
  evolve::PicardSlab result;
  for (int attempt = 0; attempt < 10; ++attempt) {
    result = evolve::step_picard_slab(u0, cfg, slab);
    const double ratio = filtered_max_ratio(result.distances, cfg.picard_tol);
    if (!adapt || (result.converged && ratio <= 0.5)) break;
    slab /= 2.0;
    if (slab < cfg.dt) {
      slab = cfg.dt;
      result = evolve::step_picard_slab(u0, cfg, slab);
      break;
    }
  }

  const double max_ratio = filtered_max_ratio(result.distances, cfg.picard_tol);
  rep.metrics["slab_dt"] = slab;
  rep.metrics["iterations"] = result.iterations;
  rep.metrics["max_ratio"] = max_ratio;
  rep.metrics["floor"] = result.floor;
  for (size_t k = 0; k < result.distances.size(); ++k)
    rep.metrics["d" + std::to_string(k)] = result.distances[k];

  CheckResult conv{"picard_converged", result.converged ? 1.0 : 0.0, 1.0, ">=",
                   result.converged};
  rep.checks.push_back(conv);
  CheckResult ratio_check{"max_picard_ratio", max_ratio, 0.5, "<=",
                          result.converged && max_ratio <= 0.5};
  rep.checks.push_back(ratio_check);
  return rep;
}

StudyReport lipschitz_study(const RealField& u0, const RealField& perturbation,
                            const std::vector<double>& deltas,
                            const EvolveConfig& cfg) {
  if (deltas.size() < 3) throw ConfigError("lipschitz study needs >= 3 deltas");
  for (size_t i = 0; i + 1 < deltas.size(); ++i)
    if (!(deltas[i] > deltas[i + 1]))
      throw ConfigError("deltas must be strictly decreasing");

  StudyReport rep;
  rep.kind = "lipschitz";
  fill_env(rep, cfg);
  rep.inputs_digest =
      digest(rep.environment["n"] + rep.environment["dt"] +
             format_double(spectral::l2_norm(perturbation)) +
             std::to_string(deltas.size()));

  Trajectory base = evolve::evolve(u0, cfg);
  if (base.aborted) throw BlowUp("base run aborted: " + base.abort_reason, base.abort_time);

  const SobolevIndex shalf(cfg.s + 0.5);
  std::vector<double> R;
  for (double delta : deltas) {
    Trajectory pert = evolve::evolve(u0 + delta * perturbation, cfg);
    if (pert.aborted)
      throw BlowUp("perturbed run aborted: " + pert.abort_reason, pert.abort_time);
    if (pert.size() != base.size())
      throw std::logic_error("trajectories sampled at different times");

    double beta_eff = base.beta_eff.front();
    for (double b : base.beta_eff) beta_eff = std::min(beta_eff, b);
    for (double b : pert.beta_eff) beta_eff = std::min(beta_eff, b);

    double sup_sq = 0.0;
    std::vector<double> integrand(base.size());
    for (size_t i = 0; i < base.size(); ++i) {
      const RealField diff = pert.fields[i] - base.fields[i];
      const double dsq = spectral::sobolev_norm(diff, shalf);
      sup_sq = std::max(sup_sq, dsq * dsq);
      const double hs2 = spectral::sobolev_norm(diff, SobolevIndex(cfg.s + 2.0));
      integrand[i] = hs2 * hs2;
    }
    double integral = 0.0;
    for (size_t i = 1; i < base.size(); ++i)
      integral += 0.5 * (base.times[i] - base.times[i - 1]) *
                  (integrand[i] + integrand[i - 1]);
    const double d0 = spectral::sobolev_norm(delta * perturbation, shalf);
    R.push_back((sup_sq + beta_eff * integral) / (d0 * d0));
  }

  for (size_t i = 0; i < R.size(); ++i)
    rep.metrics["R_delta" + std::to_string(i)] = R[i];
  const double r_last = R[R.size() - 1];
  const double r_prev = R[R.size() - 2];
  const double variation = std::abs(r_last / r_prev - 1.0);
  rep.metrics["variation"] = variation;
  rep.checks.push_back(
      {"R_stability_two_smallest_deltas", variation, 0.20, "<=", variation <= 0.20});
  return rep;
}

namespace {
void write_field_csv(const std::string& path, const RealField& u,
                     const crystal::Background& bg) {
  const RealField hu = spectral::hilbert(u);
  const RealField kappa = crystal::curvature(u, bg);
  const crystal::InterfaceCurve curve = crystal::reconstruct_interface(u, bg);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "xi,u,hu,kappa,x,y\n";
  for (int j = 0; j < u.size(); ++j) {
    out << format_double(u.grid().node(j)) << ',' << format_double(u[j]) << ','
        << format_double(hu[j]) << ',' << format_double(kappa[j]) << ','
        << format_double(curve.x[static_cast<size_t>(j)]) << ','
        << format_double(curve.y[static_cast<size_t>(j)]) << '\n';
  }
}
}  // namespace

void write_norms_csv(const NormSeries& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "t,l2,hs_half,dxs2_l2,smooth_cum,b_min,ledger_res\n";
  for (size_t i = 0; i < s.t.size(); ++i) {
    out << format_double(s.t[i]) << ',' << format_double(s.l2[i]) << ','
        << format_double(s.hs_half[i]) << ',' << format_double(s.dxs2_l2[i])
        << ',' << format_double(s.smooth_cum[i]) << ','
        << format_double(s.b_min[i]) << ',' << format_double(s.ledger_res[i])
        << '\n';
  }
}

void emit_outputs(const Trajectory& traj, const EvolveConfig& cfg,
                  const RunMeta& meta, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir);

  write_norms_csv(norm_series_from(traj), out_dir + "/norms.csv");
  for (size_t i = 0; i < traj.size(); ++i)
    write_field_csv(out_dir + "/field_" + std::to_string(i) + ".csv",
                    traj.fields[i], cfg.bg);

  nlohmann::json j;
  j["config_text"] = meta.config_text;
  j["scheme"] = meta.scheme;
  j["grid"] = {{"n", meta.n}, {"length", meta.length}};
  j["wall_seconds"] = meta.wall_seconds;
  j["aborted"] = traj.aborted;
  if (traj.aborted) {
    j["abort_time"] = traj.abort_time;
    j["abort_reason"] = traj.abort_reason;
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : meta.checks) {
    checks.push_back({{"name", c.name},
                      {"measured", c.measured},
                      {"threshold", c.threshold},
                      {"comparator", c.comparator},
                      {"pass", c.pass}});
  }
  j["checks"] = checks;
  std::ofstream out(out_dir + "/run.json", std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + out_dir + "/run.json");
  out << j.dump(2) << "\n";
}

}  // namespace ncl::lab
