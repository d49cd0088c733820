#include "ncl/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncl::evolve {

using linsolve::split_step;
using linsolve::SplitStepResult;
using spectral::SobolevIndex;

namespace {

int step_count(double t_final, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_final >= dt)) throw ConfigError("t_final must be >= dt");
  const double raw = t_final / dt;
  const long long m = std::llround(raw);
  if (std::abs(raw - static_cast<double>(m)) > 1e-6 * std::max(1.0, raw))
    throw ConfigError("t_final must be an integer multiple of dt");
  return static_cast<int>(m);
}

// min B >= tau(1-gamma) e^{-3 max|u|} is an exact pointwise bound on a flat
// background; a violation means the operator tower is corrupted.
void assert_flat_ellipticity(const RealField& u, const EvolveConfig& cfg,
                             double beta_eff) {
  if (cfg.bg.kind != crystal::BackgroundKind::flat) return;
  const double floor =
      cfg.params.beta() * std::exp(-3.0 * spectral::max_abs(u));
  if (beta_eff < floor * (1.0 - 1e-10))
    throw std::logic_error("flat-background ellipticity bound violated");
}

struct StepOutcome {
  RealField u;
  double beta_eff;
  double ledger_res;
};

StepOutcome one_imex_step(const RealField& u, const EvolveConfig& cfg,
                          double t_end, double ref_norm) {
  crystal::RhsEval eval = crystal::evaluate_rhs(u, cfg.bg, cfg.params);
  if (!(eval.beta_eff > 0.0))
    throw EllipticityLoss("beta_eff = " + std::to_string(eval.beta_eff) +
                          " at t = " + std::to_string(t_end));
  assert_flat_ellipticity(u, cfg, eval.beta_eff);
  SplitStepResult st = split_step(u, eval.b_field, eval.n_field,
                                  cfg.params.epsilon, cfg.dt, cfg.s, t_end);
  // ref_norm <= 0 requests the finiteness check only (first step of a run,
  // where no growth history exists yet)
  if (!st.u_next.is_finite() ||
      (ref_norm > 0.0 && spectral::l2_norm(st.u_next) > 1e6 * ref_norm))
    throw BlowUp("blow-up at t = " + std::to_string(t_end), t_end);
  return {std::move(st.u_next), eval.beta_eff, st.row.res_hs};
}

}  // namespace

RealField step_imex(const RealField& u_n, const EvolveConfig& cfg) {
  // a single step has no growth history; only catastrophes are flagged
  return one_imex_step(u_n, cfg, cfg.dt, std::max(spectral::l2_norm(u_n), 1.0)).u;
}

PicardSlab step_picard_slab(const RealField& u_n, const EvolveConfig& cfg,
                            double slab_dt) {
  if (!(cfg.picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
  if (cfg.picard_max_iter < 1) throw ConfigError("picard_max_iter must be >= 1");
  const int m = step_count(slab_dt, cfg.dt);
  const double tol = cfg.picard_tol;
  const double scale =
      std::max(1.0, spectral::sobolev_norm(u_n, SobolevIndex(cfg.s - 0.5)));
  // the growth reference absorbs the first micro-step so slabs started from
  // zero data on a driven background are not flagged
  double ref = std::max(spectral::l2_norm(u_n), 1e-30);
  bool ref_absorbed = false;

  PicardSlab slab;
  slab.path.assign(static_cast<size_t>(m + 1), u_n);

  int stagnant = 0;
  double d_prev = -1.0;
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    // coefficients frozen along the previous iterate
    std::vector<RealField> next;
    std::vector<linsolve::EnergyLedgerRow> rows;
    next.reserve(static_cast<size_t>(m + 1));
    next.push_back(u_n);
    RealField u = u_n;
    for (int j = 0; j < m; ++j) {
      crystal::RhsEval eval =
          crystal::evaluate_rhs(slab.path[static_cast<size_t>(j)], cfg.bg, cfg.params);
      if (!(eval.beta_eff > 0.0))
        throw EllipticityLoss("beta_eff lost ellipticity inside a picard slab");
      assert_flat_ellipticity(slab.path[static_cast<size_t>(j)], cfg, eval.beta_eff);
      SplitStepResult st = split_step(u, eval.b_field, eval.n_field,
                                      cfg.params.epsilon, cfg.dt, cfg.s,
                                      (j + 1) * cfg.dt);
      u = std::move(st.u_next);
      if (!u.is_finite())
        throw BlowUp("picard slab blow-up", (j + 1) * cfg.dt);
      if (!ref_absorbed) {
        ref = std::max(ref, spectral::l2_norm(u));
        ref_absorbed = true;
      } else if (spectral::l2_norm(u) > 1e6 * ref) {
        throw BlowUp("picard slab blow-up", (j + 1) * cfg.dt);
      }
      rows.push_back(st.row);
      next.push_back(u);
    }
    double d = 0.0;
    for (size_t j = 0; j < next.size(); ++j)
      d = std::max(d, spectral::sobolev_norm(next[j] - slab.path[j],
                                             SobolevIndex(cfg.s - 0.5)));
    slab.distances.push_back(d);
    slab.path = std::move(next);
    slab.ledger_rows = std::move(rows);
    slab.iterations = it;

    if (d <= tol) {
      slab.converged = true;
      break;
    }
    if (d_prev >= 0.0 && d >= 0.5 * d_prev && d <= 1e-6 * scale) {
      if (++stagnant >= 2) {  // iterating against roundoff
        slab.converged = true;
        slab.floor = d;
        break;
      }
    } else {
      stagnant = 0;
    }
    d_prev = d;
  }
  return slab;
}

Trajectory evolve(const RealField& u0, const EvolveConfig& cfg) {
  cfg.params.validate();
  if (!u0.grid().compatible_with(cfg.bg.grid()))
    throw ConfigError("initial data and background grids differ");
  if (!u0.is_finite()) throw ConfigError("initial data is not finite");
  const int steps = step_count(cfg.t_final, cfg.dt);
  const int stride = std::max(1, cfg.output_stride);

  if (cfg.scheme == Scheme::picard) {
    if (!(cfg.picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
    if (cfg.picard_max_iter < 1) throw ConfigError("picard_max_iter must be >= 1");
  }

  Trajectory traj;
  traj.s = cfg.s;
  double ref = std::max(spectral::l2_norm(u0), 1e-30);

  auto record = [&](double t, const RealField& v, double beff, double res,
                    int iters) {
    traj.times.push_back(t);
    traj.fields.push_back(v);
    traj.hs_half.push_back(spectral::sobolev_norm(v, SobolevIndex(cfg.s + 0.5)));
    traj.dxs2_l2.push_back(
        spectral::l2_norm(spectral::derivative(v, static_cast<int>(cfg.s) + 2)));
    traj.beta_eff.push_back(beff);
    traj.ledger_res.push_back(res);
    traj.picard_iters.push_back(iters);
  };

  // reject unrunnable configurations up front
  {
    crystal::RhsEval eval0 = crystal::evaluate_rhs(u0, cfg.bg, cfg.params);
    RealField brem = eval0.b_field;
    brem += RealField::constant(u0.grid_ptr(), -spectral::mean(eval0.b_field));
    const double lam = u0.grid().max_wavenumber();
    if (cfg.dt * spectral::max_abs(brem) * lam * lam * lam > 0.5)
      throw StabilityGuardError("dt violates the stability guard at t = 0");
    record(0.0, u0, eval0.beta_eff, 0.0, 0);
  }

  try {
    if (cfg.scheme == Scheme::imex) {
      RealField u = u0;
      for (int j = 0; j < steps; ++j) {
        const double t_end = (j + 1) * cfg.dt;
        StepOutcome out = one_imex_step(u, cfg, t_end, j == 0 ? -1.0 : ref);
        u = std::move(out.u);
        // absorb the first step into the growth reference: runs started from
        // zero data on a driven background are not flagged
        if (j == 0) ref = std::max(ref, spectral::l2_norm(u));
        if ((j + 1) % stride == 0 || j + 1 == steps)
          record(t_end, u, out.beta_eff, out.ledger_res, 0);
      }
    } else {
      RealField u = u0;
      int done = 0;
      int slab_steps = cfg.slab_dt > 0.0
                           ? step_count(cfg.slab_dt, cfg.dt)
                           : std::min(16, steps);
      int fast_streak = 0;
      while (done < steps) {
        slab_steps = std::min(slab_steps, steps - done);
        PicardSlab slab = step_picard_slab(u, cfg, slab_steps * cfg.dt);
        if (!slab.converged) {
          if (!cfg.adapt_slab || slab_steps == 1)
            throw BlowUp("picard iteration failed to contract at slab = dt",
                         done * cfg.dt);
          slab_steps = std::max(1, slab_steps / 2);
          continue;
        }
        for (int j = 1; j <= slab_steps; ++j) {
          const int gj = done + j;
          if (gj % stride == 0 || gj == steps) {
            const RealField& v = slab.path[static_cast<size_t>(j)];
            crystal::RhsEval ev = crystal::evaluate_rhs(v, cfg.bg, cfg.params);
            assert_flat_ellipticity(v, cfg, ev.beta_eff);
            record(gj * cfg.dt, v, ev.beta_eff,
                   slab.ledger_rows[static_cast<size_t>(j - 1)].res_hs,
                   slab.iterations);
          }
        }
        u = slab.path.back();
        done += slab_steps;
        if (cfg.adapt_slab) {
          if (slab.iterations < 5) {
            if (++fast_streak >= 5) {
              slab_steps *= 2;
              fast_streak = 0;
            }
          } else {
            fast_streak = 0;
          }
        }
      }
    }
  } catch (const BlowUp& e) {
    traj.aborted = true;
    traj.abort_time = e.t;
    traj.abort_reason = e.what();
  } catch (const EllipticityLoss& e) {
    traj.aborted = true;
    traj.abort_time = traj.times.back();
    traj.abort_reason = e.what();
  } catch (const GuardViolation& e) {
    traj.aborted = true;
    traj.abort_time = traj.times.back();
    traj.abort_reason = e.what();
  } catch (const StabilityGuardError& e) {
    traj.aborted = true;
    traj.abort_time = traj.times.back();
    traj.abort_reason = e.what();
  }
  return traj;
}

ViscosityTable viscosity_sweep(const RealField& u0, const EvolveConfig& cfg,
                               const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw ConfigError("eps list is empty");
  for (size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i] > eps_list[i + 1]))
      throw ConfigError("eps list must be strictly decreasing");
  if (!(eps_list.back() >= 0.0)) throw ConfigError("eps must be >= 0");

  ViscosityTable table;
  table.eps = eps_list;
  std::vector<RealField> finals;
  for (double eps : eps_list) {
    EvolveConfig c = cfg;
    c.params.epsilon = eps;
    Trajectory t = evolve(u0, c);
    if (t.aborted) {
      table.partial = true;
      break;
    }
    finals.push_back(t.final_field());
  }
  if (finals.size() < 2) return table;

  const SobolevIndex shalf(cfg.s + 0.5);
  for (size_t i = 0; i + 1 < finals.size(); ++i)
    table.dist_to_min.push_back(
        spectral::sobolev_norm(finals[i] - finals.back(), shalf));
  for (size_t i = 0; i + 1 < finals.size(); ++i)
    table.consec_dist.push_back(
        spectral::sobolev_norm(finals[i] - finals[i + 1], shalf));
  for (size_t i = 0; i + 1 < table.consec_dist.size(); ++i)
    table.ratios.push_back(table.consec_dist[i] / table.consec_dist[i + 1]);
  if (!table.ratios.empty()) {
    double acc = 0.0;
    for (double r : table.ratios) acc += std::log2(r);
    table.fitted_rate = acc / static_cast<double>(table.ratios.size());
  }
  return table;
}

}  // namespace ncl::evolve
