#include "ncl/crystal.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace ncl::crystal {

using spectral::commutator_h;
using spectral::derivative;
using spectral::hilbert;
using spectral::max_abs;
using spectral::min_value;
using spectral::product;

namespace {
constexpr double kExpGuard = 50.0;

void check_exp_guard(const RealField& w) {
  const double m = max_abs(w);
  if (!(m <= kExpGuard))
    throw GuardViolation("overflow guard: max|h_i + u| = " + std::to_string(m) +
                         " exceeds " + std::to_string(kExpGuard));
}

// dealiased product, the only product policy used inside the tower
RealField P(const RealField& a, const RealField& b) { return product(a, b, true); }
}  // namespace

void PhysicsParams::validate() const {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must be in [0, 1)");
  if (!(beta() > 0.0)) throw ConfigError("beta = tau*(1-gamma) must be positive");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
}

double window_profile(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  // I_t(10,10) in Bernstein form: sum_{j=10}^{19} C(19,j) t^j (1-t)^{19-j}
  static const double binom[10] = {92378.0, 75582.0, 50388.0, 27132.0, 11628.0,
                                   3876.0,  969.0,   171.0,   19.0,    1.0};
  const double r = 1.0 - t;
  double acc = 0.0;
  for (int j = 10; j <= 19; ++j)
    acc += binom[j - 10] * std::pow(t, j) * std::pow(r, 19 - j);
  return acc;
}

Background flat_background(GridPtr grid) {
  Background bg;
  bg.kind = BackgroundKind::flat;
  bg.h_i = RealField::zeros(grid);
  bg.q_i = RealField::zeros(grid);
  bg.h_i_xi = RealField::zeros(grid);
  bg.q_i_xi = RealField::zeros(grid);
  bg.window = RealField::constant(grid, 1.0);
  return bg;
}

Background ivantsov_background(GridPtr grid, double inner_fraction) {
  if (!(inner_fraction > 0.0 && inner_fraction <= 0.8))
    throw ConfigError("window inner fraction must be in (0, 0.8]");
  const double L = grid->length();
  const double r_in = inner_fraction * L / 2.0;
  const double r_out = 0.9 * L / 2.0;

  Background bg;
  bg.kind = BackgroundKind::ivantsov;
  bg.inner_fraction = inner_fraction;
  bg.window = RealField::from_function(grid, [&](double xi) {
    const double r = std::abs(xi);
    if (r <= r_in) return 1.0;
    if (r >= r_out) return 0.0;
    return window_profile((r_out - r) / (r_out - r_in));
  });
  std::vector<double> h(static_cast<size_t>(grid->size()));
  std::vector<double> q(static_cast<size_t>(grid->size()));
  for (int j = 0; j < grid->size(); ++j) {
    const double xi = grid->node(j);
    const double chi = bg.window[j];
    h[static_cast<size_t>(j)] = chi * 0.5 * std::log1p(xi * xi);
    q[static_cast<size_t>(j)] = chi * (-std::atan(xi));
  }
  bg.h_i = RealField(grid, std::move(h));
  bg.q_i = RealField(grid, std::move(q));
  bg.h_i_xi = derivative(bg.h_i, 1);
  bg.q_i_xi = derivative(bg.q_i, 1);
  return bg;
}

namespace {

// All tower pieces from one pass over the shared subexpressions.  The product
// placement is fixed: transcendental maps are evaluated pointwise, every
// binary product of fields is dealiased, and the outer e^{-2(h_i+u)} factor
// multiplies through the dealiased product so the decomposition chain holds
// discretely.
struct Tower {
  RealField q1, e2, b;
  double beta_eff;
  RealField q2, q3, q_dec, q4, q5, n;

  Tower(const RealField& u, const Background& bg, const PhysicsParams& p,
        bool need_n) {
    const RealField w = bg.h_i + u;
    check_exp_guard(w);
    const RealField hu = hilbert(u);
    const auto& g = u.grid();

    std::vector<double> vq1(static_cast<size_t>(g.size()));
    std::vector<double> ve2(static_cast<size_t>(g.size()));
    std::vector<double> vb(static_cast<size_t>(g.size()));
    for (int j = 0; j < g.size(); ++j) {
      const double aniso = 1.0 - p.gamma * std::cos(4.0 * bg.q_i[j] - 4.0 * hu[j]);
      vq1[static_cast<size_t>(j)] = aniso * std::exp(-w[j]);
      ve2[static_cast<size_t>(j)] = std::exp(-2.0 * w[j]);
      vb[static_cast<size_t>(j)] = p.tau * aniso * std::exp(-3.0 * w[j]);
    }
    q1 = RealField(u.grid_ptr(), std::move(vq1));
    e2 = RealField(u.grid_ptr(), std::move(ve2));
    b = RealField(u.grid_ptr(), std::move(vb));
    // nonpositive beta_eff is reported, not thrown: the evolution layer
    // decides when loss of ellipticity aborts a run (tau = 0 evaluation of
    // the tower is legitimate for steady-state diagnostics)
    beta_eff = min_value(b);

    const RealField du = derivative(u, 1);
    const RealField d2u = derivative(u, 2);
    const RealField dw = bg.h_i_xi + du;
    const RealField h_i_xx = derivative(bg.h_i_xi, 1);
    const RealField one = RealField::constant(u.grid_ptr(), 1.0);

    q2 = P(e2, one + p.tau * hilbert(P(q1, hilbert(h_i_xx))) +
                    p.tau * hilbert(P(derivative(q1, 1), hilbert(dw))));
    q3 = p.tau * P(e2, commutator_h(q1, hilbert(d2u)));
    q_dec = (-1.0) * P(b, d2u) + q2 + q3;

    if (!need_n) return;

    const RealField d3u = derivative(u, 3);
    q4 = (-1.0) * P(derivative(b, 1), d2u) + derivative(q2 + q3, 1);
    q5 = (-1.0) * commutator_h(b, d3u) + hilbert(q4);
    n = P(dw, hilbert(q_dec)) - P(bg.q_i_xi - derivative(hu, 1), q_dec) + q5;
  }
};

void require_bg_grid(const RealField& u, const Background& bg) {
  if (!u.grid().compatible_with(bg.grid()))
    throw ConfigError("field and background live on different grids");
}

}  // namespace

RealField q1(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, false).q1;
}

EllipticCoeff big_b(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  Tower t(u, bg, p, false);
  return {std::move(t.b), t.beta_eff};
}

RealField q2(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, false).q2;
}

RealField q3(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, false).q3;
}

RealField q_direct(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  const RealField w = bg.h_i + u;
  check_exp_guard(w);
  const RealField hu = hilbert(u);
  const auto& g = u.grid();
  std::vector<double> vq1(static_cast<size_t>(g.size()));
  std::vector<double> ve2(static_cast<size_t>(g.size()));
  for (int j = 0; j < g.size(); ++j) {
    const double aniso = 1.0 - p.gamma * std::cos(4.0 * (bg.q_i[j] - hu[j]));
    vq1[static_cast<size_t>(j)] = aniso * std::exp(-w[j]);
    ve2[static_cast<size_t>(j)] = std::exp(-2.0 * w[j]);
  }
  RealField Q1(u.grid_ptr(), std::move(vq1));
  RealField E2(u.grid_ptr(), std::move(ve2));
  const RealField dw = bg.h_i_xi + derivative(u, 1);
  const RealField numer =
      RealField::constant(u.grid_ptr(), 1.0) +
      p.tau * derivative(hilbert(P(Q1, hilbert(dw))), 1);
  return P(E2, numer);
}

RealField q_decomposed(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, false).q_dec;
}

RealField q4(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, true).q4;
}

RealField q5(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, true).q5;
}

RealField rhs_n(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  return Tower(u, bg, p, true).n;
}

RealField rhs_full(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  Tower t(u, bg, p, true);
  return (-1.0) * P(t.b, hilbert(derivative(u, 3))) + t.n;
}

RhsEval evaluate_rhs(const RealField& u, const Background& bg, const PhysicsParams& p) {
  require_bg_grid(u, bg);
  Tower t(u, bg, p, true);
  return {std::move(t.n), std::move(t.b), t.beta_eff};
}

RealField curvature(const RealField& u, const Background& bg) {
  require_bg_grid(u, bg);
  const RealField w = bg.h_i + u;
  check_exp_guard(w);
  std::vector<double> eh(static_cast<size_t>(u.size()));
  for (int j = 0; j < u.size(); ++j) eh[static_cast<size_t>(j)] = std::exp(-w[j]);
  const RealField h_xi = bg.h_i_xi + derivative(u, 1);
  return P(hilbert(h_xi), RealField(u.grid_ptr(), std::move(eh)));
}

namespace {
// Antiderivative vanishing at the left edge; the mean rides on a linear term.
void spectral_antiderivative(const RealField& f, std::vector<double>& out) {
  auto spec = f.spectrum();
  const double m0 = spec[0].real();
  spec[0] = 0.0;
  const size_t half = spec.size() - 1;
  for (size_t k = 1; k < half; ++k)
    spec[k] /= std::complex<double>(0.0, f.grid().wavenumber(static_cast<int>(k)));
  spec[half] = 0.0;
  RealField A = RealField::from_spectrum(f.grid_ptr(), spec);
  const double a0 = A[0];  // node 0 sits at xi = -L/2
  out.resize(static_cast<size_t>(f.size()));
  const double L = f.grid().length();
  for (int j = 0; j < f.size(); ++j)
    out[static_cast<size_t>(j)] = A[j] - a0 + m0 * (f.grid().node(j) + L / 2.0);
}
}  // namespace

InterfaceCurve reconstruct_interface(const RealField& u, const Background& bg) {
  require_bg_grid(u, bg);
  const RealField w = bg.h_i + u;
  check_exp_guard(w);
  const RealField v = (-1.0) * hilbert(u);
  const int n = u.size();

  // deviation of z' from the windowed background curve's z'
  std::vector<double> dre(static_cast<size_t>(n)), dim(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const std::complex<double> zp =
        std::exp(std::complex<double>(w[j], bg.q_i[j] + v[j]));
    const std::complex<double> zp0 =
        std::exp(std::complex<double>(bg.h_i[j], bg.q_i[j]));
    dre[static_cast<size_t>(j)] = zp.real() - zp0.real();
    dim[static_cast<size_t>(j)] = zp.imag() - zp0.imag();
  }
  std::vector<double> are, aim;
  spectral_antiderivative(RealField(u.grid_ptr(), std::move(dre)), are);
  spectral_antiderivative(RealField(u.grid_ptr(), std::move(dim)), aim);

  InterfaceCurve c;
  c.x.resize(static_cast<size_t>(n));
  c.y.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double xi = u.grid().node(j);
    c.x[static_cast<size_t>(j)] = xi + are[static_cast<size_t>(j)];
    c.y[static_cast<size_t>(j)] = -0.5 * xi * xi + aim[static_cast<size_t>(j)];
  }
  return c;
}

}  // namespace ncl::crystal
