#include "ncl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ncl::spectral {

namespace {
constexpr int kMinSize = 16;
constexpr int kMaxSize = 1 << 20;
constexpr int kMaxDerivativeOrder = 8;
}  // namespace

struct SpectralGrid::Plans {
  fftw_plan fwd_n = nullptr;
  fftw_plan inv_n = nullptr;
  fftw_plan fwd_m = nullptr;
  fftw_plan inv_m = nullptr;
  ~Plans() {
    if (fwd_n) fftw_destroy_plan(fwd_n);
    if (inv_n) fftw_destroy_plan(inv_n);
    if (fwd_m) fftw_destroy_plan(fwd_m);
    if (inv_m) fftw_destroy_plan(inv_m);
  }
};

namespace {
// Plans are created with FFTW_UNALIGNED so the new-array execute functions
// accept ordinary heap vectors; FFTW_ESTIMATE keeps planning deterministic.
std::pair<fftw_plan, fftw_plan> make_plan_pair(int n) {
  std::vector<double> rbuf(static_cast<size_t>(n));
  std::vector<std::complex<double>> cbuf(static_cast<size_t>(n / 2 + 1));
  auto* c = reinterpret_cast<fftw_complex*>(cbuf.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan fwd = fftw_plan_dft_r2c_1d(n, rbuf.data(), c, flags);
  fftw_plan inv = fftw_plan_dft_c2r_1d(n, c, rbuf.data(), flags);
  return {fwd, inv};
}
}  // namespace

SpectralGrid::SpectralGrid(int n, double length) : n_(n), length_(length) {
  if (n < kMinSize || n > kMaxSize)
    throw ConfigError("grid size n = " + std::to_string(n) + " outside [16, 2^20]");
  if (n % 2 != 0) throw ConfigError("grid size n must be even, got " + std::to_string(n));
  if (!(length > 0.0)) throw ConfigError("grid length must be positive");

  m_ = 3 * n / 2;
  if (m_ % 2 != 0) ++m_;

  nodes_.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    nodes_[static_cast<size_t>(j)] = -length / 2.0 + j * length / n;

  plans_ = std::make_unique<Plans>();
  std::tie(plans_->fwd_n, plans_->inv_n) = make_plan_pair(n_);
  std::tie(plans_->fwd_m, plans_->inv_m) = make_plan_pair(m_);
}

SpectralGrid::~SpectralGrid() = default;

double SpectralGrid::wavenumber(int k) const noexcept {
  return 2.0 * std::numbers::pi * k / length_;
}

void SpectralGrid::forward(std::span<const double> samples,
                           std::span<std::complex<double>> spec) const {
  std::vector<double> in(samples.begin(), samples.end());
  fftw_execute_dft_r2c(plans_->fwd_n, in.data(),
                       reinterpret_cast<fftw_complex*>(spec.data()));
  const double scale = 1.0 / n_;
  for (auto& c : spec) c *= scale;
}

void SpectralGrid::inverse(std::span<const std::complex<double>> spec,
                           std::span<double> samples) const {
  // c2r destroys its input, so transform a scratch copy.
  std::vector<std::complex<double>> tmp(spec.begin(), spec.end());
  fftw_execute_dft_c2r(plans_->inv_n, reinterpret_cast<fftw_complex*>(tmp.data()),
                       samples.data());
}

void SpectralGrid::forward_padded(std::span<const double> samples,
                                  std::span<std::complex<double>> spec) const {
  std::vector<double> in(samples.begin(), samples.end());
  fftw_execute_dft_r2c(plans_->fwd_m, in.data(),
                       reinterpret_cast<fftw_complex*>(spec.data()));
  const double scale = 1.0 / m_;
  for (auto& c : spec) c *= scale;
}

void SpectralGrid::inverse_padded(std::span<const std::complex<double>> spec,
                                  std::span<double> samples) const {
  std::vector<std::complex<double>> tmp(spec.begin(), spec.end());
  fftw_execute_dft_c2r(plans_->inv_m, reinterpret_cast<fftw_complex*>(tmp.data()),
                       samples.data());
}

GridPtr make_grid(int n, double length) {
  return std::make_shared<const SpectralGrid>(n, length);
}

RealField::RealField(GridPtr grid, std::vector<double> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_->size())
    throw ConfigError("sample count does not match grid size");
}

RealField RealField::zeros(GridPtr grid) {
  std::vector<double> s(static_cast<size_t>(grid->size()), 0.0);
  return RealField(std::move(grid), std::move(s));
}

RealField RealField::constant(GridPtr grid, double value) {
  std::vector<double> s(static_cast<size_t>(grid->size()), value);
  return RealField(std::move(grid), std::move(s));
}

RealField RealField::from_spectrum(GridPtr grid,
                                   std::span<const std::complex<double>> spec) {
  if (static_cast<int>(spec.size()) != grid->spectrum_size())
    throw ConfigError("spectrum size does not match grid");
  std::vector<double> s(static_cast<size_t>(grid->size()));
  grid->inverse(spec, s);
  return RealField(std::move(grid), std::move(s));
}

std::vector<std::complex<double>> RealField::spectrum() const {
  std::vector<std::complex<double>> spec(static_cast<size_t>(grid_->spectrum_size()));
  grid_->forward(samples_, spec);
  return spec;
}

bool RealField::is_finite() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(),
                     [](double v) { return std::isfinite(v); });
}

namespace {
void require_same_grid(const RealField& a, const RealField& b) {
  if (!a.grid().compatible_with(b.grid()))
    throw ConfigError("grid mismatch between fields");
}
}  // namespace

RealField& RealField::operator+=(const RealField& o) {
  require_same_grid(*this, o);
  for (size_t j = 0; j < samples_.size(); ++j) samples_[j] += o.samples_[j];
  return *this;
}

RealField& RealField::operator-=(const RealField& o) {
  require_same_grid(*this, o);
  for (size_t j = 0; j < samples_.size(); ++j) samples_[j] -= o.samples_[j];
  return *this;
}

RealField& RealField::operator*=(double a) {
  for (auto& v : samples_) v *= a;
  return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double a, RealField f) { return f *= a; }

SobolevIndex::SobolevIndex(double value) : s(value) {
  if (!(s >= 0.0)) throw ConfigError("Sobolev index must be >= 0");
}

RealField hilbert(const RealField& f) {
  auto spec = f.spectrum();
  const int half = static_cast<int>(spec.size()) - 1;
  spec[0] = 0.0;
  for (int k = 1; k < half; ++k)
    spec[static_cast<size_t>(k)] *= std::complex<double>(0.0, 1.0);
  spec[static_cast<size_t>(half)] = 0.0;
  return RealField::from_spectrum(f.grid_ptr(), spec);
}

RealField derivative(const RealField& f, int j) {
  if (j < 0 || j > kMaxDerivativeOrder)
    throw ConfigError("derivative order must be in [0, 8]");
  if (j == 0) return f;
  auto spec = f.spectrum();
  const int half = static_cast<int>(spec.size()) - 1;
  // (i lambda)^j = i^j lambda^j
  const int phase = j % 4;
  for (int k = 0; k <= half; ++k) {
    const double lj = std::pow(f.grid().wavenumber(k), j);
    std::complex<double>& c = spec[static_cast<size_t>(k)];
    switch (phase) {
      case 0: c *= lj; break;
      case 1: c *= std::complex<double>(0.0, lj); break;
      case 2: c *= -lj; break;
      default: c *= std::complex<double>(0.0, -lj); break;
    }
  }
  if (j % 2 == 1) spec[static_cast<size_t>(half)] = 0.0;
  return RealField::from_spectrum(f.grid_ptr(), spec);
}

RealField frac_derivative(const RealField& f, double s) {
  if (!(s >= 0.0)) throw ConfigError("fractional order must be >= 0");
  if (s == 0.0) return f;
  auto spec = f.spectrum();
  spec[0] = 0.0;
  for (size_t k = 1; k < spec.size(); ++k)
    spec[k] *= std::pow(f.grid().wavenumber(static_cast<int>(k)), s);
  return RealField::from_spectrum(f.grid_ptr(), spec);
}

namespace {
// sum over the full +/- ladder: pair modes twice, ends once
double spectral_sum(const RealField& f, const RealField& g, double s) {
  auto cf = f.spectrum();
  auto cg = g.spectrum();
  const size_t half = cf.size() - 1;
  double acc = 0.0;
  for (size_t k = 0; k <= half; ++k) {
    const double w = std::pow(1.0 + f.grid().wavenumber(static_cast<int>(k)), 2.0 * s);
    const double mult = (k == 0 || k == half) ? 1.0 : 2.0;
    acc += mult * w * (cf[k].real() * cg[k].real() + cf[k].imag() * cg[k].imag());
  }
  return f.grid().length() * acc;
}
}  // namespace

double sobolev_norm(const RealField& f, SobolevIndex s) {
  return std::sqrt(std::max(0.0, spectral_sum(f, f, s.s)));
}

double l2_norm(const RealField& f) { return sobolev_norm(f, SobolevIndex(0.0)); }

double inner_product(const RealField& f, const RealField& g) {
  require_same_grid(f, g);
  double acc = 0.0;
  auto fs = f.samples();
  auto gs = g.samples();
  for (size_t j = 0; j < fs.size(); ++j) acc += fs[j] * gs[j];
  return acc * f.grid().spacing();
}

double weighted_inner_product(const RealField& f, const RealField& g, double s) {
  require_same_grid(f, g);
  return spectral_sum(f, g, s);
}

double mean(const RealField& f) {
  double acc = 0.0;
  for (double v : f.samples()) acc += v;
  return acc / f.size();
}

double min_value(const RealField& f) {
  return *std::min_element(f.samples().begin(), f.samples().end());
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

RealField product(const RealField& f, const RealField& g, bool dealias) {
  require_same_grid(f, g);
  const SpectralGrid& grid = f.grid();
  if (!dealias) {
    std::vector<double> s(static_cast<size_t>(grid.size()));
    auto fs = f.samples();
    auto gs = g.samples();
    for (size_t j = 0; j < s.size(); ++j) s[j] = fs[j] * gs[j];
    return RealField(f.grid_ptr(), std::move(s));
  }

  const size_t half_n = static_cast<size_t>(grid.spectrum_size()) - 1;
  const size_t nm = static_cast<size_t>(grid.padded_size() / 2 + 1);
  auto pad = [&](const RealField& x) {
    auto c = x.spectrum();
    std::vector<std::complex<double>> cp(nm, 0.0);
    std::copy(c.begin(), c.end(), cp.begin());
    cp[half_n] *= 0.5;  // Nyquist splits into a +/- pair on the finer grid
    std::vector<double> s(static_cast<size_t>(grid.padded_size()));
    grid.inverse_padded(cp, s);
    return s;
  };
  std::vector<double> fp = pad(f);
  std::vector<double> gp = pad(g);
  for (size_t j = 0; j < fp.size(); ++j) fp[j] *= gp[j];
  std::vector<std::complex<double>> cp(nm);
  grid.forward_padded(fp, cp);
  std::vector<std::complex<double>> c(half_n + 1);
  std::copy(cp.begin(), cp.begin() + static_cast<long>(half_n + 1), c.begin());
  c[half_n] = 0.0;
  return RealField::from_spectrum(f.grid_ptr(), c);
}

RealField commutator_h(const RealField& f, const RealField& g, bool dealias) {
  return hilbert(product(f, g, dealias)) - product(f, hilbert(g), dealias);
}

}  // namespace ncl::spectral
