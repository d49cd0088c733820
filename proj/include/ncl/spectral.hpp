#pragma once

// Periodic pseudospectral substrate: uniform grids on [-L/2, L/2), FFT-backed
// Fourier-multiplier operators (Hilbert transform, derivatives, |D|^s),
// discrete Sobolev norms, dealiased products and the Hilbert commutator.
//
// Conventions, fixed once here and relied on everywhere else:
//   * spectrum() returns the half-complex ladder c_k = (1/n) sum_j u_j w^{-jk}
//     for k = 0..n/2, with conjugate modes implicit; multiplier operators act
//     per mode with wavenumber lambda_k = 2*pi*k/L.
//   * H multiplies mode k by i*sgn(k); the zero mode and the Nyquist mode are
//     annihilated (every odd-symbol multiplier zeroes the unpaired Nyquist).
//   * The discrete H^s norm is ||f||^2 = L * sum_k (1+|lambda_k|)^{2s} |c_k|^2
//     counting +/-k pairs twice.
//   * Dealiased products use 3/2 zero padding and zero the Nyquist mode of
//     the result; plain products multiply samples pointwise.
//
// Grids own their FFTW plans; construct grids from a single thread, after
// which transforms on distinct fields are safe to run concurrently.

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "ncl/errors.hpp"

namespace ncl::spectral {

class SpectralGrid {
 public:
  // n even, 16 <= n <= 2^20; length > 0.  Throws ConfigError otherwise.
  SpectralGrid(int n, double length);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int size() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  int spectrum_size() const noexcept { return n_ / 2 + 1; }
  int padded_size() const noexcept { return m_; }

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double node(int j) const { return nodes_[static_cast<size_t>(j)]; }

  // lambda_k = 2*pi*k/length for k = 0..n/2
  double wavenumber(int k) const noexcept;
  double max_wavenumber() const noexcept { return wavenumber(n_ / 2); }

  // Normalized transforms between n samples and n/2+1 coefficients.
  void forward(std::span<const double> samples,
               std::span<std::complex<double>> spec) const;
  void inverse(std::span<const std::complex<double>> spec,
               std::span<double> samples) const;

  // Same pair on the 3/2-padded companion grid (m samples, m/2+1 modes).
  void forward_padded(std::span<const double> samples,
                      std::span<std::complex<double>> spec) const;
  void inverse_padded(std::span<const std::complex<double>> spec,
                      std::span<double> samples) const;

  bool compatible_with(const SpectralGrid& other) const noexcept {
    return n_ == other.n_ && length_ == other.length_;
  }

 private:
  int n_;
  int m_;  // padded companion size
  double length_;
  std::vector<double> nodes_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(int n, double length);

// A real-valued function sampled on a grid.  Value type; copies are cheap
// enough at desk scale and keep every operator a pure function.
class RealField {
 public:
  RealField() = default;
  RealField(GridPtr grid, std::vector<double> samples);

  static RealField zeros(GridPtr grid);
  static RealField constant(GridPtr grid, double value);
  template <class F>
  static RealField from_function(GridPtr grid, F&& f) {
    std::vector<double> s(static_cast<size_t>(grid->size()));
    for (int j = 0; j < grid->size(); ++j) s[static_cast<size_t>(j)] = f(grid->node(j));
    return RealField(std::move(grid), std::move(s));
  }
  static RealField from_spectrum(GridPtr grid,
                                 std::span<const std::complex<double>> spec);

  bool empty() const noexcept { return !grid_; }
  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int size() const { return grid_->size(); }

  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](int j) const { return samples_[static_cast<size_t>(j)]; }
  double& mutable_sample(int j) { return samples_[static_cast<size_t>(j)]; }

  std::vector<std::complex<double>> spectrum() const;

  bool is_finite() const noexcept;

  RealField& operator+=(const RealField& o);
  RealField& operator-=(const RealField& o);
  RealField& operator*=(double a);

 private:
  GridPtr grid_;
  std::vector<double> samples_;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double a, RealField f);

// Nonnegative Sobolev exponent; the main theorem path uses integers >= 5.
struct SobolevIndex {
  double s;
  explicit SobolevIndex(double value);
};

// H[f]: mode k -> i*sgn(k) c_k.  Output has zero mean.
RealField hilbert(const RealField& f);

// j-th spectral derivative, 0 <= j <= 8; j = 0 is the identity.
RealField derivative(const RealField& f, int j);

// |D|^s with symbol |lambda|^s; s = 0 is the identity.
RealField frac_derivative(const RealField& f, double s);

double sobolev_norm(const RealField& f, SobolevIndex s);
double l2_norm(const RealField& f);

// Exact trapezoid pairing (L/n) sum f_j g_j == integral f g for trig polys.
double inner_product(const RealField& f, const RealField& g);
// L * sum_k mult (1+|lambda|)^{2s} Re(c_f conj(c_g))
double weighted_inner_product(const RealField& f, const RealField& g, double s);

double mean(const RealField& f);
double min_value(const RealField& f);
double max_abs(const RealField& f);

// Pointwise product (dealias = false) or 3/2-rule dealiased product
// (dealias = true; the result's Nyquist mode is zeroed).
RealField product(const RealField& f, const RealField& g, bool dealias);

// [H,f]g = H[fg] - f H[g]; products taken with the given dealias policy.
RealField commutator_h(const RealField& f, const RealField& g, bool dealias = true);

}  // namespace ncl::spectral
