#include "ncl/initial_data.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace ncl {

using spectral::RealField;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RealField make_initial(spectral::GridPtr grid, const InitSpec& spec, double s,
                       std::uint64_t seed) {
  switch (spec.kind) {
    case InitSpec::Kind::single_mode: {
      if (spec.k < 1 || spec.k >= grid->size() / 2)
        throw ConfigError("single_mode k out of range for the grid");
      const double lam = grid->wavenumber(spec.k);
      const double a = spec.amplitude;
      return RealField::from_function(grid,
                                      [=](double xi) { return a * std::sin(lam * xi); });
    }
    case InitSpec::Kind::gaussian_bump: {
      if (!(spec.width > 0.0)) throw ConfigError("gaussian_bump width must be > 0");
      const double a = spec.amplitude, w = spec.width, c = spec.center;
      return RealField::from_function(grid, [=](double xi) {
        const double r = (xi - c) / w;
        return a * std::exp(-r * r);
      });
    }
    case InitSpec::Kind::random_bandlimited: {
      if (spec.kmax < 1 || spec.kmax >= grid->size() / 2)
        throw ConfigError("random_bandlimited kmax out of range for the grid");
      std::mt19937_64 rng(seed);
      std::vector<std::complex<double>> c(
          static_cast<size_t>(grid->spectrum_size()), 0.0);
      for (int k = 1; k <= spec.kmax; ++k) {
        const double re = 2.0 * uniform01(rng) - 1.0;
        const double im = 2.0 * uniform01(rng) - 1.0;
        c[static_cast<size_t>(k)] = std::complex<double>(re, im);
      }
      // normalize || . ||_{H^{s+1/2}} to the requested amplitude; n-independent
      double nsq = 0.0;
      for (int k = 1; k <= spec.kmax; ++k)
        nsq += 2.0 * std::pow(1.0 + grid->wavenumber(k), 2.0 * s + 1.0) *
               std::norm(c[static_cast<size_t>(k)]);
      nsq *= grid->length();
      const double scale = nsq > 0.0 ? spec.amplitude / std::sqrt(nsq) : 0.0;
      for (auto& v : c) v *= scale;
      return RealField::from_spectrum(std::move(grid), c);
    }
  }
  throw ConfigError("unknown init kind");
}

}  // namespace ncl
