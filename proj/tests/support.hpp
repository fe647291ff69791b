#pragma once

#include <cmath>
#include <random>

#include "hughes/grid.hpp"
#include "hughes/transform.hpp"

namespace hughes::testing {

inline ModelParams subcritical(double sigma = 0.0, double horizon = 10.0) {
  return ModelParams::validate(1.0, 0.25, sigma, horizon);
}

inline RealField random_field(const GridSpec& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  RealField f(g);
  for (double& v : f.values()) v = nd(rng);
  return f;
}

/// Smooth real field with spectrum limited to |k| <= kmax on both axes.
inline SpectralField random_band_limited(const GridSpec& g, std::mt19937_64& rng, int kmax, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SpectralField f(g);
  for (int kx = 0; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if (kx == 0 && ky < 0) continue;
      cplx c(u(rng), u(rng));
      if (kx == 0 && ky == 0) c = {c.real(), 0.0};
      f.set_mode(kx, ky, c);
    }
  return f;
}

inline RealField gaussian(const GridSpec& g, double amplitude, double width) {
  const double c = 0.5 * g.length();
  return RealField::sample(g, [&](double x, double y) {
    return amplitude * std::exp(-((x - c) * (x - c) + (y - c) * (y - c)) / (2.0 * width * width));
  });
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace hughes::testing
