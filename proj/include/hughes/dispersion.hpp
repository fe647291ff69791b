#pragma once

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "hughes/spectral_ops.hpp"

namespace hughes {

/// psi = A cos(a x + b y + c t), phi = B sin(a x + b y + c t), solving the
/// inviscid linearization around the stationary flow for the given beta.
struct PlanarWave {
  double a = 0.0, b = 0.0;
  double c = 0.0;
  double A = 0.0, B = 1.0;
  int beta = 2;
  /// 2 when c is a double root of the dispersion relation.
  int multiplicity = 1;
};

namespace detail {

// Roots of c^2 - 2 p c + q = 0 with a relative tolerance on the discriminant;
// roots are ordered by decreasing value.
inline std::vector<std::pair<double, int>> real_roots(double p, double q, double scale) {
  const double disc = p * p - q;
  const double tol = 1e-12 * std::max(scale, std::numeric_limits<double>::min());
  if (disc < -tol) return {};
  if (std::abs(disc) <= tol) return {{p, 2}};
  const double s = std::sqrt(disc);
  // stable pair: the larger-magnitude root first, the other by Vieta
  const double big = p >= 0.0 ? p + s : p - s;
  const double small = big != 0.0 ? q / big : 0.0;
  return big > small ? std::vector<std::pair<double, int>>{{big, 1}, {small, 1}}
                     : std::vector<std::pair<double, int>>{{small, 1}, {big, 1}};
}

}  // namespace detail

/// beta = 2: -c^2 + 2a(f - rho)c - a^2 f(f - rho) - b^2 rho f = 0, amplitudes
/// from A(c - a(f - 2 rho)) = B(a^2 + b^2) rho f^2 with B = 1, equivalently
/// A = f (f a - c).
inline std::vector<PlanarWave> dispersion_beta2(double a, double b, const ModelParams& params) {
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) throw InvalidParams("beta = 2 dispersion requires a != 0");
  const double f = params.f();
  const double r = params.rho_bar();
  const double p = a * (f - r);
  const double q = a * a * f * (f - r) + b * b * r * f;
  const double scale = p * p + a * a * f * std::abs(f - r) + b * b * r * f;
  std::vector<PlanarWave> out;
  for (const auto& [c, mult] : detail::real_roots(p, q, scale)) {
    out.push_back({a, b, c, f * (f * a - c), 1.0, 2, mult});
  }
  return out;
}

/// beta = 0: c = f a +- sqrt(rho f (a^2 + b^2)), amplitudes B(c - f a) = f A, B = 1.
inline std::vector<PlanarWave> dispersion_beta0(double a, double b, const ModelParams& params) {
  if (a == 0.0 && b == 0.0) throw InvalidParams("beta = 0 dispersion requires (a, b) != (0, 0)");
  const double f = params.f();
  const double r = params.rho_bar();
  const double s = std::sqrt(r * f * (a * a + b * b));
  std::vector<PlanarWave> out;
  for (double c : {f * a + s, f * a - s}) out.push_back({a, b, c, (c - f * a) / f, 1.0, 0, 1});
  return out;
}

/// Largest (b/a)^2 admitting real beta = 2 waves: ((f - rho)^2 - f (f - rho)) / (rho f),
/// which simplifies to (rho - f) / f; negative in the subcritical regime.
inline double wave_threshold(const ModelParams& params) {
  return (params.rho_bar() - params.f()) / params.f();
}

/// ratio b/a -> whether beta = 2 planar waves exist.
inline std::map<double, bool> wave_existence_region(const ModelParams& params, std::span<const double> ratio_grid) {
  const double thr = wave_threshold(params);
  std::map<double, bool> out;
  for (double ratio : ratio_grid) {
    const double r2 = ratio * ratio;
    out[ratio] = thr >= 0.0 && r2 <= thr + 1e-12 * std::max(1.0, thr);
  }
  return out;
}

/// Residuals of the two amplitude identification equations of a wave.
inline std::array<double, 2> amplitude_equations(const PlanarWave& w, const ModelParams& params) {
  const double f = params.f();
  const double r = params.rho_bar();
  const double k2 = w.a * w.a + w.b * w.b;
  if (w.beta == 2) {
    return {w.A * (w.c - w.a * (f - 2.0 * r)) - w.B * k2 * r * f * f, -w.A / f + w.B * (f * w.a - w.c)};
  }
  return {w.A * (w.c - f * w.a) - r * k2 * w.B, w.B * (w.c - f * w.a) - f * w.A};
}

struct WaveCheck {
  /// max over sampled times and both equations of |residual| / sum of term norms
  double residual = 0.0;
  /// max relative change of the L2 norm of psi over the sampled times
  double amplitude_drift = 0.0;
};

/// Samples the wave on `grid` at `samples` times in [0, T], evaluates the
/// inviscid linear system with spectral space derivatives and exact time
/// derivatives.
inline WaveCheck verify_wave(const PlanarWave& w, const ModelParams& params, const GridSpec& grid, int samples = 9) {
  const double unit = 2.0 * std::numbers::pi / grid.length();
  for (double k : {w.a, w.b}) {
    const double m = k / unit;
    if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m)) || std::abs(std::round(m)) >= grid.n() / 2) {
      throw IncommensurateWave("wavenumbers are not resolved modes of the periodic grid");
    }
  }
  const double f = params.f();
  const double r = params.rho_bar();
  const double T = params.horizon();
  WaveCheck out;
  double l2_ref = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double t = samples > 1 ? T * i / (samples - 1) : 0.0;
    auto phase = [&](double x, double y) { return w.a * x + w.b * y + w.c * t; };
    const RealField psi = RealField::sample(grid, [&](double x, double y) { return w.A * std::cos(phase(x, y)); });
    const RealField phi = RealField::sample(grid, [&](double x, double y) { return w.B * std::sin(phase(x, y)); });
    const RealField psi_t =
        RealField::sample(grid, [&](double x, double y) { return -w.c * w.A * std::sin(phase(x, y)); });
    const RealField phi_t =
        RealField::sample(grid, [&](double x, double y) { return w.c * w.B * std::cos(phase(x, y)); });
    const SpectralField ps = forward_transform(psi);
    const SpectralField ph = forward_transform(phi);
    // terms of each equation, written as d_t X = sum of terms
    std::array<SpectralField, 2> lhs{forward_transform(psi_t), forward_transform(phi_t)};
    std::vector<SpectralField> eq1, eq2;
    if (w.beta == 2) {
      eq1 = {(f - 2.0 * r) * ddx(ps), (r * f * f) * laplacian(ph)};
      eq2 = {f * ddx(ph), (-1.0 / f) * ps};
    } else {
      eq1 = {f * ddx(ps), r * laplacian(ph)};
      eq2 = {f * ddx(ph), f * ps};
    }
    std::array<const std::vector<SpectralField>*, 2> rhs{&eq1, &eq2};
    for (int e = 0; e < 2; ++e) {
      SpectralField res = lhs[e];
      double scale = lhs[e].l2_norm();
      for (const auto& term : *rhs[e]) {
        res -= term;
        scale += term.l2_norm();
      }
      if (scale > 0.0) out.residual = std::max(out.residual, res.l2_norm() / scale);
    }
    const double l2 = ps.l2_norm();
    if (l2_ref < 0.0) l2_ref = l2;
    if (l2_ref > 0.0) out.amplitude_drift = std::max(out.amplitude_drift, std::abs(l2 - l2_ref) / l2_ref);
  }
  return out;
}

}  // namespace hughes
