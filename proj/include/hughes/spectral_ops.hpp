#pragma once

#include <vector>

#include "hughes/transform.hpp"

namespace hughes {

/// Multiplies every stored coefficient by symbol(xi).
template <class Symbol>
SpectralField apply_symbol(const SpectralField& in, Symbol&& symbol) {
  const GridSpec& g = in.grid();
  SpectralField out(g);
  for (std::size_t s = 0; s < in.size(); ++s) out[s] = symbol(g.stored_xi(s)) * in[s];
  return out;
}

inline SpectralField ddx(const SpectralField& in) {
  return apply_symbol(in, [](const Vec2& xi) { return cplx(0.0, xi[0]); });
}
inline SpectralField ddy(const SpectralField& in) {
  return apply_symbol(in, [](const Vec2& xi) { return cplx(0.0, xi[1]); });
}
inline SpectralField laplacian(const SpectralField& in) {
  return apply_symbol(in, [](const Vec2& xi) { return cplx(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0); });
}

/// Physical samples of a field on the 3/2-padded grid, used to form
/// alias-free pointwise products.
class PaddedField {
 public:
  explicit PaddedField(const GridSpec& grid)
      : grid_(grid), m_(padded_size(grid.n())), values_(static_cast<std::size_t>(m_) * m_, 0.0) {}

  static int padded_size(int n) { return 3 * n / 2; }

  /// Zero-pads the retained modes (Nyquist excluded) and transforms to the padded grid.
  static PaddedField from_spectral(const SpectralField& in) {
    const GridSpec& g = in.grid();
    PaddedField out(g);
    const int n = g.n();
    const int m = out.m_;
    const int mh = m / 2 + 1;
    std::vector<cplx> spec(static_cast<std::size_t>(m) * mh, cplx{});
    for (int iy = 0; iy < n; ++iy) {
      const int ky = g.mode(iy);
      if (g.is_nyquist(ky)) continue;
      const int py = ((ky % m) + m) % m;
      for (int kx = 0; kx < n / 2; ++kx) spec[static_cast<std::size_t>(py) * mh + kx] = in.at(kx, ky);
    }
    detail::c2r(m, spec.data(), out.values_.data());
    return out;
  }

  /// Back to the n-grid spectrum, dropping modes beyond the retained band.
  SpectralField truncate() const {
    const int n = grid_.n();
    const int m = m_;
    const int mh = m / 2 + 1;
    std::vector<cplx> spec(static_cast<std::size_t>(m) * mh);
    detail::r2c(m, values_.data(), spec.data());
    const double scale = 1.0 / (static_cast<double>(m) * m);
    SpectralField out(grid_);
    for (int iy = 0; iy < n; ++iy) {
      const int ky = grid_.mode(iy);
      if (grid_.is_nyquist(ky)) continue;
      const int py = ((ky % m) + m) % m;
      for (int kx = 0; kx < n / 2; ++kx)
        out[out.stored_index(kx, ky)] = scale * spec[static_cast<std::size_t>(py) * mh + kx];
    }
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Pointwise a*b on the padded grid.
  friend PaddedField operator*(const PaddedField& a, const PaddedField& b) {
    PaddedField out(a.grid_);
    for (std::size_t i = 0; i < out.values_.size(); ++i) out.values_[i] = a.values_[i] * b.values_[i];
    return out;
  }

 private:
  GridSpec grid_;
  int m_;
  std::vector<double> values_;
};

/// Alias-free product of two band-limited fields, truncated back to n modes.
inline SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid());
  return (PaddedField::from_spectral(a) * PaddedField::from_spectral(b)).truncate();
}

/// Pointwise residuals of the full beta = 2 system for density rho and
/// potential gradient (gx, gy), given their time derivatives:
///   r1 = d_t rho - div(rho f(rho)^2 grad phi) - sigma lap rho
///   r2 = d_t phi - 1/2 f(rho)^2 |grad phi|^2 + sigma lap phi + 1/2
/// Derivatives are spectral; grad phi enters only through its samples so
/// non-periodic potentials such as x / f are admissible.
struct SystemResidual {
  RealField density;
  RealField potential;
};

inline SystemResidual full_system_residual(const RealField& rho, const RealField& gx, const RealField& gy,
                                           const RealField& drho_dt, const RealField& dphi_dt,
                                           const ModelParams& params) {
  const GridSpec& g = rho.grid();
  require_same_grid(g, gx.grid());
  require_same_grid(g, gy.grid());
  require_same_grid(g, drho_dt.grid());
  require_same_grid(g, dphi_dt.grid());
  RealField flux_x(g), flux_y(g);
  for (std::size_t i = 0; i < g.real_size(); ++i) {
    const double r = rho.values()[i];
    const double fr = params.saturation(r);
    flux_x.values()[i] = r * fr * fr * gx.values()[i];
    flux_y.values()[i] = r * fr * fr * gy.values()[i];
  }
  const RealField div_flux =
      inverse_transform(ddx(forward_transform(flux_x)) + ddy(forward_transform(flux_y)));
  const RealField lap_rho = inverse_transform(laplacian(forward_transform(rho)));
  const RealField lap_phi = inverse_transform(ddx(forward_transform(gx)) + ddy(forward_transform(gy)));

  SystemResidual out{RealField(g), RealField(g)};
  const double sigma = params.sigma();
  for (std::size_t i = 0; i < g.real_size(); ++i) {
    const double fr = params.saturation(rho.values()[i]);
    const double p2 = gx.values()[i] * gx.values()[i] + gy.values()[i] * gy.values()[i];
    out.density.values()[i] = drho_dt.values()[i] - div_flux.values()[i] - sigma * lap_rho.values()[i];
    out.potential.values()[i] = dphi_dt.values()[i] - 0.5 * fr * fr * p2 + sigma * lap_phi.values()[i] + 0.5;
  }
  return out;
}

/// Residual of the stationary state (rho_bar, x / f(rho_bar)) on `grid`.
inline SystemResidual stationary_residual(const ModelParams& params, const GridSpec& grid) {
  const auto st = stationary_solution(params);
  const RealField rho = RealField::sample(grid, [&](double, double) { return st.rho_bar; });
  const RealField gx = RealField::sample(grid, [&](double, double) { return st.grad_phi_bar[0]; });
  const RealField gy = RealField::sample(grid, [&](double, double) { return st.grad_phi_bar[1]; });
  const RealField zero(grid);
  return full_system_residual(rho, gx, gy, zero, zero, params);
}

}  // namespace hughes
