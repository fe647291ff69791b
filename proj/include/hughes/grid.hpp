#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hughes/errors.hpp"
#include "hughes/model.hpp"

namespace hughes {

using cplx = std::complex<double>;

/// Periodic square [0, L)^2 sampled on n x n points.
///
/// Physical samples are stored row-major with y as the slow index:
/// value(ix, iy) lives at iy * n + ix. Spectral coefficients use the
/// half-plane layout of a real-to-complex transform: kx in [0, n/2] on the
/// fast axis, ky in the signed range {-n/2+1, ..., n/2} on the slow axis.
class GridSpec {
 public:
  GridSpec(int n, double length) : n_(n), length_(length) {
    if (n < 8 || n % 2 != 0) throw InvalidParams("grid size n must be even and >= 8");
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidParams("grid length must be positive");
  }

  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / n_; }
  std::size_t real_size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  int half_cols() const noexcept { return n_ / 2 + 1; }
  std::size_t spectral_size() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(half_cols());
  }

  /// Signed mode number of array index i in [0, n): {0, 1, ..., n/2, -n/2+1, ..., -1}.
  int mode(int i) const noexcept { return i <= n_ / 2 ? i : i - n_; }
  /// Array index of a signed mode number.
  int index(int k) const noexcept { return ((k % n_) + n_) % n_; }
  bool is_nyquist(int k) const noexcept { return k == n_ / 2 || k == -n_ / 2; }

  /// Wavenumber 2 pi k / L.
  double frequency(int k) const noexcept { return 2.0 * std::numbers::pi * k / length_; }
  /// Wavenumber used by spectral derivatives: the Nyquist mode has no
  /// well-defined odd derivative on the grid and is mapped to zero.
  double derivative_frequency(int k) const noexcept { return is_nyquist(k) ? 0.0 : frequency(k); }

  /// Signed (kx, ky) of a stored half-plane coefficient index.
  std::array<int, 2> stored_mode(std::size_t s) const noexcept {
    const int hc = half_cols();
    return {static_cast<int>(s % hc), mode(static_cast<int>(s / hc))};
  }
  /// Derivative wavenumber vector of a stored coefficient.
  Vec2 stored_xi(std::size_t s) const noexcept {
    const auto [kx, ky] = stored_mode(s);
    return {derivative_frequency(kx), derivative_frequency(ky)};
  }
  /// Multiplicity of a stored coefficient in full-plane sums (its conjugate
  /// partner is implicit unless kx is 0 or n/2).
  double stored_weight(std::size_t s) const noexcept {
    const int kx = static_cast<int>(s % half_cols());
    return (kx == 0 || kx == n_ / 2) ? 1.0 : 2.0;
  }

  double x(int ix) const noexcept { return ix * spacing(); }
  double y(int iy) const noexcept { return iy * spacing(); }

  bool operator==(const GridSpec& o) const noexcept { return n_ == o.n_ && length_ == o.length_; }

 private:
  int n_;
  double length_;
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) {
    throw ShapeMismatch("grid mismatch: n=" + std::to_string(a.n()) + " vs n=" + std::to_string(b.n()));
  }
}

/// Real samples on the grid.
class RealField {
 public:
  explicit RealField(const GridSpec& grid) : grid_(grid), values_(grid.real_size(), 0.0) {}
  RealField(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.real_size()) throw ShapeMismatch("real field size does not match grid");
  }

  template <class Fn>
  static RealField sample(const GridSpec& grid, Fn&& fn) {
    RealField out(grid);
    const int n = grid.n();
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) out.values_[iy * n + ix] = fn(grid.x(ix), grid.y(iy));
    return out;
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator()(int ix, int iy) const noexcept { return values_[iy * grid_.n() + ix]; }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  /// L2 norm by the rectangle rule, sqrt(sum v^2 h^2).
  double l2_norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s) * grid_.spacing();
  }
  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Fourier-series coefficients of a real field, half-plane storage.
/// Coefficients with kx < 0 are implied by Hermitian symmetry.
class SpectralField {
 public:
  explicit SpectralField(const GridSpec& grid) : grid_(grid), coeffs_(grid.spectral_size(), cplx{}) {}
  SpectralField(const GridSpec& grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.spectral_size()) throw ShapeMismatch("spectral field size does not match grid");
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const cplx> coeffs() const noexcept { return coeffs_; }
  std::span<cplx> coeffs() noexcept { return coeffs_; }
  const cplx& operator[](std::size_t s) const noexcept { return coeffs_[s]; }
  cplx& operator[](std::size_t s) noexcept { return coeffs_[s]; }

  std::size_t stored_index(int kx, int ky) const noexcept {
    return static_cast<std::size_t>(grid_.index(ky)) * grid_.half_cols() + static_cast<std::size_t>(kx);
  }

  /// Coefficient of an arbitrary signed mode, k in {-n/2+1, ..., n/2}.
  cplx at(int kx, int ky) const noexcept {
    if (kx < 0) return std::conj(coeffs_[stored_index(-kx, -ky)]);
    return coeffs_[stored_index(kx, ky)];
  }

  /// Sets a mode and, where its partner is stored explicitly, the conjugate partner.
  void set_mode(int kx, int ky, cplx value) noexcept {
    if (kx < 0) {
      kx = -kx;
      ky = -ky;
      value = std::conj(value);
    }
    coeffs_[stored_index(kx, ky)] = value;
    if (kx == 0 || kx == grid_.n() / 2) coeffs_[stored_index(kx, -ky)] = std::conj(value);
  }

  /// Sum over the full plane of |c_k|^2.
  double full_sum_squares() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) s += grid_.stored_weight(i) * std::norm(coeffs_[i]);
    return s;
  }
  /// Physical L2 norm via Parseval: L * sqrt(sum |c_k|^2).
  double l2_norm() const noexcept { return grid_.length() * std::sqrt(full_sum_squares()); }

  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Largest |c(k) - conj c(-k)| over the coefficients whose partner is
  /// stored explicitly (kx = 0 and kx = n/2 columns). Zero for a real field.
  double hermitian_defect() const noexcept {
    const int n = grid_.n();
    double d = 0.0;
    for (int kx : {0, n / 2})
      for (int iy = 0; iy < n; ++iy) {
        const int ky = grid_.mode(iy);
        const cplx a = coeffs_[stored_index(kx, ky)];
        const cplx b = coeffs_[stored_index(kx, -ky)];
        d = std::max(d, std::abs(a - std::conj(b)));
      }
    return d;
  }

  bool all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(double a) noexcept {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  GridSpec grid_;
  std::vector<cplx> coeffs_;
};

}  // namespace hughes
