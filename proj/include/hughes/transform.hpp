#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "hughes/grid.hpp"

namespace hughes {

namespace detail {

// FFTW plans are created once per size and shared. Planning is serialized
// (the FFTW planner is not reentrant); execution goes through the new-array
// interface on caller-owned buffers, which FFTW permits concurrently.
// FFTW_ESTIMATE keeps the chosen algorithm, and thus the output bits,
// identical from run to run.
class PlanCache {
 public:
  enum class Kind { R2C, C2R };

  static fftw_plan get(int n, Kind kind) {
    static PlanCache cache;
    std::lock_guard lock(cache.mutex_);
    auto& slot = cache.plans_[{n, kind}];
    if (!slot) slot = std::make_unique<Plan>(n, kind);
    return slot->plan;
  }

 private:
  struct Plan {
    Plan(int n, Kind kind) {
      const std::size_t nreal = static_cast<std::size_t>(n) * n;
      const std::size_t ncplx = static_cast<std::size_t>(n) * (n / 2 + 1);
      double* r = fftw_alloc_real(nreal);
      fftw_complex* c = fftw_alloc_complex(ncplx);
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      plan = kind == Kind::R2C ? fftw_plan_dft_r2c_2d(n, n, r, c, flags)
                               : fftw_plan_dft_c2r_2d(n, n, c, r, flags);
      fftw_free(r);
      fftw_free(c);
    }
    ~Plan() { fftw_destroy_plan(plan); }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    fftw_plan plan{};
  };

  std::mutex mutex_;
  std::map<std::pair<int, Kind>, std::unique_ptr<Plan>> plans_;
};

/// Unnormalized real-to-complex transform of an m x m array.
inline void r2c(int m, const double* in, cplx* out) {
  fftw_execute_dft_r2c(PlanCache::get(m, PlanCache::Kind::R2C), const_cast<double*>(in),
                       reinterpret_cast<fftw_complex*>(out));
}

/// Unnormalized complex-to-real transform; `in` is overwritten.
inline void c2r(int m, cplx* in, double* out) {
  fftw_execute_dft_c2r(PlanCache::get(m, PlanCache::Kind::C2R), reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail

/// Forward transform, normalized so that coefficients are Fourier-series
/// coefficients: c_k = n^-2 sum_x v(x) exp(-i xi_k . x).
inline SpectralField forward_transform(const RealField& field) {
  const GridSpec& g = field.grid();
  std::vector<cplx> out(g.spectral_size());
  detail::r2c(g.n(), field.values().data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.real_size());
  for (auto& c : out) c *= scale;
  return SpectralField(g, std::move(out));
}

inline SpectralField forward_transform(const RealField& field, const GridSpec& target) {
  require_same_grid(field.grid(), target);
  return forward_transform(field);
}

/// Inverse transform, v(x) = sum_k c_k exp(i xi_k . x), no scaling.
inline RealField inverse_transform(const SpectralField& field) {
  const GridSpec& g = field.grid();
  std::vector<cplx> scratch(field.coeffs().begin(), field.coeffs().end());
  std::vector<double> out(g.real_size());
  detail::c2r(g.n(), scratch.data(), out.data());
  return RealField(g, std::move(out));
}

inline RealField inverse_transform(const SpectralField& field, const GridSpec& target) {
  require_same_grid(field.grid(), target);
  return inverse_transform(field);
}

}  // namespace hughes
