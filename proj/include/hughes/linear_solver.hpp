#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "hughes/mode_linear.hpp"
#include "hughes/parallel.hpp"

namespace hughes {

/// Exact solution of the linearized forward-backward problem sampled at
/// `times`. u_hat/v_hat hold the diagonal coordinates P^-1 (psi^, phi^);
/// they are zero on modes whose derivative wavenumber vanishes.
struct LinearTrajectory {
  std::vector<double> times;
  std::vector<SpectralField> psi_hat, phi_hat, u_hat, v_hat;
};

namespace detail {

inline void require_hermitian(const SpectralField& f, const char* name) {
  const double tol = 1e-12 * std::max(1.0, f.max_abs());
  if (f.hermitian_defect() > tol) throw DataError(std::string(name) + " is not Hermitian-symmetric");
}

inline void require_times(std::span<const double> times, double horizon) {
  for (double t : times)
    if (!(t >= 0.0 && t <= horizon)) throw InvalidParams("sample time outside [0, T]");
}

constexpr std::size_t kModeBlock = 512;

inline bool is_zero_xi(const Vec2& xi) noexcept { return xi[0] == 0.0 && xi[1] == 0.0; }

}  // namespace detail

inline LinearTrajectory linear_solve(const SpectralField& psi0, const SpectralField& phiT, std::span<const double> times,
                                     const ModelParams& params, bool store_diagonal = true) {
  const GridSpec& g = psi0.grid();
  require_same_grid(g, phiT.grid());
  detail::require_hermitian(psi0, "psi0");
  detail::require_hermitian(phiT, "phiT");
  const double T = params.horizon();
  detail::require_times(times, T);

  LinearTrajectory out;
  out.times.assign(times.begin(), times.end());
  const std::size_t nt = times.size();
  out.psi_hat.assign(nt, SpectralField(g));
  out.phi_hat.assign(nt, SpectralField(g));
  if (store_diagonal) {
    out.u_hat.assign(nt, SpectralField(g));
    out.v_hat.assign(nt, SpectralField(g));
  }

  const std::size_t modes = g.spectral_size();
  const std::size_t blocks = (modes + detail::kModeBlock - 1) / detail::kModeBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(modes, (b + 1) * detail::kModeBlock);
    for (std::size_t s = b * detail::kModeBlock; s < end; ++s) {
      const Vec2 xi = g.stored_xi(s);
      if (detail::is_zero_xi(xi)) {
        for (std::size_t j = 0; j < nt; ++j) {
          const auto [p, q] = zero_mode_solution(psi0[s], phiT[s], times[j], params);
          out.psi_hat[j][s] = p;
          out.phi_hat[j][s] = q;
        }
        continue;
      }
      const EigenSystem es = eigensystem(xi, params);
      const CompatibilityData cd = solve_boundary(es, psi0[s], phiT[s], T);
      for (std::size_t j = 0; j < nt; ++j) {
        const double t = times[j];
        const cplx u = std::exp(es.lambda1 * t) * cd.u0;
        const cplx v = std::exp(-es.lambda2 * (T - t)) * cd.vT;
        out.psi_hat[j][s] = es.P.a11 * u + es.P.a12 * v;
        out.phi_hat[j][s] = u + v;
        if (store_diagonal) {
          out.u_hat[j][s] = u;
          out.v_hat[j][s] = v;
        }
      }
    }
  });
  return out;
}

}  // namespace hughes
