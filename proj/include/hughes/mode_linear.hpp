#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "hughes/errors.hpp"
#include "hughes/grid.hpp"
#include "hughes/model.hpp"

namespace hughes {

/// 2 x 2 complex matrix, row-major entries.
struct Mat2 {
  cplx a11, a12, a21, a22;

  cplx trace() const noexcept { return a11 + a22; }
  cplx det() const noexcept { return a11 * a22 - a12 * a21; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) noexcept {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) noexcept {
    return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
  }
  /// Frobenius norm.
  double norm() const noexcept {
    return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22));
  }
};

/// Per-mode generator of the linearized dynamics, d/dt (psi, phi)^ = A (psi, phi)^.
using ModeMatrix = Mat2;

inline double norm2(const Vec2& xi) noexcept { return xi[0] * xi[0] + xi[1] * xi[1]; }
inline double norm(const Vec2& xi) noexcept { return std::sqrt(norm2(xi)); }

/// A(xi) for sigma = 0, A_sigma(xi) otherwise:
///   [ i(f - 2 rho) xi1 - sigma |xi|^2    -rho f^2 |xi|^2         ]
///   [ -1/f                               i f xi1 + sigma |xi|^2  ]
inline ModeMatrix assemble_A(const Vec2& xi, const ModelParams& params) {
  const double f = params.f();
  const double r = params.rho_bar();
  const double s = params.sigma();
  const double k2 = norm2(xi);
  return {cplx(-s * k2, (f - 2.0 * r) * xi[0]), cplx(-r * f * f * k2, 0.0), cplx(-1.0 / f, 0.0),
          cplx(s * k2, f * xi[0])};
}

/// theta(xi) = 2 sqrt(rho (f - rho) xi1^2 + rho f xi2^2) for sigma = 0 and
/// theta_sigma(xi) = 2 sqrt(f rho |xi|^2 - (rho xi1 - i sigma |xi|^2)^2) otherwise,
/// principal branch in both cases (imaginary when the radicand is negative).
inline cplx theta(const Vec2& xi, const ModelParams& params) {
  const double f = params.f();
  const double r = params.rho_bar();
  const double s = params.sigma();
  const double k2 = norm2(xi);
  const double re = r * (f - r) * xi[0] * xi[0] + r * f * xi[1] * xi[1] + s * s * k2 * k2;
  const double im = 2.0 * s * r * xi[0] * k2;
  return 2.0 * std::sqrt(cplx(re, im));
}

/// Diagonalization A = P diag(lambda1, lambda2) P^-1 of one Fourier mode.
/// lambda1 is the root with real part -Re(theta)/2 (forward-decaying).
struct EigenSystem {
  Vec2 xi;
  cplx theta;
  cplx lambda1, lambda2;
  Mat2 P, Pinv;
};

inline EigenSystem eigensystem(const Vec2& xi, const ModelParams& params) {
  if (xi[0] == 0.0 && xi[1] == 0.0) throw DegenerateMode("eigensystem requires xi != 0");
  const double f = params.f();
  const double r = params.rho_bar();
  const double k2s = params.sigma() * norm2(xi);
  const cplx th = theta(xi, params);
  if (std::abs(th) < 1e-14) {
    throw DegenerateMode("theta vanishes at xi = (" + std::to_string(xi[0]) + ", " + std::to_string(xi[1]) + ")");
  }
  const cplx drift(0.0, (f - r) * xi[0]);
  const cplx shift(k2s, r * xi[0]);  // i rho xi1 + sigma |xi|^2
  EigenSystem es;
  es.xi = xi;
  es.theta = th;
  es.lambda1 = -0.5 * th + drift;
  es.lambda2 = 0.5 * th + drift;
  es.P = {f * (0.5 * th + shift), f * (-0.5 * th + shift), cplx(1.0), cplx(1.0)};
  const cplx inv_ft = 1.0 / (f * th);
  es.Pinv = {inv_ft, (0.5 * th - shift) / th, -inv_ft, (0.5 * th + shift) / th};
  return es;
}

/// Forward-decaying and backward-decaying coordinates at t = 0 and t = T.
struct CompatibilityData {
  cplx u0;
  cplx vT;
  cplx detD;
};

/// Boundary system in diagonal coordinates
///   [ P11              P12 exp(-lambda2 T) ] [u0]   [ rhs_psi0 ]
///   [ exp(lambda1 T)   1                   ] [vT] = [ rhs_phiT ]
/// so that psi^(0) = P11 u0 + P12 v(0) and phi^(T) = u(T) + vT. Only
/// decaying exponentials appear. The determinant equals
/// f (theta/2 (1 + e) + (i rho xi1 + sigma |xi|^2)(1 - e)), e = exp(-theta T).
inline CompatibilityData solve_boundary(const EigenSystem& es, cplx rhs_psi0, cplx rhs_phiT, double horizon) {
  const cplx e1 = std::exp(es.lambda1 * horizon);
  const cplx e2 = std::exp(-es.lambda2 * horizon);
  const cplx det = es.P.a11 - es.P.a12 * e1 * e2;
  const double scale = std::abs(es.theta) + norm(es.xi);
  if (!(std::abs(det) >= 1e-13 * scale)) {
    throw ResonantMode("compatibility determinant vanishes at xi = (" + std::to_string(es.xi[0]) + ", " +
                       std::to_string(es.xi[1]) + ")");
  }
  CompatibilityData out;
  out.u0 = (rhs_psi0 - es.P.a12 * e2 * rhs_phiT) / det;
  out.vT = (es.P.a11 * rhs_phiT - e1 * rhs_psi0) / det;
  out.detD = det;
  return out;
}

inline CompatibilityData compatibility_solve(cplx psi0_hat, cplx phiT_hat, const Vec2& xi, const ModelParams& params) {
  return solve_boundary(eigensystem(xi, params), psi0_hat, phiT_hat, params.horizon());
}

/// (psi^, phi^) of a mode at time t from its diagonal boundary coordinates.
inline std::array<cplx, 2> mode_state(const EigenSystem& es, const CompatibilityData& cd, double t, double horizon) {
  const cplx u = std::exp(es.lambda1 * t) * cd.u0;
  const cplx v = std::exp(-es.lambda2 * (horizon - t)) * cd.vT;
  return {es.P.a11 * u + es.P.a12 * v, u + v};
}

/// Exact solution at xi = 0, where the system decouples:
/// psi^ is constant and phi^ is driven backward from its terminal value.
inline std::array<cplx, 2> zero_mode_solution(cplx psi0_at_0, cplx phiT_at_0, double t, const ModelParams& params) {
  return {psi0_at_0, phiT_at_0 + (params.horizon() - t) * psi0_at_0 / params.f()};
}

}  // namespace hughes
