#pragma once

#include <array>
#include <cmath>
#include <string>

#include "hughes/errors.hpp"

namespace hughes {

using Vec2 = std::array<double, 2>;

/// Physical constants of the generalized Hughes model around the constant
/// state rho_bar. Instances only exist in a validated state.
class ModelParams {
 public:
  static ModelParams validate(double rho_max, double rho_bar, double sigma, double horizon) {
    if (!std::isfinite(rho_max) || !std::isfinite(rho_bar) || !std::isfinite(sigma) ||
        !std::isfinite(horizon)) {
      throw InvalidParams("parameters must be finite");
    }
    if (!(rho_max > 0.0)) throw InvalidParams("rho_max must be positive");
    if (!(rho_bar > 0.0 && rho_bar < rho_max)) {
      throw InvalidParams("rho_bar must lie in (0, rho_max), got " + std::to_string(rho_bar));
    }
    if (sigma < 0.0) throw InvalidParams("sigma must be nonnegative");
    if (!(horizon > 0.0)) throw InvalidParams("horizon must be positive");
    return ModelParams(rho_max, rho_bar, sigma, horizon);
  }

  double rho_max() const noexcept { return rho_max_; }
  double rho_bar() const noexcept { return rho_bar_; }
  double sigma() const noexcept { return sigma_; }
  double horizon() const noexcept { return horizon_; }

  /// Saturation f(rho) = rho_max - rho.
  double saturation(double rho) const noexcept { return rho_max_ - rho; }
  /// f(rho_bar), written f throughout the solver code.
  double f() const noexcept { return rho_max_ - rho_bar_; }
  /// rho_bar < rho_max / 2, equivalently f(rho_bar) - rho_bar > 0.
  bool subcritical() const noexcept { return f() - rho_bar_ > 0.0; }

  /// Provable spectral-gap constant sqrt(rho_bar (f - rho_bar)); zero when not subcritical.
  double gap_constant() const noexcept {
    return subcritical() ? std::sqrt(rho_bar_ * (f() - rho_bar_)) : 0.0;
  }

  ModelParams with_sigma(double sigma) const { return validate(rho_max_, rho_bar_, sigma, horizon_); }
  ModelParams with_rho_bar(double rho_bar) const {
    return validate(rho_max_, rho_bar, sigma_, horizon_);
  }
  ModelParams with_horizon(double horizon) const {
    return validate(rho_max_, rho_bar_, sigma_, horizon);
  }

 private:
  ModelParams(double rho_max, double rho_bar, double sigma, double horizon)
      : rho_max_(rho_max), rho_bar_(rho_bar), sigma_(sigma), horizon_(horizon) {}

  double rho_max_;
  double rho_bar_;
  double sigma_;
  double horizon_;
};

inline ModelParams validate_params(double rho_max, double rho_bar, double sigma, double horizon) {
  return ModelParams::validate(rho_max, rho_bar, sigma, horizon);
}

namespace detail {
inline double saturation_checked(double rho, double beta, const ModelParams& params) {
  if (!(beta >= 0.0 && beta <= 2.0)) throw InvalidParams("beta must lie in [0, 2]");
  const double f = params.saturation(rho);
  if (!(f > 0.0)) throw InvalidParams("hamiltonian requires rho < rho_max");
  return f;
}
}  // namespace detail

/// H(rho, p) = 1/2 f^beta(rho) |p|^2 - 1/2 f^(2 - beta)(rho).
inline double hamiltonian(double rho, const Vec2& p, double beta, const ModelParams& params) {
  const double f = detail::saturation_checked(rho, beta, params);
  const double p2 = p[0] * p[0] + p[1] * p[1];
  return 0.5 * std::pow(f, beta) * p2 - 0.5 * std::pow(f, 2.0 - beta);
}

/// Gradient of `hamiltonian` in p: f^beta(rho) p.
inline Vec2 hamiltonian_dp(double rho, const Vec2& p, double beta, const ModelParams& params) {
  const double w = std::pow(detail::saturation_checked(rho, beta, params), beta);
  return {w * p[0], w * p[1]};
}

struct StationaryState {
  double rho_bar;
  Vec2 grad_phi_bar;
};

/// Constant flow rho = rho_bar, phi = x / f(rho_bar). Independent of sigma.
inline StationaryState stationary_solution(const ModelParams& params) {
  return {params.rho_bar(), {1.0 / params.f(), 0.0}};
}

}  // namespace hughes
