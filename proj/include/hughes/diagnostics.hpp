#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hughes/dispersion.hpp"
#include "hughes/linear_solver.hpp"
#include "hughes/picard.hpp"

namespace hughes {

struct NormSeries {
  std::vector<double> times;
  std::vector<double> l2_psi, l2_grad_phi, linf_psi, linf_grad_phi, sigma_l2_hess_phi;

  std::size_t size() const noexcept { return times.size(); }
  void resize(std::size_t n) {
    for (auto* v : {&times, &l2_psi, &l2_grad_phi, &linf_psi, &linf_grad_phi, &sigma_l2_hess_phi}) v->resize(n);
  }
};

struct FieldNorms {
  double l2_psi, l2_grad_phi, linf_psi, linf_grad_phi, sigma_l2_hess_phi;
};

/// Norms of one snapshot; L2 by Parseval, Linf on the physical grid.
/// The gradient norms are of the vector field (Euclidean pointwise).
inline FieldNorms snapshot_norms(const SpectralField& psi_hat, const SpectralField& phi_hat, double sigma) {
  const GridSpec& g = psi_hat.grid();
  double grad2 = 0.0, hess2 = 0.0;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double k2 = norm2(g.stored_xi(s));
    const double w = g.stored_weight(s) * std::norm(phi_hat[s]);
    grad2 += w * k2;
    hess2 += w * k2 * k2;
  }
  const RealField gx = inverse_transform(ddx(phi_hat));
  const RealField gy = inverse_transform(ddy(phi_hat));
  double linf_grad = 0.0;
  for (std::size_t i = 0; i < gx.values().size(); ++i)
    linf_grad = std::max(linf_grad, std::hypot(gx.values()[i], gy.values()[i]));
  return {psi_hat.l2_norm(), g.length() * std::sqrt(grad2), inverse_transform(psi_hat).max_abs(), linf_grad,
          sigma * g.length() * std::sqrt(hess2)};
}

/// Works for LinearTrajectory and StateTrajectory.
template <class Trajectory>
NormSeries norm_series(const Trajectory& traj, const ModelParams& params) {
  NormSeries out;
  out.resize(traj.times.size());
  parallel_for(traj.times.size(), [&](std::size_t j) {
    const FieldNorms nrm = snapshot_norms(traj.psi_hat[j], traj.phi_hat[j], params.sigma());
    out.times[j] = traj.times[j];
    out.l2_psi[j] = nrm.l2_psi;
    out.l2_grad_phi[j] = nrm.l2_grad_phi;
    out.linf_psi[j] = nrm.linf_psi;
    out.linf_grad_phi[j] = nrm.linf_grad_phi;
    out.sigma_l2_hess_phi[j] = nrm.sigma_l2_hess_phi;
  });
  return out;
}

enum class DecayLaw { InverseLinear, InverseQuadratic };

inline DecayLaw parse_decay_law(const std::string& s) {
  if (s == "1/(1+t)") return DecayLaw::InverseLinear;
  if (s == "1/(1+t)^2") return DecayLaw::InverseQuadratic;
  throw InvalidParams("unknown decay law '" + s + "'");
}

inline std::string to_string(DecayLaw law) { return law == DecayLaw::InverseLinear ? "1/(1+t)" : "1/(1+t)^2"; }

inline double target_exponent(DecayLaw law) { return law == DecayLaw::InverseLinear ? -1.0 : -2.0; }

struct DecayFit {
  double t_lo = 0.0, t_hi = 0.0;
  double slope = 0.0;
  double prefactor = 0.0;
  /// slope - target exponent
  double exponent_deviation = 0.0;
  /// max over window samples of |value / (K (1+t)^slope) - 1|
  double max_relative_deviation = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit of log(value) = log K + slope log(1 + t) on [t_lo, t_hi].
inline DecayFit fit_decay(std::span<const double> times, std::span<const double> values, DecayLaw law, double t_lo,
                          double t_hi, double horizon) {
  if (times.size() != values.size()) throw ShapeMismatch("times and values differ in length");
  if (!(t_lo >= 1.0)) throw InvalidParams("fit window must start at t >= 1");
  if (!(t_hi <= 0.5 * horizon)) throw InvalidParams("fit window must end at t <= T/2");
  if (!(t_hi > t_lo)) throw InvalidParams("empty fit window");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0)) throw InvalidParams("series must be positive on the fit window");
    lx.push_back(std::log1p(times[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 8) throw WindowTooNarrow("fit window holds " + std::to_string(lx.size()) + " samples, need 8");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.samples = lx.size();
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  fit.prefactor = std::exp(intercept);
  fit.exponent_deviation = fit.slope - target_exponent(law);
  for (std::size_t i = 0; i < lx.size(); ++i)
    fit.max_relative_deviation =
        std::max(fit.max_relative_deviation, std::abs(std::expm1(ly[i] - intercept - fit.slope * lx[i])));
  return fit;
}

/// The 1/(1+t) law is fitted to l2_psi + l2_grad_phi, the 1/(1+t)^2 law to
/// linf_psi + linf_grad_phi.
inline DecayFit fit_decay(const NormSeries& series, DecayLaw law, double t_lo, double t_hi, double horizon) {
  std::vector<double> v(series.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = law == DecayLaw::InverseLinear ? series.l2_psi[i] + series.l2_grad_phi[i]
                                          : series.linf_psi[i] + series.linf_grad_phi[i];
  }
  return fit_decay(series.times, v, law, t_lo, t_hi, horizon);
}

/// Default window (2, min(50, T/2)).
inline std::array<double, 2> default_fit_window(double horizon) { return {2.0, std::min(50.0, 0.5 * horizon)}; }

enum class Regime { Subcritical, Critical, Supercritical };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical-decaying";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical-oscillatory";
  }
  return "";
}

struct StabilityEntry {
  double rho_bar = 0.0;
  /// min over sampled xi of Re(theta(xi)) / |xi|
  double gap = 0.0;
  Regime regime = Regime::Subcritical;
  /// largest (b/a)^2 with beta = 2 planar waves, absent when none exist
  std::optional<double> wave_threshold;
};

/// `count` unit vectors with angles evenly covering [0, pi], both axes included.
inline std::vector<Vec2> direction_samples(int count) {
  if (count < 2) throw InvalidParams("need at least 2 direction samples");
  std::vector<Vec2> out;
  for (int i = 0; i < count; ++i) {
    const double a = std::numbers::pi * i / (count - 1);
    out.push_back({std::cos(a), std::sin(a)});
  }
  out.front() = {1.0, 0.0};
  out.back() = {-1.0, 0.0};
  if ((count - 1) % 2 == 0) out[static_cast<std::size_t>((count - 1) / 2)] = {0.0, 1.0};
  return out;
}

inline std::vector<StabilityEntry> stability_map(std::span<const double> rho_grid, std::span<const Vec2> xi_samples,
                                                 const ModelParams& params_template) {
  std::vector<StabilityEntry> out(rho_grid.size());
  parallel_for(rho_grid.size(), [&](std::size_t i) {
    const ModelParams p = params_template.with_rho_bar(rho_grid[i]);
    StabilityEntry e;
    e.rho_bar = rho_grid[i];
    e.gap = std::numeric_limits<double>::infinity();
    for (const Vec2& xi : xi_samples) {
      const double k = norm(xi);
      if (k == 0.0) continue;
      e.gap = std::min(e.gap, theta(xi, p).real() / k);
    }
    const double margin = p.f() - p.rho_bar();
    const double eps = 1e-12 * p.rho_max();
    e.regime = margin > eps ? Regime::Subcritical : (margin < -eps ? Regime::Supercritical : Regime::Critical);
    const double thr = wave_threshold(p);
    if (thr >= -1e-12) e.wave_threshold = std::max(thr, 0.0);
    out[i] = e;
  });
  return out;
}

struct ViscositySweep {
  std::vector<double> sigmas;
  /// sup over stored nodes of L2+Linf of (psi_s - psi) plus L2+Linf of (grad phi_s - grad phi)
  std::vector<double> differences;
  std::vector<int> iterations;
};

inline double combined_difference(const SpectralField& psi_a, const SpectralField& phi_a, const SpectralField& psi_b,
                                  const SpectralField& phi_b) {
  const FieldNorms d = snapshot_norms(psi_a - psi_b, phi_a - phi_b, 0.0);
  return d.l2_psi + d.linf_psi + d.l2_grad_phi + d.linf_grad_phi;
}

/// Solves at sigma = 0 and at each sigma with identical data and nodes.
/// With linear_only the linear flow replaces the Picard solve.
inline ViscositySweep viscosity_sweep(const SpectralField& psi0, const SpectralField& phiT,
                                      std::span<const double> sigmas, const ModelParams& params,
                                      const PicardConfig& config, bool linear_only = false) {
  auto solve = [&](double sigma) {
    const ModelParams p = params.with_sigma(sigma);
    return linear_only ? linear_state(psi0, phiT, config, p) : picard_solve(psi0, phiT, config, p);
  };
  const StateTrajectory base = solve(0.0);
  ViscositySweep out;
  out.sigmas.assign(sigmas.begin(), sigmas.end());
  out.differences.assign(sigmas.size(), 0.0);
  out.iterations.assign(sigmas.size(), 0);
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (sigmas[i] == 0.0) continue;
    const StateTrajectory traj = solve(sigmas[i]);
    out.iterations[i] = static_cast<int>(traj.iteration_report.size());
    std::vector<double> per_node(traj.times.size());
    parallel_for(per_node.size(), [&](std::size_t j) {
      per_node[j] = combined_difference(traj.psi_hat[j], traj.phi_hat[j], base.psi_hat[j], base.phi_hat[j]);
    });
    out.differences[i] = *std::max_element(per_node.begin(), per_node.end());
  }
  return out;
}

/// Value at sigma = 0 of the quadratic through the three smallest-sigma points.
inline double extrapolate_to_zero(std::span<const double> sigmas, std::span<const double> values) {
  if (sigmas.size() != values.size() || sigmas.size() < 3) throw InvalidParams("need three (sigma, value) pairs");
  std::vector<std::size_t> idx(sigmas.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return sigmas[a] < sigmas[b]; });
  const double x0 = sigmas[idx[0]], x1 = sigmas[idx[1]], x2 = sigmas[idx[2]];
  const double y0 = values[idx[0]], y1 = values[idx[1]], y2 = values[idx[2]];
  return y0 * (x1 * x2) / ((x0 - x1) * (x0 - x2)) + y1 * (x0 * x2) / ((x1 - x0) * (x1 - x2)) +
         y2 * (x0 * x1) / ((x2 - x0) * (x2 - x1));
}

/// sup over modes of (1 + |xi|)^k |psi0^| + (1 + |xi|)^k |xi phiT^|.
inline double data_weight_norm(const SpectralField& psi0, const SpectralField& phiT, double k = 3.0) {
  const GridSpec& g = psi0.grid();
  double a = 0.0, b = 0.0;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double xi = norm(g.stored_xi(s));
    const double w = std::pow(1.0 + xi, k);
    a = std::max(a, w * std::abs(psi0[s]));
    b = std::max(b, w * xi * std::abs(phiT[s]));
  }
  return a + b;
}

/// Data weights required by the vanishing-viscosity comparison, in their
/// stricter form: sup (1+|xi|)^5 (1+sigma|xi|) |psi0^| + sup (1+|xi|)^7 |phiT^|.
inline double viscous_data_weight(const SpectralField& psi0, const SpectralField& phiT, double sigma) {
  const GridSpec& g = psi0.grid();
  double a = 0.0, b = 0.0;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double xi = norm(g.stored_xi(s));
    a = std::max(a, std::pow(1.0 + xi, 5) * (1.0 + sigma * xi) * std::abs(psi0[s]));
    b = std::max(b, std::pow(1.0 + xi, 7) * std::abs(phiT[s]));
  }
  return a + b;
}

}  // namespace hughes
