#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "hughes/linear_solver.hpp"
#include "hughes/nonlinear.hpp"

namespace hughes {

/// How the per-mode boundary coordinates are fixed during the iteration.
///  exact: re-solved every sweep with the nonlinear integrals included, so
///         psi(0) = psi0 and phi(T) = phiT hold for every iterate.
///  paper: frozen at the linear compatibility values; boundary data is then
///         only attained up to the size of the nonlinear correction.
enum class BoundaryMode { Exact, Paper };

struct PicardConfig {
  int time_nodes = 128;
  double tol = 1e-10;
  int max_iter = 50;
  double norm_order = 3.0;
  double norm_c = 0.0;
  BoundaryMode boundary_mode = BoundaryMode::Exact;
  /// Re-solve on 2M - 1 nodes and compare (QuadratureUnderResolved on failure).
  bool diagnose_quadrature = false;
  double quadrature_tol = 1e-6;

  /// M = max(128, ceil(16 T)), k = 3, c = sqrt(rho (f - rho)) / 2.
  static PicardConfig defaults(const ModelParams& params) {
    PicardConfig cfg;
    cfg.time_nodes = std::max(128, static_cast<int>(std::ceil(16.0 * params.horizon())));
    cfg.norm_c = params.subcritical() ? 0.5 * params.gap_constant() : 0.05;
    return cfg;
  }

  void validate() const {
    if (time_nodes < 16) throw InvalidParams("picard.time_nodes must be >= 16");
    if (!(tol > 0.0)) throw InvalidParams("picard.tol must be positive");
    if (max_iter < 1) throw InvalidParams("picard.max_iter must be >= 1");
    if (!(norm_order > 2.0)) throw InvalidParams("norm order k must exceed 2");
    if (!(norm_c > 0.0)) throw InvalidParams("norm constant c must be positive");
  }
};

/// Solution of the perturbation system on the uniform node grid of a
/// PicardConfig. iteration_report[i] is the relative weighted-norm distance
/// between iterates i and i+1 (iterate 0 being the linear solution).
struct StateTrajectory {
  std::vector<double> times;
  std::vector<SpectralField> psi_hat, phi_hat;
  std::vector<double> iteration_report;
  bool converged = false;
};

inline std::vector<double> uniform_nodes(int count, double horizon) {
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) t[static_cast<std::size_t>(j)] = horizon * j / (count - 1);
  t.back() = horizon;
  return t;
}

/// Weight (1 + |xi|)^k / (exp(-c|xi| t) + exp(-c|xi| (T - t))), evaluated
/// without forming underflowing exponentials.
inline double norm_weight(double xi_abs, double t, double k, double c, double horizon) {
  const double near = std::min(t, horizon - t);
  const double far = std::abs(horizon - 2.0 * t);
  return std::exp(k * std::log1p(xi_abs) + c * xi_abs * near) / (1.0 + std::exp(-c * xi_abs * far));
}

/// max over stored times and modes of (1 + |xi|)^k |f^(xi, t)| / (e^{-c|xi|t} + e^{-c|xi|(T-t)}).
inline double weighted_norm(std::span<const SpectralField> field, std::span<const double> times, double k, double c,
                            double horizon) {
  if (!(k > 2.0)) throw InvalidParams("norm order k must exceed 2");
  if (!(c > 0.0)) throw InvalidParams("norm constant c must be positive");
  if (field.size() != times.size()) throw ShapeMismatch("field and time counts differ");
  double out = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    const GridSpec& g = field[j].grid();
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
      const double a = std::abs(field[j][s]);
      if (a == 0.0) continue;
      out = std::max(out, a * norm_weight(norm(g.stored_xi(s)), times[j], k, c, horizon));
    }
  }
  return out;
}

/// Same norm applied to grad phi^ = i xi phi^.
inline double weighted_gradient_norm(std::span<const SpectralField> field, std::span<const double> times, double k,
                                     double c, double horizon) {
  std::vector<SpectralField> grad;
  grad.reserve(field.size());
  for (const auto& f : field) grad.push_back(apply_symbol(f, [](const Vec2& xi) { return cplx(norm(xi), 0.0); }));
  return weighted_norm(grad, times, k, c, horizon);
}

namespace detail {

/// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, by series near 0.
inline std::array<cplx, 2> phi_functions(cplx z) {
  if (std::abs(z) < 1.0) {
    cplx p1(0.0), p2(0.0), term(1.0);  // term = z^k / (k+1)!
    double denom2 = 2.0;                // (k+2)! / (k+1)! = k + 2
    for (int kk = 0; kk < 24; ++kk) {
      p1 += term;
      p2 += term / denom2;
      term *= z / static_cast<double>(kk + 2);
      denom2 = static_cast<double>(kk + 3);
    }
    return {p1, p2};
  }
  const cplx ez = std::exp(z);
  return {(ez - 1.0) / z, (ez - 1.0 - z) / (z * z)};
}

/// Exact integral of exp(lambda (h - s)) against the linear interpolant of
/// (g_left, g_right) over [0, h]: returns {weight_left, weight_right}.
inline std::array<cplx, 2> exponential_trapezoid(cplx lambda, double h) {
  const auto [p1, p2] = phi_functions(lambda * h);
  return {h * (p1 - p2), h * p2};
}

struct ModeData {
  bool zero = false;
  EigenSystem es{};
  cplx fwd_decay, fwd_left, fwd_right;  // forward recurrence over one step
  cplx bwd_decay, bwd_near, bwd_far;    // backward recurrence over one step
  CompatibilityData linear{};
};

/// Per-mode state of a Picard solve: eigen-decompositions, exponential
/// integrator weights and linear boundary coordinates, all fixed by
/// (data, nodes, params).
class DuhamelOperator {
 public:
  DuhamelOperator(const SpectralField& psi0, const SpectralField& phiT, const PicardConfig& config,
                  const ModelParams& params)
      : grid_(psi0.grid()),
        psi0_(psi0),
        phiT_(phiT),
        config_(config),
        params_(params),
        times_(uniform_nodes(config.time_nodes, params.horizon())) {
    require_same_grid(psi0.grid(), phiT.grid());
    require_hermitian(psi0, "psi0");
    require_hermitian(phiT, "phiT");
    config.validate();
    const double h = times_[1] - times_[0];
    const double T = params.horizon();
    modes_.resize(grid_.spectral_size());
    const std::size_t count = modes_.size();
    const std::size_t blocks = (count + kModeBlock - 1) / kModeBlock;
    parallel_for(blocks, [&](std::size_t b) {
      const std::size_t end = std::min(count, (b + 1) * kModeBlock);
      for (std::size_t s = b * kModeBlock; s < end; ++s) {
        ModeData& m = modes_[s];
        const Vec2 xi = grid_.stored_xi(s);
        if (is_zero_xi(xi)) {
          m.zero = true;
          continue;
        }
        m.es = eigensystem(xi, params);
        m.fwd_decay = std::exp(m.es.lambda1 * h);
        const auto fw = exponential_trapezoid(m.es.lambda1, h);
        m.fwd_left = fw[0];
        m.fwd_right = fw[1];
        m.bwd_decay = std::exp(-m.es.lambda2 * h);
        const auto bw = exponential_trapezoid(-m.es.lambda2, h);
        m.bwd_near = bw[1];
        m.bwd_far = bw[0];
        m.linear = solve_boundary(m.es, psi0_[s], phiT_[s], T);
      }
    });
  }

  const std::vector<double>& times() const noexcept { return times_; }
  const GridSpec& grid() const noexcept { return grid_; }

  /// Linear solution on the nodes (the iteration's starting point).
  StateTrajectory linear_trajectory() const {
    StateTrajectory out;
    out.times = times_;
    out.psi_hat.assign(times_.size(), SpectralField(grid_));
    out.phi_hat.assign(times_.size(), SpectralField(grid_));
    apply(nullptr, out);
    return out;
  }

  /// Nonlinear sources at every node of `state`.
  std::vector<NonlinearTerms> sources(const StateTrajectory& state) const {
    std::vector<NonlinearTerms> out(state.times.size(), NonlinearTerms{SpectralField(grid_), SpectralField(grid_)});
    parallel_for(state.times.size(),
                 [&](std::size_t j) { out[j] = nonlinear_terms(state.psi_hat[j], state.phi_hat[j], params_); });
    return out;
  }

  struct Distance {
    double diff = 0.0;
    double size = 0.0;
    double relative() const { return size > 0.0 ? diff / size : diff; }
  };

  /// Overwrites `state` with the Duhamel image of `sources` (linear flow when
  /// null) and returns the weighted-norm distance to the previous contents.
  Distance apply(const std::vector<NonlinearTerms>* sources, StateTrajectory& state) const {
    const std::size_t nt = times_.size();
    const std::size_t count = modes_.size();
    const std::size_t blocks = (count + kModeBlock - 1) / kModeBlock;
    std::vector<std::array<double, 4>> block_norms(blocks, {0.0, 0.0, 0.0, 0.0});
    parallel_for(blocks, [&](std::size_t b) {
      std::vector<cplx> fwd(nt), bwd(nt), g1(nt), g2(nt);
      auto& acc = block_norms[b];
      const std::size_t end = std::min(count, (b + 1) * kModeBlock);
      for (std::size_t s = b * kModeBlock; s < end; ++s) {
        const double xi_abs = norm(grid_.stored_xi(s));
        auto store = [&](std::size_t j, cplx psi, cplx phi) {
          const double w = norm_weight(xi_abs, times_[j], config_.norm_order, config_.norm_c, params_.horizon());
          cplx& psi_ref = state.psi_hat[j][s];
          cplx& phi_ref = state.phi_hat[j][s];
          acc[0] = std::max(acc[0], w * std::abs(psi - psi_ref));
          acc[1] = std::max(acc[1], w * xi_abs * std::abs(phi - phi_ref));
          acc[2] = std::max(acc[2], w * std::abs(psi));
          acc[3] = std::max(acc[3], w * xi_abs * std::abs(phi));
          psi_ref = psi;
          phi_ref = phi;
        };
        if (modes_[s].zero) {
          apply_zero_mode(s, sources, fwd, bwd, store);
          continue;
        }
        const ModeData& m = modes_[s];
        if (sources) {
          for (std::size_t j = 0; j < nt; ++j) {
            const cplx n1 = (*sources)[j].nl1_hat[s];
            const cplx n2 = (*sources)[j].nl2_hat[s];
            g1[j] = m.es.Pinv.a11 * n1 + m.es.Pinv.a12 * n2;
            g2[j] = m.es.Pinv.a21 * n1 + m.es.Pinv.a22 * n2;
          }
          fwd[0] = 0.0;
          for (std::size_t j = 1; j < nt; ++j)
            fwd[j] = m.fwd_decay * fwd[j - 1] + m.fwd_left * g1[j - 1] + m.fwd_right * g1[j];
          bwd[nt - 1] = 0.0;
          for (std::size_t j = nt - 1; j-- > 0;)
            bwd[j] = m.bwd_decay * bwd[j + 1] + m.bwd_near * g2[j] + m.bwd_far * g2[j + 1];
        } else {
          std::fill(fwd.begin(), fwd.end(), cplx{});
          std::fill(bwd.begin(), bwd.end(), cplx{});
        }
        CompatibilityData cd = m.linear;
        if (sources && config_.boundary_mode == BoundaryMode::Exact) {
          cd = solve_boundary(m.es, psi0_[s] + m.es.P.a12 * bwd[0], phiT_[s] - fwd[nt - 1], params_.horizon());
        }
        const double T = params_.horizon();
        for (std::size_t j = 0; j < nt; ++j) {
          const double t = times_[j];
          const cplx u = std::exp(m.es.lambda1 * t) * cd.u0 + fwd[j];
          const cplx v = std::exp(-m.es.lambda2 * (T - t)) * cd.vT - bwd[j];
          store(j, m.es.P.a11 * u + m.es.P.a12 * v, u + v);
        }
      }
    });
    Distance d;
    double dpsi = 0.0, dphi = 0.0, npsi = 0.0, nphi = 0.0;
    for (const auto& a : block_norms) {
      dpsi = std::max(dpsi, a[0]);
      dphi = std::max(dphi, a[1]);
      npsi = std::max(npsi, a[2]);
      nphi = std::max(nphi, a[3]);
    }
    d.diff = dpsi + dphi;
    d.size = npsi + nphi;
    return d;
  }

 private:
  // xi = 0: d_t psi = NL1, d_t phi = -psi / f + NL2, integrated by the
  // trapezoid rule (exact for the piecewise-linear sources).
  template <class Store>
  void apply_zero_mode(std::size_t s, const std::vector<NonlinearTerms>* sources, std::vector<cplx>& psi,
                       std::vector<cplx>& phi, Store&& store) const {
    const std::size_t nt = times_.size();
    const double h = times_[1] - times_[0];
    const double f = params_.f();
    auto nl = [&](std::size_t j, int which) -> cplx {
      if (!sources) return 0.0;
      return which == 1 ? (*sources)[j].nl1_hat[s] : (*sources)[j].nl2_hat[s];
    };
    psi[0] = psi0_[s];
    for (std::size_t j = 1; j < nt; ++j) psi[j] = psi[j - 1] + 0.5 * h * (nl(j - 1, 1) + nl(j, 1));
    phi[nt - 1] = phiT_[s];
    for (std::size_t j = nt - 1; j-- > 0;) {
      const cplx rhs_j = psi[j] / f - nl(j, 2);
      const cplx rhs_k = psi[j + 1] / f - nl(j + 1, 2);
      phi[j] = phi[j + 1] + 0.5 * h * (rhs_j + rhs_k);
    }
    for (std::size_t j = 0; j < nt; ++j) store(j, psi[j], phi[j]);
  }

  GridSpec grid_;
  SpectralField psi0_, phiT_;
  PicardConfig config_;
  ModelParams params_;
  std::vector<double> times_;
  std::vector<ModeData> modes_;
};

}  // namespace detail

/// One Duhamel sweep: sources from `current`, exponential-integrator
/// integrals, boundary re-solve. Returns the new trajectory; its
/// iteration_report gains the distance to `current`.
inline StateTrajectory duhamel_step(const StateTrajectory& current, const SpectralField& psi0,
                                    const SpectralField& phiT, const PicardConfig& config,
                                    const ModelParams& params) {
  const detail::DuhamelOperator op(psi0, phiT, config, params);
  if (current.times.size() != op.times().size()) throw ShapeMismatch("trajectory is not on the configured nodes");
  const auto src = op.sources(current);
  StateTrajectory next = current;
  const auto d = op.apply(&src, next);
  next.iteration_report.push_back(d.relative());
  return next;
}

/// Linear solution on the configured nodes, as a StateTrajectory.
inline StateTrajectory linear_state(const SpectralField& psi0, const SpectralField& phiT, const PicardConfig& config,
                                    const ModelParams& params) {
  return detail::DuhamelOperator(psi0, phiT, config, params).linear_trajectory();
}

namespace detail {

inline StateTrajectory picard_iterate(const SpectralField& psi0, const SpectralField& phiT, const PicardConfig& config,
                                      const ModelParams& params) {
  const DuhamelOperator op(psi0, phiT, config, params);
  StateTrajectory state = op.linear_trajectory();
  auto& report = state.iteration_report;
  for (int it = 1; it <= config.max_iter; ++it) {
    const auto src = op.sources(state);
    const double d = op.apply(&src, state).relative();
    report.push_back(d);
    const std::size_t k = report.size();
    auto history = [&] {
      std::ostringstream os;
      os.precision(3);
      for (double r : report) os << ' ' << r;
      return os.str();
    };
    if (!std::isfinite(d)) throw NoContraction("iterates diverged (distances:" + history() + ")");
    if (d < config.tol) {
      state.converged = true;
      return state;
    }
    if (k >= 3 && report[k - 1] >= report[k - 2] && report[k - 2] >= report[k - 3]) {
      throw NoContraction("distances stopped decreasing (distances:" + history() + ")");
    }
  }
  std::ostringstream os;
  os.precision(3);
  os << "no convergence to " << config.tol << " within " << config.max_iter << " iterations (last distance "
     << report.back() << ")";
  throw NoContraction(os.str());
}

}  // namespace detail

/// Fixed point of the Duhamel map started from the linear solution.
/// Throws NoContraction when distances diverge, stop decreasing for two
/// consecutive sweeps, or max_iter is exhausted.
inline StateTrajectory picard_solve(const SpectralField& psi0, const SpectralField& phiT, const PicardConfig& config,
                                    const ModelParams& params) {
  StateTrajectory out = detail::picard_iterate(psi0, phiT, config, params);
  if (config.diagnose_quadrature) {
    PicardConfig fine = config;
    fine.time_nodes = 2 * config.time_nodes - 1;
    fine.diagnose_quadrature = false;
    const StateTrajectory ref = detail::picard_iterate(psi0, phiT, fine, params);
    std::vector<SpectralField> diff;
    std::vector<SpectralField> coarse;
    for (std::size_t j = 0; j < out.times.size(); ++j) {
      diff.push_back(ref.psi_hat[2 * j] - out.psi_hat[j]);
      coarse.push_back(out.psi_hat[j]);
    }
    const double k = config.norm_order, c = config.norm_c, T = params.horizon();
    const double scale = weighted_norm(coarse, out.times, k, c, T);
    const double change = weighted_norm(diff, out.times, k, c, T);
    if (change > config.quadrature_tol * std::max(scale, std::numeric_limits<double>::min())) {
      std::ostringstream os;
      os << "doubling the time nodes changes psi by " << change / scale << " (relative)";
      throw QuadratureUnderResolved(os.str());
    }
  }
  return out;
}

/// Spectral residual of the perturbation system at interior nodes, with
/// fourth-order central differences in time.
struct ResidualReport {
  std::vector<double> times;
  std::vector<double> relative;
  double max_relative = 0.0;
};

inline ResidualReport pde_residual(const StateTrajectory& traj, const ModelParams& params) {
  ResidualReport out;
  const std::size_t nt = traj.times.size();
  if (nt < 5) return out;
  const double h = traj.times[1] - traj.times[0];
  const GridSpec& g = traj.psi_hat.front().grid();
  for (std::size_t j = 2; j + 2 < nt; ++j) {
    const auto nl = nonlinear_terms(traj.psi_hat[j], traj.phi_hat[j], params);
    double r1 = 0.0, r2 = 0.0, d1 = 0.0, d2 = 0.0;
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
      auto dt = [&](const std::vector<SpectralField>& x) {
        return (-x[j + 2][s] + 8.0 * x[j + 1][s] - 8.0 * x[j - 1][s] + x[j - 2][s]) / (12.0 * h);
      };
      const cplx dpsi = dt(traj.psi_hat);
      const cplx dphi = dt(traj.phi_hat);
      const ModeMatrix A = assemble_A(g.stored_xi(s), params);
      const cplx psi = traj.psi_hat[j][s];
      const cplx phi = traj.phi_hat[j][s];
      const double w = g.stored_weight(s);
      r1 += w * std::norm(dpsi - (A.a11 * psi + A.a12 * phi + nl.nl1_hat[s]));
      r2 += w * std::norm(dphi - (A.a21 * psi + A.a22 * phi + nl.nl2_hat[s]));
      d1 += w * std::norm(dpsi);
      d2 += w * std::norm(dphi);
    }
    auto rel = [](double r, double d) { return d > 0.0 ? std::sqrt(r / d) : std::sqrt(r); };
    const double value = std::max(rel(r1, d1), rel(r2, d2));
    out.times.push_back(traj.times[j]);
    out.relative.push_back(value);
    out.max_relative = std::max(out.max_relative, value);
  }
  return out;
}

}  // namespace hughes
