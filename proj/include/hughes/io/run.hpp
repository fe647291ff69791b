#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hughes/diagnostics.hpp"
#include "hughes/io/config.hpp"
#include "hughes/io/initial_data.hpp"
#include "hughes/io/output.hpp"

namespace hughes::io {

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"params-check", "stability-map", "linear",        "nonlinear",
                                              "dispersion",   "viscosity-sweep", "decay-fit"};
  return names;
}

struct RunOptions {
  std::optional<std::string> output_dir;
  bool dump_fields = false;
  bool verbose = false;
  int threads = 0;
  std::optional<double> rho_bar, a, b;
  std::optional<int> beta;
};

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitSolver = 3, kExitIo = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::DataError:
    case ErrorKind::InvalidParams: return kExitConfig;
    case ErrorKind::IoError: return kExitIo;
    default: return kExitSolver;
  }
}

namespace detail {

struct RunContext {
  const RunConfig& cfg;
  const RunOptions& opts;
  ArtifactDir out;
  json& manifest;

  void log(const std::string& msg) const {
    if (opts.verbose) std::cerr << msg << '\n';
  }
};

inline json fit_json(const DecayFit& f, DecayLaw law) {
  return {{"law", to_string(law)},
          {"window", {f.t_lo, f.t_hi}},
          {"samples", f.samples},
          {"slope", f.slope},
          {"prefactor", f.prefactor},
          {"exponent_deviation", f.exponent_deviation},
          {"max_relative_deviation", f.max_relative_deviation}};
}

template <class Trajectory>
json boundary_json(const Trajectory& traj, const InitialData& data) {
  const double e0 = (traj.psi_hat.front() - data.psi0).max_abs();
  const double eT = (traj.phi_hat.back() - data.phiT).max_abs();
  double mass_drift = 0.0;
  const cplx m0 = traj.psi_hat.front()[0];
  for (const auto& f : traj.psi_hat) mass_drift = std::max(mass_drift, std::abs(f[0] - m0));
  return {{"psi0_error", e0}, {"phiT_error", eT}, {"mass_drift", mass_drift}};
}

template <class Trajectory>
void write_trajectory_outputs(const RunContext& ctx, const Trajectory& traj, const NormSeries& norms) {
  if (ctx.cfg.wants("csv")) ctx.out.write("norms.csv", norms_csv(norms));
  if (ctx.opts.dump_fields) {
    const std::size_t last = traj.times.size() - 1;
    for (std::size_t j : {std::size_t{0}, last / 2, last}) {
      char name[32];
      std::snprintf(name, sizeof name, "%05zu.ghfd", j);
      ctx.out.dump_field(std::string("psi_") + name, inverse_transform(traj.psi_hat[j]));
      ctx.out.dump_field(std::string("phi_") + name, inverse_transform(traj.phi_hat[j]));
    }
  }
}

inline void run_params_check(const RunContext& ctx) {
  const ModelParams p = ctx.cfg.params();
  const auto pc = ctx.cfg.picard_config();
  const double thr = wave_threshold(p);
  json j = {{"rho_max", p.rho_max()},
            {"rho_bar", p.rho_bar()},
            {"sigma", p.sigma()},
            {"horizon", p.horizon()},
            {"f", p.f()},
            {"subcritical", p.subcritical()},
            {"gap_constant", p.gap_constant()},
            {"norm_c", pc.norm_c},
            {"time_nodes", pc.time_nodes},
            {"wave_threshold", thr >= 0.0 ? json(thr) : json(nullptr)}};
  std::cout << json_text(j);
  if (ctx.cfg.wants("json")) ctx.out.write_json("params.json", j);
}

inline void run_stability_map(const RunContext& ctx) {
  const ModelParams base = ctx.cfg.params();
  std::vector<double> grid = ctx.cfg.experiment.rho_grid;
  if (grid.empty())
    for (int i = 1; i < 20; ++i) grid.push_back(base.rho_max() * i / 20.0);
  std::vector<StabilityEntry> map;
  try {
    map = stability_map(grid, direction_samples(ctx.cfg.experiment.directions), base);
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("experiment.rho_grid: ") + e.what());
  }
  CsvWriter csv("rho_bar,gap,regime,wave_threshold");
  json rows = json::array();
  for (const auto& e : map) {
    csv.cell(e.rho_bar).cell(e.gap).raw(to_string(e.regime)).raw(e.wave_threshold ? format_number(*e.wave_threshold) : "");
    csv.end_row();
    rows.push_back({{"rho_bar", e.rho_bar},
                    {"gap", e.gap},
                    {"regime", to_string(e.regime)},
                    {"wave_threshold", e.wave_threshold ? json(*e.wave_threshold) : json(nullptr)}});
  }
  if (ctx.cfg.wants("csv")) ctx.out.write("stability_map.csv", csv.text());
  if (ctx.cfg.wants("json")) ctx.out.write_json("stability_map.json", {{"entries", rows}});
}

inline void run_linear(const RunContext& ctx) {
  const ModelParams p = ctx.cfg.params();
  const GridSpec g = ctx.cfg.grid_spec();
  const InitialData data = make_initial_data(ctx.cfg, g);
  const auto times = uniform_nodes(ctx.cfg.picard_config().time_nodes, p.horizon());
  ctx.log("linear solve on " + std::to_string(times.size()) + " nodes");
  const LinearTrajectory traj = linear_solve(data.psi0, data.phiT, times, p, false);
  const NormSeries norms = norm_series(traj, p);
  write_trajectory_outputs(ctx, traj, norms);
  json j = {{"subcommand", "linear"},
            {"time_nodes", times.size()},
            {"data_weight_norm", data.weight_norm},
            {"boundary", boundary_json(traj, data)}};
  if (ctx.cfg.wants("json")) ctx.out.write_json("summary.json", j);
}

inline StateTrajectory solve_nonlinear(const RunContext& ctx, const InitialData& data, const ModelParams& p) {
  const PicardConfig pc = ctx.cfg.picard_config();
  ctx.log("picard solve: M = " + std::to_string(pc.time_nodes) + ", c = " + format_number(pc.norm_c));
  StateTrajectory traj = picard_solve(data.psi0, data.phiT, pc, p);
  ctx.manifest["iterations"] = traj.iteration_report.size();
  for (std::size_t i = 0; i < traj.iteration_report.size(); ++i)
    ctx.log("  iteration " + std::to_string(i + 1) + ": distance " + format_number(traj.iteration_report[i]));
  return traj;
}

inline void run_nonlinear(const RunContext& ctx) {
  const ModelParams p = ctx.cfg.params();
  const GridSpec g = ctx.cfg.grid_spec();
  const InitialData data = make_initial_data(ctx.cfg, g);
  const StateTrajectory traj = solve_nonlinear(ctx, data, p);
  const NormSeries norms = norm_series(traj, p);
  write_trajectory_outputs(ctx, traj, norms);
  if (ctx.cfg.wants("csv")) {
    CsvWriter csv("iteration,distance");
    for (std::size_t i = 0; i < traj.iteration_report.size(); ++i) {
      csv.cell(static_cast<long long>(i + 1)).cell(traj.iteration_report[i]);
      csv.end_row();
    }
    ctx.out.write("iterations.csv", csv.text());
  }
  const ResidualReport res = pde_residual(traj, p);
  json j = {{"subcommand", "nonlinear"},
            {"time_nodes", traj.times.size()},
            {"iterations", traj.iteration_report.size()},
            {"converged", traj.converged},
            {"iteration_report", traj.iteration_report},
            {"pde_residual_max", res.max_relative},
            {"data_weight_norm", data.weight_norm},
            {"boundary", boundary_json(traj, data)}};
  if (ctx.cfg.wants("json")) ctx.out.write_json("summary.json", j);
}

inline void run_dispersion(const RunContext& ctx) {
  const ModelParams p = ctx.cfg.params();
  const double a = ctx.opts.a.value_or(ctx.cfg.experiment.a);
  const double b = ctx.opts.b.value_or(ctx.cfg.experiment.b);
  const int beta = ctx.opts.beta.value_or(ctx.cfg.experiment.beta);
  if (beta != 0 && beta != 2) throw ConfigError("beta must be 0 or 2");
  std::vector<PlanarWave> waves;
  try {
    waves = beta == 2 ? dispersion_beta2(a, b, p) : dispersion_beta0(a, b, p);
  } catch (const InvalidParams& e) {
    throw ConfigError(e.what());
  }
  json list = json::array();
  for (const auto& w : waves)
    list.push_back({{"c", w.c}, {"A", w.A}, {"B", w.B}, {"multiplicity", w.multiplicity}});
  const double thr = wave_threshold(p);
  json j = {{"beta", beta}, {"a", a},       {"b", b},
            {"rho_max", p.rho_max()},      {"rho_bar", p.rho_bar()},
            {"waves", list},
            {"wave_threshold", beta == 2 && thr >= 0.0 ? json(thr) : json(nullptr)}};
  std::cout << json_text(j);
  if (ctx.cfg.wants("json")) ctx.out.write_json("dispersion.json", j);
}

inline void run_viscosity_sweep(const RunContext& ctx) {
  const ModelParams p = ctx.cfg.params();
  const GridSpec g = ctx.cfg.grid_spec();
  const InitialData data = make_initial_data(ctx.cfg, g);
  const auto& sigmas = ctx.cfg.experiment.sigmas;
  const PicardConfig pc = ctx.cfg.picard_config();
  const ViscositySweep sweep = viscosity_sweep(data.psi0, data.phiT, sigmas, p, pc, ctx.cfg.experiment.linear_only);
  CsvWriter csv("sigma,difference,iterations");
  for (std::size_t i = 0; i < sweep.sigmas.size(); ++i) {
    csv.cell(sweep.sigmas[i]).cell(sweep.differences[i]).cell(sweep.iterations[i]);
    csv.end_row();
  }
  if (ctx.cfg.wants("csv")) ctx.out.write("viscosity_sweep.csv", csv.text());
  json ratios = json::array();
  for (std::size_t i = 0; i + 1 < sweep.differences.size(); ++i)
    ratios.push_back(sweep.differences[i + 1] > 0.0 ? json(sweep.differences[i] / sweep.differences[i + 1])
                                                    : json(nullptr));
  json j = {{"subcommand", "viscosity-sweep"},
            {"linear_only", ctx.cfg.experiment.linear_only},
            {"sigmas", sweep.sigmas},
            {"differences", sweep.differences},
            {"ratios", ratios},
            {"viscous_data_weight", viscous_data_weight(data.psi0, data.phiT, *std::max_element(sigmas.begin(), sigmas.end()))}};
  if (sweep.sigmas.size() >= 3) j["extrapolated_at_zero"] = extrapolate_to_zero(sweep.sigmas, sweep.differences);
  if (ctx.cfg.wants("json")) ctx.out.write_json("summary.json", j);
}

inline void run_decay_fit(const RunContext& ctx) {
  const ModelParams p = ctx.cfg.params();
  const GridSpec g = ctx.cfg.grid_spec();
  const InitialData data = make_initial_data(ctx.cfg, g);
  NormSeries norms;
  if (ctx.cfg.experiment.solver == "nonlinear") {
    const StateTrajectory traj = solve_nonlinear(ctx, data, p);
    norms = norm_series(traj, p);
    write_trajectory_outputs(ctx, traj, norms);
  } else {
    const auto times = uniform_nodes(ctx.cfg.picard_config().time_nodes, p.horizon());
    const LinearTrajectory traj = linear_solve(data.psi0, data.phiT, times, p, false);
    norms = norm_series(traj, p);
    write_trajectory_outputs(ctx, traj, norms);
  }
  const auto window = ctx.cfg.experiment.window.value_or(default_fit_window(p.horizon()));
  json fits = json::array();
  for (DecayLaw law : {DecayLaw::InverseLinear, DecayLaw::InverseQuadratic})
    fits.push_back(fit_json(fit_decay(norms, law, window[0], window[1], p.horizon()), law));
  if (ctx.cfg.wants("json")) ctx.out.write_json("decay_fit.json", {{"solver", ctx.cfg.experiment.solver}, {"fits", fits}});
}

}  // namespace detail

/// Executes one subcommand and writes its artifacts plus manifest.json into
/// the output directory. Returns the process exit code.
inline int run(const std::string& subcommand, const RunConfig& config, const RunOptions& opts = {}) {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path dir = opts.output_dir.value_or(config.output.dir);
  json manifest = {{"subcommand", subcommand},
                   {"version", kVersion},
                   {"config", nullptr},
                   {"iterations", nullptr},
                   {"threads", thread_count()}};
  int code = kExitOk;
  try {
    manifest["config"] = to_json(config);
    detail::RunContext ctx{config, opts, ArtifactDir(dir), manifest};
    ctx.out.ensure();
    if (subcommand == "params-check") {
      detail::run_params_check(ctx);
    } else if (subcommand == "stability-map") {
      detail::run_stability_map(ctx);
    } else if (subcommand == "linear") {
      detail::run_linear(ctx);
    } else if (subcommand == "nonlinear") {
      detail::run_nonlinear(ctx);
    } else if (subcommand == "dispersion") {
      detail::run_dispersion(ctx);
    } else if (subcommand == "viscosity-sweep") {
      detail::run_viscosity_sweep(ctx);
    } else if (subcommand == "decay-fit") {
      detail::run_decay_fit(ctx);
    } else {
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    manifest["status"] = "ok";
    manifest["error"] = nullptr;
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    manifest["status"] = "error";
    manifest["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    std::cerr << e.what() << '\n';
  } catch (const std::exception& e) {
    code = kExitSolver;
    manifest["status"] = "error";
    manifest["error"] = {{"kind", "InternalError"}, {"message", e.what()}};
    std::cerr << e.what() << '\n';
  }
  manifest["exit_code"] = code;
  manifest["wall_clock_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    ArtifactDir(dir).write_json("manifest.json", manifest);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    if (code == kExitOk) code = kExitIo;
  }
  return code;
}

/// Manifest for a run whose configuration never parsed.
inline int report_config_failure(const std::string& subcommand, const std::filesystem::path& dir,
                                 const Error& error) {
  std::cerr << error.what() << '\n';
  const int code = exit_code_for(error.kind());
  json manifest = {{"subcommand", subcommand},
                   {"version", kVersion},
                   {"config", nullptr},
                   {"iterations", nullptr},
                   {"threads", thread_count()},
                   {"status", "error"},
                   {"error", {{"kind", std::string(to_string(error.kind()))}, {"message", error.what()}}},
                   {"exit_code", code},
                   {"wall_clock_seconds", 0.0}};
  try {
    ArtifactDir(dir).write_json("manifest.json", manifest);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
  }
  return code;
}

}  // namespace hughes::io
