#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "hughes/grid.hpp"
#include "hughes/picard.hpp"

namespace hughes::io {

using json = nlohmann::json;

struct ModeEntry {
  int kx = 0, ky = 0;
  cplx psi{}, phi{};
};

struct RunConfig {
  struct Model {
    double rho_max = 1.0;
    double rho_bar = 0.0;
    double sigma = 0.0;
    double horizon = 10.0;
  } model;
  struct Grid {
    int n = 256;
    double length = 256.0;
  } grid;
  struct Data {
    std::string kind = "gaussian";  // gaussian | modes | file | random
    double amplitude = 1e-3;
    double width = 8.0;
    std::optional<std::array<double, 2>> center;
    double phi_amplitude = 0.0;
    std::optional<double> phi_width;
    bool remove_mean = false;
    std::uint64_t seed = 0;
    int max_mode = 4;
    std::vector<ModeEntry> modes;
    std::string file, phi_file;
  } data;
  struct Picard {
    std::optional<int> time_nodes;
    double tol = 1e-10;
    int max_iter = 50;
    BoundaryMode boundary_mode = BoundaryMode::Exact;
    bool quadrature_check = false;
    double quadrature_tol = 1e-6;
  } picard;
  struct Norm {
    double k = 3.0;
    std::optional<double> c;  // empty: "auto"
  } norm;
  struct Output {
    std::string dir = "output";
    std::vector<std::string> formats{"csv", "json"};
  } output;
  struct Experiment {
    double a = 1.0, b = 0.0;
    int beta = 2;
    std::vector<double> rho_grid;
    int directions = 181;
    std::vector<double> sigmas{0.2, 0.1, 0.05};
    std::optional<std::array<double, 2>> window;
    std::string solver = "linear";  // linear | nonlinear
    bool linear_only = false;
  } experiment;

  ModelParams params() const {
    return ModelParams::validate(model.rho_max, model.rho_bar, model.sigma, model.horizon);
  }
  GridSpec grid_spec() const { return GridSpec(grid.n, grid.length); }

  /// "auto" resolves to sqrt(rho (f - rho)) / 2.
  double norm_c() const {
    if (norm.c) return *norm.c;
    return PicardConfig::defaults(params()).norm_c;
  }

  PicardConfig picard_config() const {
    PicardConfig cfg = PicardConfig::defaults(params());
    if (picard.time_nodes) cfg.time_nodes = *picard.time_nodes;
    cfg.tol = picard.tol;
    cfg.max_iter = picard.max_iter;
    cfg.boundary_mode = picard.boundary_mode;
    cfg.diagnose_quadrature = picard.quadrature_check;
    cfg.quadrature_tol = picard.quadrature_tol;
    cfg.norm_order = norm.k;
    cfg.norm_c = norm_c();
    return cfg;
  }

  bool wants(const std::string& format) const {
    return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
  }
};

namespace detail {

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ConfigError((where.empty() ? k : where + "." + k) + ": unknown key");
  }
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

inline std::array<double, 2> pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected [x, y]");
  return {number(v[0], where), number(v[1], where)};
}

inline std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_value(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  const auto p = pair(v, where);
  return {p[0], p[1]};
}

}  // namespace detail

/// Parses and validates a JSON run configuration. Throws ConfigError naming
/// the offending key (or the line and column of a syntax error).
inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON at " + line_context(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  allow_keys(root, "", {"model", "grid", "data", "picard", "norm", "output", "experiment"});
  RunConfig cfg;

  if (!root.contains("model")) throw ConfigError("model: section is required");
  {
    const json& m = root["model"];
    allow_keys(m, "model", {"rho_max", "rho_bar", "sigma", "horizon"});
    if (!m.contains("rho_bar")) throw ConfigError("model.rho_bar: required");
    read(m, "model", "rho_max", cfg.model.rho_max);
    read(m, "model", "rho_bar", cfg.model.rho_bar);
    read(m, "model", "sigma", cfg.model.sigma);
    read(m, "model", "horizon", cfg.model.horizon);
    try {
      (void)cfg.params();
    } catch (const InvalidParams& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  }
  if (root.contains("grid")) {
    const json& g = root["grid"];
    allow_keys(g, "grid", {"n", "length"});
    read(g, "grid", "n", cfg.grid.n);
    read(g, "grid", "length", cfg.grid.length);
  }
  try {
    (void)cfg.grid_spec();
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  if (root.contains("data")) {
    const json& d = root["data"];
    allow_keys(d, "data",
               {"kind", "amplitude", "width", "center", "phi_amplitude", "phi_width", "remove_mean", "seed",
                "max_mode", "modes", "file", "phi_file"});
    read(d, "data", "kind", cfg.data.kind);
    if (cfg.data.kind != "gaussian" && cfg.data.kind != "modes" && cfg.data.kind != "file" &&
        cfg.data.kind != "random") {
      throw ConfigError("data.kind: expected gaussian, modes, file or random, got '" + cfg.data.kind + "'");
    }
    read(d, "data", "amplitude", cfg.data.amplitude);
    read(d, "data", "width", cfg.data.width);
    if (d.contains("center")) cfg.data.center = pair(d["center"], "data.center");
    read(d, "data", "phi_amplitude", cfg.data.phi_amplitude);
    if (d.contains("phi_width")) cfg.data.phi_width = number(d["phi_width"], "data.phi_width");
    read(d, "data", "remove_mean", cfg.data.remove_mean);
    read(d, "data", "seed", cfg.data.seed);
    read(d, "data", "max_mode", cfg.data.max_mode);
    read(d, "data", "file", cfg.data.file);
    read(d, "data", "phi_file", cfg.data.phi_file);
    if (d.contains("modes")) {
      const json& list = d["modes"];
      if (!list.is_array()) throw ConfigError("data.modes: expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "data.modes[" + std::to_string(i) + "]";
        allow_keys(list[i], where, {"kx", "ky", "psi", "phi"});
        ModeEntry e;
        read(list[i], where, "kx", e.kx);
        read(list[i], where, "ky", e.ky);
        if (list[i].contains("psi")) e.psi = complex_value(list[i]["psi"], where + ".psi");
        if (list[i].contains("phi")) e.phi = complex_value(list[i]["phi"], where + ".phi");
        cfg.data.modes.push_back(e);
      }
    }
    if (!(cfg.data.width > 0.0)) throw ConfigError("data.width: must be positive");
    if (cfg.data.phi_width && !(*cfg.data.phi_width > 0.0)) throw ConfigError("data.phi_width: must be positive");
    if (cfg.data.max_mode < 1) throw ConfigError("data.max_mode: must be >= 1");
    if (cfg.data.kind == "file" && cfg.data.file.empty()) throw ConfigError("data.file: required for kind 'file'");
    if (!std::isfinite(cfg.data.amplitude) || !std::isfinite(cfg.data.phi_amplitude))
      throw ConfigError("data.amplitude: must be finite");
  }
  if (root.contains("picard")) {
    const json& p = root["picard"];
    allow_keys(p, "picard", {"time_nodes", "tol", "max_iter", "boundary_mode", "quadrature_check", "quadrature_tol"});
    if (p.contains("time_nodes")) {
      int m = 0;
      read(p, "picard", "time_nodes", m);
      cfg.picard.time_nodes = m;
    }
    read(p, "picard", "tol", cfg.picard.tol);
    read(p, "picard", "max_iter", cfg.picard.max_iter);
    std::string mode = "exact";
    read(p, "picard", "boundary_mode", mode);
    if (mode == "exact") {
      cfg.picard.boundary_mode = BoundaryMode::Exact;
    } else if (mode == "paper") {
      cfg.picard.boundary_mode = BoundaryMode::Paper;
    } else {
      throw ConfigError("picard.boundary_mode: expected exact or paper");
    }
    read(p, "picard", "quadrature_check", cfg.picard.quadrature_check);
    read(p, "picard", "quadrature_tol", cfg.picard.quadrature_tol);
  }
  if (root.contains("norm")) {
    const json& n = root["norm"];
    allow_keys(n, "norm", {"k", "c"});
    read(n, "norm", "k", cfg.norm.k);
    if (n.contains("c")) {
      if (n["c"].is_string()) {
        if (n["c"].get<std::string>() != "auto") throw ConfigError("norm.c: expected a number or \"auto\"");
      } else {
        cfg.norm.c = number(n["c"], "norm.c");
      }
    }
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    allow_keys(o, "output", {"dir", "formats"});
    read(o, "output", "dir", cfg.output.dir);
    read(o, "output", "formats", cfg.output.formats);
    for (const auto& f : cfg.output.formats)
      if (f != "csv" && f != "json") throw ConfigError("output.formats: unknown format '" + f + "'");
  }
  if (root.contains("experiment")) {
    const json& e = root["experiment"];
    allow_keys(e, "experiment",
               {"a", "b", "beta", "rho_grid", "directions", "sigmas", "window", "solver", "linear_only"});
    read(e, "experiment", "a", cfg.experiment.a);
    read(e, "experiment", "b", cfg.experiment.b);
    read(e, "experiment", "beta", cfg.experiment.beta);
    if (cfg.experiment.beta != 0 && cfg.experiment.beta != 2) throw ConfigError("experiment.beta: expected 0 or 2");
    if (e.contains("rho_grid")) cfg.experiment.rho_grid = number_list(e["rho_grid"], "experiment.rho_grid");
    read(e, "experiment", "directions", cfg.experiment.directions);
    if (cfg.experiment.directions < 2) throw ConfigError("experiment.directions: must be >= 2");
    if (e.contains("sigmas")) cfg.experiment.sigmas = number_list(e["sigmas"], "experiment.sigmas");
    for (double s : cfg.experiment.sigmas)
      if (!(s >= 0.0)) throw ConfigError("experiment.sigmas: values must be nonnegative");
    if (e.contains("window")) cfg.experiment.window = pair(e["window"], "experiment.window");
    read(e, "experiment", "solver", cfg.experiment.solver);
    if (cfg.experiment.solver != "linear" && cfg.experiment.solver != "nonlinear")
      throw ConfigError("experiment.solver: expected linear or nonlinear");
    read(e, "experiment", "linear_only", cfg.experiment.linear_only);
  }
  try {
    cfg.picard_config().validate();
  } catch (const InvalidParams& e) {
    throw ConfigError(std::string("picard/norm: ") + e.what());
  }
  if (!(cfg.picard.quadrature_tol > 0.0)) throw ConfigError("picard.quadrature_tol: must be positive");
  return cfg;
}

/// Fully resolved configuration, as echoed into the run manifest.
inline json to_json(const RunConfig& cfg) {
  using detail::complex_json;
  const PicardConfig pc = cfg.picard_config();
  json modes = json::array();
  for (const auto& m : cfg.data.modes)
    modes.push_back({{"kx", m.kx}, {"ky", m.ky}, {"psi", complex_json(m.psi)}, {"phi", complex_json(m.phi)}});
  const double L = cfg.grid.length;
  const auto center = cfg.data.center.value_or(std::array<double, 2>{0.5 * L, 0.5 * L});
  json out = {
      {"model",
       {{"rho_max", cfg.model.rho_max},
        {"rho_bar", cfg.model.rho_bar},
        {"sigma", cfg.model.sigma},
        {"horizon", cfg.model.horizon}}},
      {"grid", {{"n", cfg.grid.n}, {"length", cfg.grid.length}}},
      {"data",
       {{"kind", cfg.data.kind},
        {"amplitude", cfg.data.amplitude},
        {"width", cfg.data.width},
        {"center", {center[0], center[1]}},
        {"phi_amplitude", cfg.data.phi_amplitude},
        {"phi_width", cfg.data.phi_width.value_or(cfg.data.width)},
        {"remove_mean", cfg.data.remove_mean},
        {"seed", cfg.data.seed},
        {"max_mode", cfg.data.max_mode},
        {"modes", modes},
        {"file", cfg.data.file},
        {"phi_file", cfg.data.phi_file}}},
      {"picard",
       {{"time_nodes", pc.time_nodes},
        {"tol", pc.tol},
        {"max_iter", pc.max_iter},
        {"boundary_mode", pc.boundary_mode == BoundaryMode::Exact ? "exact" : "paper"},
        {"quadrature_check", pc.diagnose_quadrature},
        {"quadrature_tol", pc.quadrature_tol}}},
      {"norm", {{"k", pc.norm_order}, {"c", pc.norm_c}}},
      {"output", {{"dir", cfg.output.dir}, {"formats", cfg.output.formats}}},
      {"experiment",
       {{"a", cfg.experiment.a},
        {"b", cfg.experiment.b},
        {"beta", cfg.experiment.beta},
        {"rho_grid", cfg.experiment.rho_grid},
        {"directions", cfg.experiment.directions},
        {"sigmas", cfg.experiment.sigmas},
        {"solver", cfg.experiment.solver},
        {"linear_only", cfg.experiment.linear_only}}},
  };
  if (cfg.experiment.window) out["experiment"]["window"] = {(*cfg.experiment.window)[0], (*cfg.experiment.window)[1]};
  return out;
}

}  // namespace hughes::io
