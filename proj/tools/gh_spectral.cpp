// gh-spectral: batch driver for the perturbation solver and stability toolkit.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hughes/io/run.hpp"

namespace io = hughes::io;

namespace {

int thread_request(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("GH_SPECTRAL_THREADS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed GH_SPECTRAL_THREADS='" << env << "'\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-spectral solver and stability toolkit for the generalized Hughes model"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output_dir;
  int threads = 0;
  bool dump_fields = false, verbose = false;
  double rho_bar = 0.0, a = 0.0, b = 0.0;
  int beta = 2;

  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--output-dir", output_dir, "directory for artifacts (overrides output.dir)");
  app.add_option("--threads", threads, "worker threads (fallback: GH_SPECTRAL_THREADS)")->check(CLI::NonNegativeNumber);
  app.add_flag("--dump-fields", dump_fields, "write binary field dumps");
  app.add_flag("--verbose", verbose, "progress on stderr");
  auto* rho_opt = app.add_option("--rho-bar", rho_bar, "override model.rho_bar");
  auto* a_opt = app.add_option("--a", a, "x wavenumber for dispersion");
  auto* b_opt = app.add_option("--b", b, "y wavenumber for dispersion");
  auto* beta_opt = app.add_option("--beta", beta, "Hamiltonian exponent for dispersion (0 or 2)");

  for (const auto& name : io::subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : io::kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  hughes::set_thread_count(thread_request(threads));

  io::RunOptions opts;
  if (!output_dir.empty()) opts.output_dir = output_dir;
  opts.dump_fields = dump_fields;
  opts.verbose = verbose;
  opts.threads = hughes::thread_count();
  if (*rho_opt) opts.rho_bar = rho_bar;
  if (*a_opt) opts.a = a;
  if (*b_opt) opts.b = b;
  if (*beta_opt) opts.beta = beta;

  const std::string fallback_dir = output_dir.empty() ? "output" : output_dir;
  io::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = io::parse_config(io::read_file(config_path));
    } else if ((sub == "dispersion" || sub == "params-check") && opts.rho_bar) {
      cfg = io::parse_config(io::json{{"model", {{"rho_bar", *opts.rho_bar}}}}.dump());
    } else {
      throw hughes::ConfigError("--config is required for " + sub);
    }
    if (opts.rho_bar) {
      cfg.model.rho_bar = *opts.rho_bar;
      try {
        (void)cfg.params();
      } catch (const hughes::InvalidParams& e) {
        throw hughes::ConfigError(std::string("--rho-bar: ") + e.what());
      }
    }
  } catch (const hughes::Error& e) {
    return io::report_config_failure(sub, fallback_dir, e);
  }
  return io::run(sub, cfg, opts);
}
