#pragma once

#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "hughes/diagnostics.hpp"
#include "hughes/io/config.hpp"
#include "hughes/io/fields.hpp"

namespace hughes::io {

struct InitialData {
  SpectralField psi0;
  SpectralField phiT;
  /// sup (1+|xi|)^3 |psi0^| + sup (1+|xi|)^3 |xi phiT^|
  double weight_norm = 0.0;
};

namespace detail {

inline RealField gaussian(const GridSpec& g, double amplitude, double width, std::array<double, 2> center,
                          bool remove_mean) {
  RealField out = RealField::sample(g, [&](double x, double y) {
    const double dx = x - center[0], dy = y - center[1];
    return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
  });
  if (remove_mean) {
    double mean = 0.0;
    for (double v : out.values()) mean += v;
    mean /= static_cast<double>(out.values().size());
    for (double& v : out.values()) v -= mean;
  }
  return out;
}

// Uniform in [-1, 1) from the top 53 bits; identical on every platform.
inline double symmetric_uniform(std::mt19937_64& rng) {
  return 2.0 * std::ldexp(static_cast<double>(rng() >> 11), -53) - 1.0;
}

inline std::pair<SpectralField, SpectralField> random_fields(const GridSpec& g, double amplitude, int max_mode,
                                                             std::uint64_t seed) {
  if (max_mode >= g.n() / 2) throw DataError("data.max_mode must be below n/2");
  std::mt19937_64 rng(seed);
  SpectralField psi(g), phi(g);
  for (int kx = 0; kx <= max_mode; ++kx) {
    for (int ky = -max_mode; ky <= max_mode; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      const cplx a(symmetric_uniform(rng), symmetric_uniform(rng));
      const cplx b(symmetric_uniform(rng), symmetric_uniform(rng));
      psi.set_mode(kx, ky, amplitude * a);
      phi.set_mode(kx, ky, amplitude * b);
    }
  }
  return {psi, phi};
}

// Full-plane mode list; every entry needs its conjugate partner.
inline std::pair<SpectralField, SpectralField> mode_fields(const GridSpec& g, const std::vector<ModeEntry>& modes) {
  std::map<std::pair<int, int>, std::pair<cplx, cplx>> table;
  const int half = g.n() / 2;
  for (const auto& m : modes) {
    if (std::abs(m.kx) > half || std::abs(m.ky) > half) {
      throw DataError("mode (" + std::to_string(m.kx) + ", " + std::to_string(m.ky) + ") exceeds the grid");
    }
    const std::pair<int, int> key{g.mode(g.index(m.kx)), g.mode(g.index(m.ky))};
    if (!table.emplace(key, std::make_pair(m.psi, m.phi)).second) {
      throw DataError("mode (" + std::to_string(m.kx) + ", " + std::to_string(m.ky) + ") listed twice");
    }
  }
  SpectralField psi(g), phi(g);
  for (const auto& [key, value] : table) {
    const std::pair<int, int> partner{g.mode(g.index(-key.first)), g.mode(g.index(-key.second))};
    const auto it = table.find(partner);
    const double scale = std::max({1.0, std::abs(value.first), std::abs(value.second)});
    const bool ok = it != table.end() && std::abs(it->second.first - std::conj(value.first)) <= 1e-14 * scale &&
                    std::abs(it->second.second - std::conj(value.second)) <= 1e-14 * scale;
    if (!ok) {
      throw DataError("mode list is not Hermitian at (" + std::to_string(key.first) + ", " +
                      std::to_string(key.second) + ")");
    }
    if (key.first < 0) continue;
    psi.set_mode(key.first, key.second, value.first);
    phi.set_mode(key.first, key.second, value.second);
  }
  return {psi, phi};
}

}  // namespace detail

/// Builds (psi0^, phiT^) from the data section of a configuration.
inline InitialData make_initial_data(const RunConfig& cfg, const GridSpec& g) {
  const auto& d = cfg.data;
  SpectralField psi(g), phi(g);
  if (d.kind == "gaussian") {
    const double L = g.length();
    const auto center = d.center.value_or(std::array<double, 2>{0.5 * L, 0.5 * L});
    psi = forward_transform(detail::gaussian(g, d.amplitude, d.width, center, d.remove_mean));
    phi = forward_transform(detail::gaussian(g, d.phi_amplitude, d.phi_width.value_or(d.width), center, d.remove_mean));
  } else if (d.kind == "modes") {
    std::tie(psi, phi) = detail::mode_fields(g, d.modes);
  } else if (d.kind == "random") {
    std::tie(psi, phi) = detail::random_fields(g, d.amplitude, d.max_mode, d.seed);
  } else {
    psi = forward_transform(read_field(d.file, g.length(), g.n()), g);
    if (!d.phi_file.empty()) phi = forward_transform(read_field(d.phi_file, g.length(), g.n()), g);
  }
  if (!psi.all_finite() || !phi.all_finite()) throw DataError("initial data is not finite");
  InitialData out{psi, phi, data_weight_norm(psi, phi, 3.0)};
  return out;
}

}  // namespace hughes::io
