#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "hughes/diagnostics.hpp"
#include "hughes/io/config.hpp"
#include "hughes/io/fields.hpp"

namespace hughes::io {

inline constexpr const char* kVersion = "1.0.0";

inline constexpr const char* kNormsHeader = "t,l2_psi,l2_grad_phi,linf_psi,linf_grad_phi,sigma_l2_hess_phi";

/// 17 significant digits: round-trip exact for binary64.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Accumulates CSV text; cells are numbers or raw strings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& header) : text_(header + "\n") {}

  CsvWriter& cell(double v) { return raw(format_number(v)); }
  CsvWriter& cell(long long v) { return raw(std::to_string(v)); }
  CsvWriter& cell(int v) { return raw(std::to_string(v)); }
  CsvWriter& raw(const std::string& s) {
    if (!first_) text_ += ',';
    text_ += s;
    first_ = false;
    return *this;
  }
  void end_row() {
    text_ += '\n';
    first_ = true;
  }
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
  bool first_ = true;
};

inline std::string norms_csv(const NormSeries& s) {
  CsvWriter csv(kNormsHeader);
  for (std::size_t i = 0; i < s.size(); ++i) {
    csv.cell(s.times[i])
        .cell(s.l2_psi[i])
        .cell(s.l2_grad_phi[i])
        .cell(s.linf_psi[i])
        .cell(s.linf_grad_phi[i])
        .cell(s.sigma_l2_hess_phi[i]);
    csv.end_row();
  }
  return csv.text();
}

inline std::string json_text(const json& j) { return j.dump(2) + "\n"; }

/// Output directory of one run.
class ArtifactDir {
 public:
  explicit ArtifactDir(std::filesystem::path root) : root_(std::move(root)) {}

  void ensure() const {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) throw IoError("cannot create output directory " + root_.string());
  }
  const std::filesystem::path& root() const noexcept { return root_; }

  void write(const std::string& name, const std::string& contents) const {
    ensure();
    write_atomic(root_ / name, contents);
  }
  void write_json(const std::string& name, const json& j) const { write(name, json_text(j)); }

  void dump_field(const std::string& name, const RealField& field) const {
    ensure();
    std::filesystem::create_directories(root_ / "fields");
    write_field(root_ / "fields" / name, field);
  }

 private:
  std::filesystem::path root_;
};

}  // namespace hughes::io
