#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hughes {

enum class ErrorKind {
  InvalidParams,
  ShapeMismatch,
  DegenerateMode,
  ResonantMode,
  NoContraction,
  QuadratureUnderResolved,
  IncommensurateWave,
  WindowTooNarrow,
  ConfigError,
  DataError,
  IoError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DegenerateMode: return "DegenerateMode";
    case ErrorKind::ResonantMode: return "ResonantMode";
    case ErrorKind::NoContraction: return "NoContraction";
    case ErrorKind::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorKind::IncommensurateWave: return "IncommensurateWave";
    case ErrorKind::WindowTooNarrow: return "WindowTooNarrow";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::DataError: return "DataError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base of every exception thrown by the library. `kind()` identifies the
/// failure class; the CLI maps kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindedError : public Error {
 public:
  explicit KindedError(const std::string& what) : Error(K, what) {}
};

using InvalidParams = KindedError<ErrorKind::InvalidParams>;
using ShapeMismatch = KindedError<ErrorKind::ShapeMismatch>;
using DegenerateMode = KindedError<ErrorKind::DegenerateMode>;
using ResonantMode = KindedError<ErrorKind::ResonantMode>;
using NoContraction = KindedError<ErrorKind::NoContraction>;
using QuadratureUnderResolved = KindedError<ErrorKind::QuadratureUnderResolved>;
using IncommensurateWave = KindedError<ErrorKind::IncommensurateWave>;
using WindowTooNarrow = KindedError<ErrorKind::WindowTooNarrow>;
using ConfigError = KindedError<ErrorKind::ConfigError>;
using DataError = KindedError<ErrorKind::DataError>;
using IoError = KindedError<ErrorKind::IoError>;

}  // namespace hughes
