#pragma once

#include <stdexcept>
#include <string>

namespace famnet {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-conforming matrix/vector shapes.
struct ShapeError : Error {
  explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Non-finite value produced during evaluation or training.
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Adaptive loop cannot proceed (e.g. empty frequency selection).
struct AdaptError : Error {
  explicit AdaptError(const std::string& msg) : Error(msg) {}
};

// Invalid configuration value or unknown preset.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Corrupted or version-mismatched checkpoint file.
struct FormatError : Error {
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

// Internal invariant violated (tape replay mismatch and the like).
struct InternalError : Error {
  explicit InternalError(const std::string& msg) : Error(msg) {}
};

}  // namespace famnet
