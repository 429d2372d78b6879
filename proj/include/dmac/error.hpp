#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dmac {

enum class ErrorKind {
  kConfiguration,
  kNumerical,
  kTraining,
  kIo,
};

/// Base exception for everything thrown by the library. The C API maps
/// `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(what), kind_(kind), step_(step) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Closed-loop step index at which a numerical failure happened, if known.
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> step_;
};

inline Error ConfigurationError(const std::string& what) {
  return Error(ErrorKind::kConfiguration, what);
}

inline Error NumericalError(const std::string& what,
                            std::optional<std::size_t> step = std::nullopt) {
  return Error(ErrorKind::kNumerical, what, step);
}

}  // namespace dmac
