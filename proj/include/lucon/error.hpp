#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lucon {

/// Error categories. Each maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  Config,
  Io,
  Format,
  Domain,
  Dimension,
  EmptyRegion,
  Infeasible,
  UnknownId,
  EmptyRetained,
  Convergence,
};

std::string_view to_string(ErrorKind kind) noexcept;
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define LUCON_DEFINE_ERROR(Name, Kind)                                           \
  class Name : public Error {                                                    \
   public:                                                                       \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}     \
  }

LUCON_DEFINE_ERROR(ConfigError, Config);
LUCON_DEFINE_ERROR(IoError, Io);
LUCON_DEFINE_ERROR(FormatError, Format);
LUCON_DEFINE_ERROR(DomainError, Domain);
LUCON_DEFINE_ERROR(DimensionError, Dimension);
LUCON_DEFINE_ERROR(EmptyRegionError, EmptyRegion);
LUCON_DEFINE_ERROR(UnknownIdError, UnknownId);
LUCON_DEFINE_ERROR(EmptyRetainedError, EmptyRetained);
LUCON_DEFINE_ERROR(ConvergenceError, Convergence);

#undef LUCON_DEFINE_ERROR

/// Raised when no candidate placement satisfies the label-uncertainty
/// constraint. Carries the failing iteration (1-based), the number of balls
/// already placed, and the largest candidate LU seen in that iteration.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, int iteration, int balls_placed, double max_lu)
      : Error(ErrorKind::Infeasible, what),
        iteration_(iteration),
        balls_placed_(balls_placed),
        max_lu_(max_lu) {}

  int iteration() const noexcept { return iteration_; }
  int balls_placed() const noexcept { return balls_placed_; }
  double max_lu() const noexcept { return max_lu_; }

 private:
  int iteration_;
  int balls_placed_;
  double max_lu_;
};

}  // namespace lucon
