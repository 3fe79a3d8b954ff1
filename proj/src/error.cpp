#include "lucon/error.hpp"

namespace lucon {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::EmptyRegion: return "empty_region";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::UnknownId: return "unknown_id";
    case ErrorKind::EmptyRetained: return "empty_retained";
    case ErrorKind::Convergence: return "convergence";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept { return 2 + static_cast<int>(kind); }

}  // namespace lucon
