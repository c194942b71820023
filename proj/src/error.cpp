#include "glhs/error.hpp"

namespace glhs {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSize: return "invalid-size";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::NumericalBlowup: return "numerical-blowup";
    case ErrorKind::DimensionCap: return "dimension-cap";
    case ErrorKind::Query: return "query-error";
    case ErrorKind::InsufficientSignal: return "insufficient-signal";
    case ErrorKind::Internal: return "internal-error";
  }
  return "unknown";
}

}  // namespace glhs
