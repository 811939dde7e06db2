#include "ssync/error.hpp"

namespace ssync {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::OutOfRange: return "out of range";
    case ErrorCode::MalformedHeader: return "malformed header";
    case ErrorCode::TruncatedPayload: return "truncated payload";
    case ErrorCode::UnsupportedDtype: return "unsupported dtype";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::DegenerateData: return "degenerate data";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::Unsatisfiable: return "unsatisfiable";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::ModeMismatch: return "mode mismatch";
    case ErrorCode::UnknownClass: return "unknown class";
    case ErrorCode::Config: return "config error";
  }
  return "unknown error";
}

}  // namespace ssync
