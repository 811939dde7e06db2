#pragma once

#include <stdexcept>
#include <string>

namespace ssync {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  OutOfRange,
  MalformedHeader,
  TruncatedPayload,
  UnsupportedDtype,
  Io,
  DegenerateData,
  InsufficientData,
  Unsatisfiable,
  Divergence,
  ModeMismatch,
  UnknownClass,
  Config,
};

const char* to_string(ErrorCode code);

// All library failures surface as this exception; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace ssync
