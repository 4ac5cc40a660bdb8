#pragma once

#include <stdexcept>
#include <string>

namespace rzsr {

enum class ErrorCode {
  InvalidArgument,  // bad parameter value (scale, factor, mode, ...)
  Io,               // file missing / unreadable / unwritable
  Format,           // file exists but content malformed
  Shape,            // dimension or channel mismatch
  Bounds,           // window or index out of bounds
  Config,           // inconsistent configuration
  Runtime,          // anything else (non-finite loss, stage failure, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Io: return "io";
    case ErrorCode::Format: return "format";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Bounds: return "bounds";
    case ErrorCode::Config: return "config";
    case ErrorCode::Runtime: return "runtime";
  }
  return "unknown";
}

}  // namespace rzsr
