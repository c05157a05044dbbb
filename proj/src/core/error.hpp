#pragma once

#include <stdexcept>
#include <string>

namespace latdisc {

enum class ErrorCode {
  InvalidArgument = 1,
  OutOfRange = 2,
  Internal = 4,
};

/// Single exception type thrown by the core; the C API maps `code()` onto
/// its status enumeration.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

[[noreturn]] inline void throw_range(const std::string& what) {
  throw Error(ErrorCode::OutOfRange, what);
}

}  // namespace latdisc
