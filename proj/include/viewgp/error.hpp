#pragma once

#include <stdexcept>
#include <string>

namespace viewgp {

/// Error categories. Values match the CLI exit codes, except that an invalid
/// optimizer start is reported as a numerical failure (see exit_code).
enum class ErrorCode : int {
  kInvalidInput = 2,
  kIo = 3,
  kEmptyResult = 4,
  kIllConditioned = 5,
  kInvalidInitialization = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline int exit_code(ErrorCode code) noexcept {
  return code == ErrorCode::kInvalidInitialization ? 5 : static_cast<int>(code);
}

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidInput, what);
}

}  // namespace viewgp
