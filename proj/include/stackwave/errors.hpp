#pragma once

#include <stdexcept>
#include <string>

namespace stackwave {

// Exit codes are part of the CLI contract; each error class maps to one.
enum class ExitCode : int {
  kOk = 0,
  kIo = 1,
  kValidation = 2,
  kInfeasible = 3,
  kVerifyFailed = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// File missing, unreadable or unwritable.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

// Malformed input data, bad parameters, corrupt or mismatched metadata.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ExitCode::kValidation, what) {}
};

// Configuration that cannot satisfy the requested losslessness guarantee.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what)
      : Error(ExitCode::kInfeasible, what) {}
};

}  // namespace stackwave
