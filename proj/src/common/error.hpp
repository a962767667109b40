#pragma once

#include <stdexcept>
#include <string>

namespace speakloop {

enum class ErrorKind {
  kInvalidArgument,
  kEmptySeries,
  kFormat,
  kParameter,
  kNotFound,
  kTraining,
  kVersion,
  kDegenerate,
  kUndefinedStatistic,
  kIo,
  kPermission,
  kInternal,
};

const char* ErrorKindName(ErrorKind kind);

// All recoverable failures in the core are reported with this type; the C
// layer maps `kind()` onto an sl_status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace speakloop
