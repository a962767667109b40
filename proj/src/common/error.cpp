#include "common/error.hpp"

namespace speakloop {

const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kEmptySeries: return "empty_series";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kTraining: return "training";
    case ErrorKind::kVersion: return "version";
    case ErrorKind::kDegenerate: return "degenerate_input";
    case ErrorKind::kUndefinedStatistic: return "undefined_statistic";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kPermission: return "permission";
    case ErrorKind::kInternal: return "internal";
  }
  return "internal";
}

}  // namespace speakloop
