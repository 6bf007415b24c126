#include "gradflow/errors.hpp"

namespace gradflow {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(kind_name(kind)) + " error: " + message), kind_(kind) {}

const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Config: return "configuration";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::IO: return "io";
    case ErrorKind::Generation: return "generation";
    case ErrorKind::State: return "state";
    case ErrorKind::Resource: return "resource";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::Degenerate: return "degenerate-input";
    case ErrorKind::NoPrediction: return "no-prediction";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Config:
      return 2;
    case ErrorKind::Numeric:
    case ErrorKind::Resource:
      return 4;
    case ErrorKind::IO:
      return 5;
    default:
      return 3;
  }
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace gradflow
