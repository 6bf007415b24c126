#pragma once

#include <stdexcept>
#include <string>

namespace gradflow {

enum class ErrorKind {
  Parse,
  Validation,
  Config,
  Numeric,
  IO,
  Generation,
  State,
  Resource,
  Hypothesis,
  Degenerate,
  NoPrediction,
};

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char* kind_name(ErrorKind kind);

/// parse/config = 2, validation-like = 3, numeric/resource = 4, io = 5.
int exit_code(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace gradflow
