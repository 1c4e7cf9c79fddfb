#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace echoqm {

/// Every failure the library can report. Each category maps to one CLI exit code.
enum class ErrorCode {
  InvalidArgument,
  ConfigParse,
  ConfigValidation,
  BadHorizon,
  TruncationOverflow,
  ConvergenceFailure,
  NonHermitianResult,
  DegenerateDistribution,
  ZeroPhotonProbe,
  MixedStateInput,
  InsufficientPoints,
  NonPositiveData,
  AllRealizationsFailed,
  SchemaMismatch,
  IoError,
};

std::string_view error_name(ErrorCode code);

/// Process exit status used by the command-line tool for `code`.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace echoqm
