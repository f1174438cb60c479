#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfprm {

enum class ErrorCategory { kData, kNumeric, kUsage };

/// Base of every error raised by the library. `kind()` is a stable,
/// machine-readable name used by the CLI's one-line error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what, ErrorCategory category = ErrorCategory::kData)
      : std::runtime_error(what), kind_(std::move(kind)), category_(category) {}

  const std::string& kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_; }

 private:
  std::string kind_;
  ErrorCategory category_;
};

#define CFPRM_DEFINE_ERROR(Name, Category)                                  \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& what) : Error(#Name, what, Category) {} \
  };

CFPRM_DEFINE_ERROR(ContiguityError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(EmptyStepError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(EmptyTrajectoryError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(DimensionMismatch, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(NoCorrectStepsError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(EmptyCorpusError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(EmptyPoolError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(InsufficientPoolError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(CheckpointError, ErrorCategory::kData)
CFPRM_DEFINE_ERROR(ConfigError, ErrorCategory::kUsage)

#undef CFPRM_DEFINE_ERROR

/// Errors tied to a line of an input file (1-based).
class LineError : public Error {
 public:
  LineError(std::string kind, std::size_t line, const std::string& what)
      : Error(std::move(kind), "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public LineError {
 public:
  ParseError(std::size_t line, const std::string& what) : LineError("ParseError", line, what) {}
};

class LabelDomainError : public LineError {
 public:
  LabelDomainError(std::size_t line, const std::string& what)
      : LineError("LabelDomainError", line, what) {}
};

/// Raised by the trainer when a loss turns NaN/inf. Carries the partial
/// run manifest (serialized JSON) so the CLI can still write it out.
class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(const std::string& what, std::string manifest_json)
      : Error("NonFiniteLossError", what, ErrorCategory::kNumeric),
        manifest_json_(std::move(manifest_json)) {}
  const std::string& manifest_json() const noexcept { return manifest_json_; }

 private:
  std::string manifest_json_;
};

}  // namespace cfprm
