#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rdsmb {

enum class ErrorKind {
  kTagMismatch,
  kOverflow,
  kInvalidArgument,
  kInvalidDistribution,
  kEmptySet,
  kOutOfRange,
  kEnumerationTooLarge,
  kInfiniteInformation,
  kHypothesisFailure,
  kUnsupportedModel,
  kTooFewSamples,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this one exception type; the
// kind lets callers (and the CLI exit-code mapping) tell them apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTagMismatch: return "tag mismatch";
    case ErrorKind::kOverflow: return "integer overflow";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kInvalidDistribution: return "invalid distribution";
    case ErrorKind::kEmptySet: return "empty set";
    case ErrorKind::kOutOfRange: return "out of range";
    case ErrorKind::kEnumerationTooLarge: return "enumeration too large";
    case ErrorKind::kInfiniteInformation: return "infinite information";
    case ErrorKind::kHypothesisFailure: return "hypothesis failure";
    case ErrorKind::kUnsupportedModel: return "unsupported model";
    case ErrorKind::kTooFewSamples: return "too few samples";
  }
  return "error";
}

}  // namespace rdsmb
