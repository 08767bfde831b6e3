#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knet {

/// Failure categories surfaced by every layer (library, CLI, service).
enum class ErrorCode {
  SchemaError,
  VersionError,
  ValidationError,
  IndexOutOfRange,
  CyclicGraph,
  TooLarge,
  ImpossibleEvidence,
  NotPolytree,
  WrongNetworkKind,
  MalformedDecisionNetwork,
  TooManyConfigurations,
  UnknownNode,
  InvalidState,
  NotInstantiable,
  NotAsserted,
  NotDecisionNetwork,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace knet
