#include "knet/error.hpp"

namespace knet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::CyclicGraph: return "CyclicGraph";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ImpossibleEvidence: return "ImpossibleEvidence";
    case ErrorCode::NotPolytree: return "NotPolytree";
    case ErrorCode::WrongNetworkKind: return "WrongNetworkKind";
    case ErrorCode::MalformedDecisionNetwork: return "MalformedDecisionNetwork";
    case ErrorCode::TooManyConfigurations: return "TooManyConfigurations";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotInstantiable: return "NotInstantiable";
    case ErrorCode::NotAsserted: return "NotAsserted";
    case ErrorCode::NotDecisionNetwork: return "NotDecisionNetwork";
  }
  return "Unknown";
}

}  // namespace knet
