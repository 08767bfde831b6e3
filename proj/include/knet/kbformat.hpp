#pragma once

#include <string>
#include <string_view>

#include "knet/model.hpp"

namespace knet {

inline constexpr std::string_view kFormatTag = "knet-kb";
inline constexpr int kFormatVersion = 1;
inline constexpr std::string_view kKbExtension = ".knet.json";

struct ParseOptions {
  /// Strict mode rejects unknown top-level and node-level keys; lenient mode
  /// keeps them in Network::extra / Node::extra.
  bool strict = true;
};

/// Parses the document structure only. Throws SchemaError or VersionError
/// with the offending field path (and line, for syntax errors). The result
/// may still violate model invariants.
Network parse_document(std::string_view text, ParseOptions options = {});

/// parse_document followed by validate; throws ValidationFailure when the
/// network is well-formed JSON but not a valid network.
Network parse(std::string_view text, ParseOptions options = {});

/// Canonical text: fixed key order, nodes sorted by id, shortest round-trip
/// decimals. Equal networks serialize to identical bytes.
std::string serialize(const Network& network);

/// serialize(parse(text)).
std::string canonicalize(std::string_view text, ParseOptions options = {});

Network load_file(const std::string& path, ParseOptions options = {});

}  // namespace knet
