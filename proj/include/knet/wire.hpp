#pragma once

// JSON renderings shared by the CLI, the HTTP service and the Python module.
// State labels, never indices, appear on the wire.

#include <optional>

#include "json.hpp"

#include "knet/consultation.hpp"
#include "knet/decision.hpp"

namespace knet::wire {

using nlohmann::json;
using nlohmann::ordered_json;

/// Rounds to `digits` significant decimal digits.
double round_significant(double value, int digits);

/// {node: {label: p, ...}, ...}; nodes by id, states in declared order.
ordered_json beliefs(const Network& network, const BeliefAssignment& beliefs,
                     std::optional<int> significant_digits = std::nullopt);

ordered_json findings(const Network& network, const Findings& findings);

/// Parses {node: label, ...}. Throws SchemaError, UnknownNode, InvalidState.
Findings parse_findings(const Network& network, const json& object);

/// Parses "NODE=STATE". Throws SchemaError, UnknownNode, InvalidState.
std::pair<NodeId, std::size_t> parse_assignment(const Network& network,
                                                std::string_view text);

ordered_json recommendation(const Network& network, const Recommendation& rec);

ordered_json history(const Session& session);

/// Network structure for display: kinds, states, parents, meta; tables only
/// when requested.
ordered_json network_view(const Network& network, bool include_tables);

ordered_json validation_report(const ValidationReport& report);

ordered_json error(const Error& e);

}  // namespace knet::wire
