#pragma once

// Index-based view of a belief network shared by the inference engines.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "knet/inference.hpp"

namespace knet::detail {

struct IndexedNetwork {
  std::vector<NodeId> ids;
  std::vector<std::size_t> card;
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<std::size_t>> children;
  /// Row-major: cpt[v][row * card[v] + state].
  std::vector<std::vector<double>> cpt;

  std::size_t size() const { return ids.size(); }
};

using Evidence = std::vector<std::optional<std::size_t>>;

/// Throws WrongNetworkKind unless the network is a belief network.
IndexedNetwork index_network(const Network& network);

/// Validates the findings and maps them onto node indices.
Evidence to_evidence(const Network& network, const Findings& findings);

/// True iff the undirected skeleton has no cycle.
bool skeleton_is_forest(std::span<const std::vector<std::size_t>> parents);

/// Cutset over a structure given by parent lists, deterministic given the
/// order of `ids`. Returned indices are sorted by id.
std::vector<std::size_t> greedy_loop_cutset(
    std::span<const NodeId> ids, std::span<const std::vector<std::size_t>> parents);

/// Removes every arc leaving a node in `fixed`, slicing each child's CPT at
/// the fixed state of that parent.
IndexedNetwork cut_outgoing_arcs(const IndexedNetwork& net,
                                 std::span<const std::size_t> fixed,
                                 std::span<const std::size_t> states);

struct PolytreeOutcome {
  /// Product of the per-component normalisers; zero means impossible evidence.
  double evidence_probability = 0.0;
  std::vector<std::vector<double>> pi;
  std::vector<std::vector<double>> lambda;
  std::vector<std::vector<double>> belief;  ///< normalised; empty when impossible
  std::vector<std::vector<double>> arc_pi;
  std::vector<std::vector<double>> arc_lambda;
  /// (parent, child) per arc, matching arc_pi / arc_lambda.
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
};

/// Requires a forest skeleton (not rechecked here).
PolytreeOutcome run_polytree(const IndexedNetwork& net, const Evidence& evidence);

}  // namespace knet::detail
