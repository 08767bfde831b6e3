#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "knet/model.hpp"

namespace knet {

/// Observed state index per node.
using Findings = std::map<NodeId, std::size_t>;

/// Posterior distribution per chance node, keyed (and ordered) by node id.
using BeliefAssignment = std::map<NodeId, std::vector<double>>;

/// Sorted ids of the conditioning nodes.
using LoopCutset = std::vector<NodeId>;

struct InferenceResult {
  BeliefAssignment beliefs;
  /// P(findings); 1 for empty findings (up to CPT rounding).
  double evidence_probability = 1.0;
};

/// Messages exchanged along one arc parent -> child, both over the parent's
/// states.
struct ArcMessages {
  NodeId parent;
  NodeId child;
  std::vector<double> pi;      ///< causal support sent parent -> child
  std::vector<double> lambda;  ///< diagnostic support sent child -> parent
};

struct SupportVectors {
  std::map<NodeId, std::vector<double>> pi;
  std::map<NodeId, std::vector<double>> lambda;
  std::vector<ArcMessages> arcs;
};

struct PolytreeResult : InferenceResult {
  SupportVectors support;
};

struct OracleOptions {
  /// Upper bound on the product of all chance-node cardinalities.
  std::size_t max_states = std::size_t{1} << 20;
};

struct InferenceOptions {
  std::size_t max_cutset_instantiations = 4096;
};

/// Throws UnknownNode, InvalidState or NotInstantiable (value nodes).
void check_findings(const Network& network, const Findings& findings);

/// Brute-force posterior by enumerating every joint configuration of a belief
/// network. Throws TooLarge, ImpossibleEvidence, WrongNetworkKind.
InferenceResult oracle_joint(const Network& network, const Findings& findings,
                             OracleOptions options = {});

/// Two-sweep pi/lambda message passing on a singly connected belief network.
/// Throws NotPolytree, ImpossibleEvidence, WrongNetworkKind.
PolytreeResult propagate_polytree(const Network& network, const Findings& findings);

/// Greedy loop cutset; empty iff the network is a polytree.
LoopCutset find_loop_cutset(const Network& network);

/// Exact posterior for any valid belief network: direct propagation on
/// polytrees, loop-cutset conditioning otherwise. Throws ImpossibleEvidence,
/// TooLarge, WrongNetworkKind.
InferenceResult infer(const Network& network, const Findings& findings,
                      InferenceOptions options = {});

}  // namespace knet
