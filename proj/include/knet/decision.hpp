#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "knet/inference.hpp"

namespace knet {

inline constexpr std::string_view kProxyHigh = "high";
inline constexpr std::string_view kProxyLow = "low";

/// A decision network recast as a belief network. Decision nodes become
/// chance nodes with uniform tables; the value node becomes a binary proxy
/// (high, low) with P(high | cfg) = (u(cfg) - u_min) / (u_max - u_min).
struct TransformedNetwork {
  Network network;
  double u_min = 0.0;
  double u_max = 0.0;
  NodeId value_proxy;
};

/// Throws MalformedDecisionNetwork.
TransformedNetwork belief_transform(const Network& decision_network);

/// Alternative index per free decision node.
using DecisionConfiguration = std::map<NodeId, std::size_t>;

struct EvaluatedDecision {
  DecisionConfiguration configuration;
  /// config_index over the free decision nodes sorted by id.
  std::size_t index = 0;
  double expected_utility = 0.0;
  double normalized_score = 0.0;
  /// False when findings plus this configuration have zero probability; such
  /// entries are ranked last and their utility fields are meaningless.
  bool feasible = true;
};

/// Normalized scores closer than this rank as ties.
inline constexpr double kTieTolerance = 1e-12;

struct Recommendation {
  /// Descending expected utility, ties (see kTieTolerance) by ascending
  /// index, infeasible last.
  std::vector<EvaluatedDecision> ranking;

  const EvaluatedDecision& best() const { return ranking.front(); }
};

struct DecisionOptions {
  std::size_t max_configurations = 1024;
  InferenceOptions inference;
};

/// Decision nodes not fixed by the findings, sorted by id.
std::vector<NodeId> free_decisions(const Network& network, const Findings& findings);

/// Throws ImpossibleEvidence, InvalidState (config not exactly the free
/// decisions), MalformedDecisionNetwork.
EvaluatedDecision evaluate_decision(const Network& network, const Findings& findings,
                                    const DecisionConfiguration& config,
                                    const DecisionOptions& options = {});

double expected_utility(const Network& network, const Findings& findings,
                        const DecisionConfiguration& config,
                        const DecisionOptions& options = {});

/// Throws TooManyConfigurations, ImpossibleEvidence (every configuration
/// impossible), MalformedDecisionNetwork.
Recommendation recommend(const Network& network, const Findings& findings,
                         const DecisionOptions& options = {});

enum class Engine { Exact, Oracle };

/// Posteriors of the chance nodes of either network kind. Decision networks
/// are evaluated through belief_transform; findings may fix decision nodes.
InferenceResult chance_posteriors(const Network& network, const Findings& findings,
                                  Engine engine = Engine::Exact,
                                  const InferenceOptions& options = {},
                                  const OracleOptions& oracle = {});

}  // namespace knet
