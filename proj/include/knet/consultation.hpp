#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "knet/decision.hpp"
#include "knet/inference.hpp"

namespace knet {

enum class EventKind { Created, Asserted, Retracted, Rejected };

std::string_view to_string(EventKind kind);

struct SessionEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Created;
  std::optional<NodeId> node;
  std::optional<std::size_t> state;
  /// Wall-clock, ISO 8601 UTC. Informational only.
  std::string timestamp;
};

struct WhatIfResult {
  BeliefAssignment beliefs;
  std::optional<Recommendation> recommendation;
};

/// A consultation over one network. Beliefs always equal
/// chance_posteriors(network, findings); the recommendation is computed on
/// demand and cached until the findings change.
///
/// Not thread-safe: calls on one session must be serialised by the caller.
class Session {
 public:
  explicit Session(std::shared_ptr<const Network> network, std::string kb_name = {});

  const std::string& id() const { return id_; }
  const std::string& kb_name() const { return kb_name_; }
  const Network& network() const { return *network_; }
  std::shared_ptr<const Network> shared_network() const { return network_; }
  const Findings& findings() const { return findings_; }
  const BeliefAssignment& beliefs() const { return beliefs_; }
  const std::vector<SessionEvent>& history() const { return history_; }

  /// Replaces any previous finding on the node. On ImpossibleEvidence the
  /// findings and beliefs are untouched, a Rejected event is recorded and the
  /// error is rethrown. Throws UnknownNode, InvalidState, NotInstantiable.
  const BeliefAssignment& assert_finding(const NodeId& node, std::size_t state);
  const BeliefAssignment& assert_finding(const NodeId& node, std::string_view label);

  /// Throws NotAsserted.
  const BeliefAssignment& retract_finding(const NodeId& node);

  /// Beliefs (and recommendation, for decision networks) under the current
  /// findings overridden by `overlay`. Does not modify the session.
  WhatIfResult what_if(const Findings& overlay) const;

  /// Throws NotDecisionNetwork.
  const Recommendation& recommendation();

  /// {kb_name, events: [...]} with state labels.
  nlohmann::json export_document() const;

  /// Rebuilds a session by re-issuing the exported events. Throws
  /// SchemaError when the document is malformed or the replay diverges.
  static Session replay(std::shared_ptr<const Network> network,
                        const nlohmann::json& document);

 private:
  void record(EventKind kind, std::optional<NodeId> node,
              std::optional<std::size_t> state);

  std::shared_ptr<const Network> network_;
  std::string kb_name_;
  std::string id_;
  Findings findings_;
  BeliefAssignment beliefs_;
  std::optional<Recommendation> recommendation_;
  std::vector<SessionEvent> history_;
};

/// new_session: fresh findings, prior beliefs, history = [Created].
Session new_session(std::shared_ptr<const Network> network, std::string kb_name = {});

/// Index of `label` among the node's states; throws UnknownNode/InvalidState.
std::size_t state_index(const Network& network, const NodeId& node, std::string_view label);

}  // namespace knet
