#pragma once

// Compact constructors for hand-written test networks.

#include <algorithm>
#include <string>
#include <vector>

#include "knet/model.hpp"

namespace knet::testing {

inline Node chance(NodeId id, std::vector<std::string> states, std::vector<NodeId> parents,
                   std::vector<std::vector<double>> cpt) {
  Node node;
  node.meta.name = id;
  node.id = std::move(id);
  node.states = std::move(states);
  node.parents = std::move(parents);
  node.cpt = std::move(cpt);
  return node;
}

inline Node decision(NodeId id, std::vector<std::string> alternatives,
                     std::vector<NodeId> parents = {}) {
  Node node;
  node.meta.name = id;
  node.id = std::move(id);
  node.kind = NodeKind::Decision;
  node.states = std::move(alternatives);
  node.parents = std::move(parents);
  return node;
}

inline Node value(NodeId id, std::vector<NodeId> parents, std::vector<double> utilities) {
  Node node;
  node.meta.name = id;
  node.id = std::move(id);
  node.kind = NodeKind::Value;
  node.parents = std::move(parents);
  node.utilities = std::move(utilities);
  return node;
}

inline Network network(std::vector<Node> nodes, NetworkKind kind = NetworkKind::Belief,
                       std::string name = "test") {
  Network net;
  net.name = std::move(name);
  net.kind = kind;
  net.nodes = std::move(nodes);
  std::sort(net.nodes.begin(), net.nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  return net;
}

/// A→B with P(A=t)=0.2, P(B=t|A=t)=0.9, P(B=t|A=f)=0.1.
inline Network chain_ab() {
  return network({chance("A", {"t", "f"}, {}, {{0.2, 0.8}}),
                  chance("B", {"t", "f"}, {"A"}, {{0.9, 0.1}, {0.1, 0.9}})});
}

/// A→B, A→C, B→D, C→D with the given tables.
inline Network diamond(std::vector<std::vector<double>> a, std::vector<std::vector<double>> b,
                       std::vector<std::vector<double>> c, std::vector<std::vector<double>> d,
                       const std::string& prefix = "") {
  const std::vector<std::string> tf{"t", "f"};
  return network({chance(prefix + "A", tf, {}, std::move(a)),
                  chance(prefix + "B", tf, {prefix + "A"}, std::move(b)),
                  chance(prefix + "C", tf, {prefix + "A"}, std::move(c)),
                  chance(prefix + "D", tf, {prefix + "B", prefix + "C"}, std::move(d))});
}

inline Network numeric_diamond(const std::string& prefix = "") {
  return diamond({{0.3, 0.7}}, {{0.8, 0.2}, {0.25, 0.75}}, {{0.6, 0.4}, {0.1, 0.9}},
                 {{0.95, 0.05}, {0.7, 0.3}, {0.5, 0.5}, {0.0, 1.0}}, prefix);
}

}  // namespace knet::testing
