#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "knet/error.hpp"

namespace knet {

using NodeId = std::string;

enum class NodeKind { Chance, Decision, Value };
enum class NetworkKind { Belief, Decision };

std::string_view to_string(NodeKind kind);
std::string_view to_string(NetworkKind kind);

struct Display {
  double x = 0.0;
  double y = 0.0;
  std::array<int, 3> color{0, 0, 0};
  double shade = 0.0;

  bool operator==(const Display&) const = default;
};

/// Presentation data carried by a node. Never read by inference.
struct NodeMeta {
  std::string name;
  std::string question;
  std::string description;
  Display display;

  bool operator==(const NodeMeta&) const = default;
};

/// One node of a belief or decision network.
///
/// `states` holds the state labels of a chance node or the alternatives of a
/// decision node and is empty for a value node. `cpt` is used by chance nodes
/// only: one row per parent configuration (see config_index), one column per
/// state. `utilities` is used by value nodes only, indexed the same way.
struct Node {
  NodeId id;
  NodeKind kind = NodeKind::Chance;
  std::vector<std::string> states;
  std::vector<NodeId> parents;
  std::vector<std::vector<double>> cpt;
  std::vector<double> utilities;
  NodeMeta meta;
  /// Unrecognised keys kept by a lenient parse, emitted again on serialize.
  nlohmann::json extra = nlohmann::json::object();

  std::size_t cardinality() const { return states.size(); }
  bool operator==(const Node&) const = default;
};

struct Network {
  std::string name;
  NetworkKind kind = NetworkKind::Belief;
  std::vector<Node> nodes;
  nlohmann::json extra = nlohmann::json::object();

  const Node* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  /// Throws UnknownNode.
  const Node& at(std::string_view id) const;
  /// Cardinalities of the node's parents in declaration order; throws
  /// UnknownNode when a parent does not resolve.
  std::vector<std::size_t> parent_cardinalities(const Node& node) const;

  bool operator==(const Network&) const = default;
};

// ---------------------------------------------------------------------------
// Validation

inline constexpr double kRowTolerance = 1e-6;
inline constexpr double kInferenceTolerance = 1e-9;

enum class Rule {
  EmptyId,
  DuplicateId,
  UnknownParent,
  DuplicateParent,
  Acyclicity,
  TooFewStates,
  DuplicateState,
  UnexpectedTable,
  CptShape,
  RowNormalization,
  ProbabilityRange,
  MissingParents,
  ValueNodeHasChildren,
  UtilityCount,
  NonFiniteUtility,
  DisplayRange,
  NetworkKindMismatch,
  MissingDecisionNode,
  ValueNodeCount,
};

std::string_view to_string(Rule rule);

struct ValidationIssue {
  Rule rule;
  std::vector<NodeId> nodes;
  std::optional<std::size_t> row;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool has(Rule rule) const;
  std::string to_string() const;
};

/// Checks every structural and numeric invariant. Never throws; each
/// violation is reported with the offending node ids and rule.
ValidationReport validate(const Network& network);

/// Thrown by operations that require a valid network.
class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

// ---------------------------------------------------------------------------
// Structure helpers

/// Row index of a parent configuration: the last parent varies fastest,
/// idx = sum_k a_k * prod_{j>k} card_j. Throws IndexOutOfRange.
std::size_t config_index(std::span<const std::size_t> cardinalities,
                         std::span<const std::size_t> assignment);

/// Inverse of config_index. Throws IndexOutOfRange.
std::vector<std::size_t> config_assignment(
    std::span<const std::size_t> cardinalities, std::size_t index);

/// Product of cardinalities (1 for an empty list).
std::size_t config_count(std::span<const std::size_t> cardinalities);

/// Parents before children; ties broken by lexicographic node id.
/// Throws CyclicGraph.
std::vector<NodeId> topological_order(const Network& network);

/// True iff the undirected skeleton of the chance-node subgraph is a forest.
bool is_polytree(const Network& network);

}  // namespace knet
