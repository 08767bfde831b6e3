#include "knet/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace knet {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Chance: return "chance";
    case NodeKind::Decision: return "decision";
    case NodeKind::Value: return "value";
  }
  return "?";
}

std::string_view to_string(NetworkKind kind) {
  return kind == NetworkKind::Belief ? "belief" : "decision";
}

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::EmptyId: return "EmptyId";
    case Rule::DuplicateId: return "DuplicateId";
    case Rule::UnknownParent: return "UnknownParent";
    case Rule::DuplicateParent: return "DuplicateParent";
    case Rule::Acyclicity: return "Acyclicity";
    case Rule::TooFewStates: return "TooFewStates";
    case Rule::DuplicateState: return "DuplicateState";
    case Rule::UnexpectedTable: return "UnexpectedTable";
    case Rule::CptShape: return "CptShape";
    case Rule::RowNormalization: return "RowNormalization";
    case Rule::ProbabilityRange: return "ProbabilityRange";
    case Rule::MissingParents: return "MissingParents";
    case Rule::ValueNodeHasChildren: return "ValueNodeHasChildren";
    case Rule::UtilityCount: return "UtilityCount";
    case Rule::NonFiniteUtility: return "NonFiniteUtility";
    case Rule::DisplayRange: return "DisplayRange";
    case Rule::NetworkKindMismatch: return "NetworkKindMismatch";
    case Rule::MissingDecisionNode: return "MissingDecisionNode";
    case Rule::ValueNodeCount: return "ValueNodeCount";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Network lookups

const Node* Network::find(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [&](const Node& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

std::optional<std::size_t> Network::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return i;
  return std::nullopt;
}

const Node& Network::at(std::string_view id) const {
  if (const Node* n = find(id)) return *n;
  throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
}

std::vector<std::size_t> Network::parent_cardinalities(const Node& node) const {
  std::vector<std::size_t> cards;
  cards.reserve(node.parents.size());
  for (const auto& p : node.parents) cards.push_back(at(p).cardinality());
  return cards;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(Rule rule) const {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.rule == rule; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << knet::to_string(issue.rule);
    if (!issue.nodes.empty()) {
      out << " [";
      for (std::size_t i = 0; i < issue.nodes.size(); ++i)
        out << (i ? "," : "") << issue.nodes[i];
      out << "]";
    }
    if (issue.row) out << " row " << *issue.row;
    out << ": " << issue.message << "\n";
  }
  return out.str();
}

ValidationFailure::ValidationFailure(ValidationReport report)
    : Error(ErrorCode::ValidationError,
            report.issues.empty()
                ? std::string("validation failed")
                : std::string(to_string(report.issues.front().rule)) + ": " +
                      report.issues.front().message),
      report_(std::move(report)) {}

namespace {

constexpr std::size_t kMaxTableRows = std::size_t{1} << 26;

class Validator {
 public:
  explicit Validator(const Network& net) : net_(net) {
    for (std::size_t i = 0; i < net.nodes.size(); ++i)
      index_.emplace(net.nodes[i].id, i);
  }

  ValidationReport run() {
    check_ids();
    for (const auto& node : net_.nodes) check_node(node);
    check_cycles();
    check_kind();
    return std::move(report_);
  }

 private:
  void add(Rule rule, std::vector<NodeId> nodes, std::string message,
           std::optional<std::size_t> row = std::nullopt) {
    report_.issues.push_back({rule, std::move(nodes), row, std::move(message)});
  }

  const Node* lookup(const NodeId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &net_.nodes[it->second];
  }

  void check_ids() {
    std::set<NodeId> seen, reported;
    for (const auto& node : net_.nodes) {
      if (node.id.empty()) add(Rule::EmptyId, {}, "node id is empty");
      if (!seen.insert(node.id).second && reported.insert(node.id).second)
        add(Rule::DuplicateId, {node.id}, "node id declared more than once");
    }
  }

  // Number of table rows implied by the parents, or nullopt when a parent
  // does not resolve to a chance/decision node (already reported).
  std::optional<std::size_t> expected_rows(const Node& node) const {
    std::size_t rows = 1;
    for (const auto& p : node.parents) {
      const Node* parent = lookup(p);
      if (!parent || parent->kind == NodeKind::Value || parent->states.empty())
        return std::nullopt;
      rows *= parent->cardinality();
      if (rows > kMaxTableRows) return std::nullopt;
    }
    return rows;
  }

  void check_node(const Node& node) {
    const bool is_value = node.kind == NodeKind::Value;

    if (!is_value) {
      const char* what = node.kind == NodeKind::Chance ? "states" : "alternatives";
      if (node.states.size() < 2)
        add(Rule::TooFewStates, {node.id},
            std::string("needs at least 2 ") + what);
      std::set<std::string> labels;
      for (const auto& s : node.states)
        if (!labels.insert(s).second)
          add(Rule::DuplicateState, {node.id}, "duplicate label '" + s + "'");
    } else {
      if (!node.states.empty())
        add(Rule::UnexpectedTable, {node.id}, "value node declares states");
      if (node.parents.empty())
        add(Rule::MissingParents, {node.id}, "value node has no parents");
    }

    std::set<NodeId> parents;
    for (const auto& p : node.parents) {
      if (!parents.insert(p).second)
        add(Rule::DuplicateParent, {node.id, p}, "parent listed twice");
      const Node* parent = lookup(p);
      if (!parent) {
        add(Rule::UnknownParent, {node.id, p}, "parent '" + p + "' does not exist");
      } else if (parent->kind == NodeKind::Value) {
        add(Rule::ValueNodeHasChildren, {p, node.id},
            "value node '" + p + "' has a child");
      }
    }

    switch (node.kind) {
      case NodeKind::Chance: check_cpt(node); break;
      case NodeKind::Decision:
        if (!node.cpt.empty() || !node.utilities.empty())
          add(Rule::UnexpectedTable, {node.id}, "decision node carries a table");
        break;
      case NodeKind::Value: check_utilities(node); break;
    }

    const auto& d = node.meta.display;
    bool display_ok = std::isfinite(d.x) && std::isfinite(d.y) &&
                      std::isfinite(d.shade) && d.shade >= 0.0 && d.shade <= 1.0;
    for (int c : d.color) display_ok = display_ok && c >= 0 && c <= 255;
    if (!display_ok)
      add(Rule::DisplayRange, {node.id}, "display metadata out of range");
  }

  void check_cpt(const Node& node) {
    if (!node.utilities.empty())
      add(Rule::UnexpectedTable, {node.id}, "chance node carries utilities");
    auto rows = expected_rows(node);
    if (rows && node.cpt.size() != *rows) {
      add(Rule::CptShape, {node.id},
          "expected " + std::to_string(*rows) + " cpt rows, got " +
              std::to_string(node.cpt.size()));
    }
    for (std::size_t r = 0; r < node.cpt.size(); ++r) {
      const auto& row = node.cpt[r];
      if (row.size() != node.states.size()) {
        add(Rule::CptShape, {node.id},
            "expected " + std::to_string(node.states.size()) + " columns, got " +
                std::to_string(row.size()),
            r);
        continue;
      }
      bool in_range = true;
      double sum = 0.0;
      for (double p : row) {
        in_range = in_range && std::isfinite(p) && p >= 0.0 && p <= 1.0;
        sum += p;
      }
      if (!in_range) {
        add(Rule::ProbabilityRange, {node.id}, "entry outside [0,1]", r);
      } else if (std::abs(sum - 1.0) > kRowTolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "row sums to " << sum;
        add(Rule::RowNormalization, {node.id}, msg.str(), r);
      }
    }
  }

  void check_utilities(const Node& node) {
    if (!node.cpt.empty())
      add(Rule::UnexpectedTable, {node.id}, "value node carries a cpt");
    auto rows = expected_rows(node);
    if (rows && node.utilities.size() != *rows)
      add(Rule::UtilityCount, {node.id},
          "expected " + std::to_string(*rows) + " utilities, got " +
              std::to_string(node.utilities.size()));
    for (double u : node.utilities) {
      if (!std::isfinite(u)) {
        add(Rule::NonFiniteUtility, {node.id}, "utility is not finite");
        break;
      }
    }
  }

  // Tarjan's strongly connected components over resolved arcs.
  void check_cycles() {
    const std::size_t n = net_.nodes.size();
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& p : net_.nodes[i].parents) {
        auto it = index_.find(p);
        if (it != index_.end()) children[it->second].push_back(i);
      }

    std::vector<int> order(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int counter = 0;
    std::vector<std::vector<NodeId>> cycles;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
      order[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = true;
      for (std::size_t w : children[v]) {
        if (order[w] < 0) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], order[w]);
        }
      }
      if (low[v] != order[v]) return;
      std::vector<std::size_t> component;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.push_back(w);
      } while (w != v);
      bool self_loop = std::find(children[v].begin(), children[v].end(), v) !=
                       children[v].end();
      if (component.size() > 1 || self_loop) {
        std::vector<NodeId> ids;
        for (std::size_t c : component) ids.push_back(net_.nodes[c].id);
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        cycles.push_back(std::move(ids));
      }
    };
    for (std::size_t i = 0; i < n; ++i)
      if (order[i] < 0) visit(i);

    std::sort(cycles.begin(), cycles.end());
    for (auto& ids : cycles)
      add(Rule::Acyclicity, std::move(ids), "arcs form a directed cycle");
  }

  void check_kind() {
    std::vector<NodeId> decisions, values;
    for (const auto& node : net_.nodes) {
      if (node.kind == NodeKind::Decision) decisions.push_back(node.id);
      if (node.kind == NodeKind::Value) values.push_back(node.id);
    }
    if (net_.kind == NetworkKind::Belief) {
      if (!decisions.empty())
        add(Rule::NetworkKindMismatch, decisions,
            "belief network contains decision nodes");
      if (!values.empty())
        add(Rule::NetworkKindMismatch, values,
            "belief network contains value nodes");
    } else {
      if (decisions.empty())
        add(Rule::MissingDecisionNode, {}, "decision network has no decision node");
      if (values.size() != 1)
        add(Rule::ValueNodeCount, values,
            "decision network needs exactly one value node, found " +
                std::to_string(values.size()));
    }
  }

  const Network& net_;
  std::map<NodeId, std::size_t> index_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const Network& network) {
  return Validator(network).run();
}

// ---------------------------------------------------------------------------
// Configuration indexing

std::size_t config_count(std::span<const std::size_t> cardinalities) {
  std::size_t count = 1;
  for (std::size_t c : cardinalities) count *= c;
  return count;
}

std::size_t config_index(std::span<const std::size_t> cardinalities,
                         std::span<const std::size_t> assignment) {
  if (cardinalities.size() != assignment.size())
    throw Error(ErrorCode::IndexOutOfRange,
                "assignment length does not match parent count");
  std::size_t index = 0;
  for (std::size_t k = 0; k < cardinalities.size(); ++k) {
    if (assignment[k] >= cardinalities[k])
      throw Error(ErrorCode::IndexOutOfRange,
                  "state index " + std::to_string(assignment[k]) +
                      " out of range for cardinality " +
                      std::to_string(cardinalities[k]));
    index = index * cardinalities[k] + assignment[k];
  }
  return index;
}

std::vector<std::size_t> config_assignment(
    std::span<const std::size_t> cardinalities, std::size_t index) {
  if (index >= config_count(cardinalities))
    throw Error(ErrorCode::IndexOutOfRange,
                "configuration index " + std::to_string(index) + " out of range");
  std::vector<std::size_t> assignment(cardinalities.size());
  for (std::size_t k = cardinalities.size(); k-- > 0;) {
    assignment[k] = index % cardinalities[k];
    index /= cardinalities[k];
  }
  return assignment;
}

// ---------------------------------------------------------------------------
// Graph structure

std::vector<NodeId> topological_order(const Network& network) {
  std::map<NodeId, std::size_t> pending;
  std::map<NodeId, std::vector<NodeId>> children;
  for (const auto& node : network.nodes) pending[node.id];
  for (const auto& node : network.nodes)
    for (const auto& p : node.parents)
      if (pending.count(p)) {
        ++pending[node.id];
        children[p].push_back(node.id);
      }

  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (const auto& [id, count] : pending)
    if (count == 0) ready.push(id);

  std::vector<NodeId> order;
  while (!ready.empty()) {
    NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (const auto& child : children[id])
      if (--pending[child] == 0) ready.push(child);
  }
  if (order.size() != pending.size())
    throw Error(ErrorCode::CyclicGraph, "network contains a directed cycle");
  return order;
}

bool is_polytree(const Network& network) {
  std::map<NodeId, std::size_t> chance;
  for (const auto& node : network.nodes)
    if (node.kind == NodeKind::Chance) chance.emplace(node.id, chance.size());

  std::vector<std::size_t> root(chance.size());
  std::iota(root.begin(), root.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };

  for (const auto& node : network.nodes) {
    if (node.kind != NodeKind::Chance) continue;
    for (const auto& p : node.parents) {
      auto it = chance.find(p);
      if (it == chance.end()) continue;
      std::size_t a = find(chance.at(node.id)), b = find(it->second);
      if (a == b) return false;
      root[a] = b;
    }
  }
  return true;
}

}  // namespace knet
