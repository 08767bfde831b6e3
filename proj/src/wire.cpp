#include "knet/wire.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "knet/kbformat.hpp"

namespace knet::wire {

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

ordered_json beliefs(const Network& network, const BeliefAssignment& beliefs,
                     std::optional<int> significant_digits) {
  ordered_json out = ordered_json::object();
  for (const auto& [id, probs] : beliefs) {
    const auto& states = network.at(id).states;
    ordered_json node = ordered_json::object();
    for (std::size_t s = 0; s < probs.size(); ++s)
      node[states[s]] = significant_digits ? round_significant(probs[s], *significant_digits)
                                           : probs[s];
    out[id] = std::move(node);
  }
  return out;
}

ordered_json findings(const Network& network, const Findings& findings) {
  ordered_json out = ordered_json::object();
  for (const auto& [id, state] : findings) out[id] = network.at(id).states.at(state);
  return out;
}

Findings parse_findings(const Network& network, const json& object) {
  if (!object.is_object())
    throw Error(ErrorCode::SchemaError, "findings must be an object {node: state}");
  Findings out;
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (!it.value().is_string())
      throw Error(ErrorCode::SchemaError, "state for '" + it.key() + "' must be a label");
    out[it.key()] = state_index(network, it.key(), it.value().get<std::string>());
  }
  check_findings(network, out);
  return out;
}

std::pair<NodeId, std::size_t> parse_assignment(const Network& network,
                                                std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw Error(ErrorCode::SchemaError,
                "expected NODE=STATE, got '" + std::string(text) + "'");
  NodeId node(text.substr(0, eq));
  const std::size_t state = state_index(network, node, text.substr(eq + 1));
  check_findings(network, {{node, state}});
  return {node, state};
}

ordered_json recommendation(const Network& network, const Recommendation& rec) {
  ordered_json ranking = ordered_json::array();
  for (const auto& entry : rec.ranking) {
    ordered_json config = ordered_json::object();
    for (const auto& [id, alt] : entry.configuration)
      config[id] = network.at(id).states.at(alt);
    ordered_json item = {{"configuration", std::move(config)}, {"index", entry.index}};
    if (entry.feasible) {
      item["expected_utility"] = entry.expected_utility;
      item["normalized_score"] = entry.normalized_score;
    } else {
      item["expected_utility"] = nullptr;
      item["normalized_score"] = nullptr;
    }
    item["feasible"] = entry.feasible;
    ranking.push_back(std::move(item));
  }
  ordered_json out = ordered_json::object();
  out["best"] = ranking.empty() ? ordered_json(nullptr) : ranking.front();
  out["ranking"] = std::move(ranking);
  return out;
}

ordered_json history(const Session& session) {
  return ordered_json::parse(session.export_document()["events"].dump());
}

ordered_json network_view(const Network& network, bool include_tables) {
  auto doc = ordered_json::parse(serialize(network));
  ordered_json out = ordered_json::object();
  out["name"] = doc["name"];
  out["kind"] = doc["kind"];
  ordered_json nodes = ordered_json::array();
  for (auto& node : doc["nodes"]) {
    if (!include_tables) {
      node.erase("cpt");
      node.erase("utilities");
    }
    nodes.push_back(std::move(node));
  }
  out["nodes"] = std::move(nodes);
  return out;
}

ordered_json validation_report(const ValidationReport& report) {
  ordered_json issues = ordered_json::array();
  for (const auto& issue : report.issues) {
    ordered_json item = {{"rule", std::string(to_string(issue.rule))},
                         {"nodes", issue.nodes}};
    item["row"] = issue.row ? ordered_json(*issue.row) : ordered_json(nullptr);
    item["message"] = issue.message;
    issues.push_back(std::move(item));
  }
  return {{"valid", report.ok()}, {"issues", std::move(issues)}};
}

ordered_json error(const Error& e) {
  return {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

}  // namespace knet::wire
