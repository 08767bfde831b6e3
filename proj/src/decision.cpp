#include "knet/decision.hpp"

#include <algorithm>

namespace knet {

namespace {

const Node& value_node(const Network& network) {
  const Node* found = nullptr;
  for (const auto& node : network.nodes)
    if (node.kind == NodeKind::Value) found = &node;
  return *found;
}

struct Evaluator {
  TransformedNetwork transformed;
  const DecisionOptions& options;

  EvaluatedDecision evaluate(Findings findings, const DecisionConfiguration& config,
                             std::size_t index) const {
    EvaluatedDecision out;
    out.configuration = config;
    out.index = index;
    for (const auto& [id, alt] : config) findings[id] = alt;
    const auto result = infer(transformed.network, findings, options.inference);
    const double score =
        std::clamp(result.beliefs.at(transformed.value_proxy)[0], 0.0, 1.0);
    out.normalized_score = score;
    out.expected_utility =
        transformed.u_min + score * (transformed.u_max - transformed.u_min);
    return out;
  }
};

}  // namespace

TransformedNetwork belief_transform(const Network& network) {
  if (network.kind != NetworkKind::Decision)
    throw Error(ErrorCode::MalformedDecisionNetwork,
                "network '" + network.name + "' is not a decision network");
  auto report = validate(network);
  if (!report.ok())
    throw Error(ErrorCode::MalformedDecisionNetwork,
                "invalid decision network: " + report.issues.front().message);

  const Node& value = value_node(network);
  TransformedNetwork out;
  out.u_min = *std::min_element(value.utilities.begin(), value.utilities.end());
  out.u_max = *std::max_element(value.utilities.begin(), value.utilities.end());
  out.value_proxy = value.id;
  out.network.name = network.name;
  out.network.kind = NetworkKind::Belief;
  out.network.extra = network.extra;

  const double range = out.u_max - out.u_min;
  for (const auto& node : network.nodes) {
    Node copy = node;
    switch (node.kind) {
      case NodeKind::Chance: break;
      case NodeKind::Decision: {
        copy.kind = NodeKind::Chance;
        const std::size_t rows = config_count(network.parent_cardinalities(node));
        const std::vector<double> uniform(node.cardinality(),
                                          1.0 / static_cast<double>(node.cardinality()));
        copy.cpt.assign(rows, uniform);
        break;
      }
      case NodeKind::Value: {
        copy.kind = NodeKind::Chance;
        copy.states = {std::string(kProxyHigh), std::string(kProxyLow)};
        copy.utilities.clear();
        for (double u : node.utilities) {
          const double high = range > 0.0 ? (u - out.u_min) / range : 0.5;
          copy.cpt.push_back({high, 1.0 - high});
        }
        break;
      }
    }
    out.network.nodes.push_back(std::move(copy));
  }
  return out;
}

std::vector<NodeId> free_decisions(const Network& network, const Findings& findings) {
  std::vector<NodeId> ids;
  for (const auto& node : network.nodes)
    if (node.kind == NodeKind::Decision && !findings.count(node.id)) ids.push_back(node.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

namespace {

std::size_t index_of_config(const Network& network, const std::vector<NodeId>& free,
                            const DecisionConfiguration& config) {
  if (config.size() != free.size())
    throw Error(ErrorCode::InvalidState,
                "configuration must assign every free decision node exactly once");
  std::vector<std::size_t> cards, assignment;
  for (const auto& id : free) {
    auto it = config.find(id);
    if (it == config.end())
      throw Error(ErrorCode::InvalidState, "configuration misses decision '" + id + "'");
    cards.push_back(network.at(id).cardinality());
    assignment.push_back(it->second);
  }
  try {
    return config_index(cards, assignment);
  } catch (const Error&) {
    throw Error(ErrorCode::InvalidState, "alternative index out of range");
  }
}

}  // namespace

EvaluatedDecision evaluate_decision(const Network& network, const Findings& findings,
                                    const DecisionConfiguration& config,
                                    const DecisionOptions& options) {
  Evaluator evaluator{belief_transform(network), options};
  check_findings(network, findings);
  const auto free = free_decisions(network, findings);
  const std::size_t index = index_of_config(network, free, config);
  return evaluator.evaluate(findings, config, index);
}

double expected_utility(const Network& network, const Findings& findings,
                        const DecisionConfiguration& config,
                        const DecisionOptions& options) {
  return evaluate_decision(network, findings, config, options).expected_utility;
}

Recommendation recommend(const Network& network, const Findings& findings,
                         const DecisionOptions& options) {
  Evaluator evaluator{belief_transform(network), options};
  check_findings(network, findings);
  const auto free = free_decisions(network, findings);
  std::vector<std::size_t> cards;
  for (const auto& id : free) cards.push_back(network.at(id).cardinality());

  std::size_t count = 1;
  for (std::size_t c : cards) {
    if (count > options.max_configurations / c)
      throw Error(ErrorCode::TooManyConfigurations,
                  "more than " + std::to_string(options.max_configurations) +
                      " decision configurations");
    count *= c;
  }

  Recommendation rec;
  bool any_feasible = false;
  for (std::size_t index = 0; index < count; ++index) {
    const auto assignment = config_assignment(cards, index);
    DecisionConfiguration config;
    for (std::size_t k = 0; k < free.size(); ++k) config[free[k]] = assignment[k];
    try {
      rec.ranking.push_back(evaluator.evaluate(findings, config, index));
      any_feasible = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ImpossibleEvidence) throw;
      EvaluatedDecision infeasible;
      infeasible.configuration = std::move(config);
      infeasible.index = index;
      infeasible.feasible = false;
      rec.ranking.push_back(std::move(infeasible));
    }
  }
  if (!any_feasible)
    throw Error(ErrorCode::ImpossibleEvidence,
                "findings have zero probability under every decision configuration");

  auto& ranking = rec.ranking;
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const EvaluatedDecision& a, const EvaluatedDecision& b) {
                     if (a.feasible != b.feasible) return a.feasible;
                     if (!a.feasible) return a.index < b.index;
                     if (a.normalized_score != b.normalized_score)
                       return a.normalized_score > b.normalized_score;
                     return a.index < b.index;
                   });
  // Scores within kTieTolerance of a group's leading score are rounding-level
  // ties; they keep configuration-index order.
  for (std::size_t i = 0; i < ranking.size() && ranking[i].feasible;) {
    std::size_t j = i + 1;
    while (j < ranking.size() && ranking[j].feasible &&
           ranking[i].normalized_score - ranking[j].normalized_score <= kTieTolerance)
      ++j;
    std::sort(ranking.begin() + i, ranking.begin() + j,
              [](const EvaluatedDecision& a, const EvaluatedDecision& b) {
                return a.index < b.index;
              });
    i = j;
  }
  return rec;
}

InferenceResult chance_posteriors(const Network& network, const Findings& findings,
                                  Engine engine, const InferenceOptions& options,
                                  const OracleOptions& oracle) {
  auto run = [&](const Network& belief_net) {
    return engine == Engine::Oracle ? oracle_joint(belief_net, findings, oracle)
                                    : infer(belief_net, findings, options);
  };
  if (network.kind == NetworkKind::Belief) return run(network);

  check_findings(network, findings);
  auto result = run(belief_transform(network).network);
  for (const auto& node : network.nodes)
    if (node.kind != NodeKind::Chance) result.beliefs.erase(node.id);
  return result;
}

}  // namespace knet
