#include <algorithm>

#include "inference/indexed.hpp"

namespace knet {

void check_findings(const Network& network, const Findings& findings) {
  for (const auto& [id, state] : findings) {
    const Node& node = network.at(id);
    if (node.kind == NodeKind::Value)
      throw Error(ErrorCode::NotInstantiable,
                  "value node '" + id + "' cannot be instantiated");
    if (state >= node.cardinality())
      throw Error(ErrorCode::InvalidState, "state index " + std::to_string(state) +
                                               " out of range for node '" + id + "'");
  }
}

namespace {

// Depth-first enumeration in topological order; each leaf is one joint
// configuration consistent with the evidence.
class Enumerator {
 public:
  Enumerator(const detail::IndexedNetwork& net, const detail::Evidence& evidence,
             std::vector<std::size_t> order)
      : net_(net), evidence_(evidence), order_(std::move(order)),
        assignment_(net.size(), 0) {
    for (std::size_t v = 0; v < net.size(); ++v) marginal_.emplace_back(net.card[v], 0.0);
  }

  void run() { visit(0, 1.0); }

  double total() const { return total_; }
  const std::vector<std::vector<double>>& marginal() const { return marginal_; }

 private:
  void visit(std::size_t depth, double weight) {
    if (depth == order_.size()) {
      total_ += weight;
      for (std::size_t v = 0; v < net_.size(); ++v) marginal_[v][assignment_[v]] += weight;
      return;
    }
    const std::size_t v = order_[depth];
    std::size_t row = 0;
    for (std::size_t u : net_.parents[v]) row = row * net_.card[u] + assignment_[u];
    const double* probs = net_.cpt[v].data() + row * net_.card[v];
    for (std::size_t s = 0; s < net_.card[v]; ++s) {
      if (evidence_[v] && *evidence_[v] != s) continue;
      if (probs[s] == 0.0) continue;
      assignment_[v] = s;
      visit(depth + 1, weight * probs[s]);
    }
  }

  const detail::IndexedNetwork& net_;
  const detail::Evidence& evidence_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> assignment_;
  std::vector<std::vector<double>> marginal_;
  double total_ = 0.0;
};

}  // namespace

InferenceResult oracle_joint(const Network& network, const Findings& findings,
                             OracleOptions options) {
  const auto net = detail::index_network(network);
  const auto evidence = detail::to_evidence(network, findings);

  std::size_t states = 1;
  for (std::size_t c : net.card) {
    if (c != 0 && states > options.max_states / c)
      throw Error(ErrorCode::TooLarge, "joint state space exceeds " +
                                           std::to_string(options.max_states));
    states *= c;
  }
  if (states > options.max_states)
    throw Error(ErrorCode::TooLarge,
                "joint state space exceeds " + std::to_string(options.max_states));

  std::vector<std::size_t> order;
  for (const auto& id : topological_order(network)) order.push_back(*network.index_of(id));

  Enumerator enumerator(net, evidence, std::move(order));
  enumerator.run();
  if (!(enumerator.total() > 0.0))
    throw Error(ErrorCode::ImpossibleEvidence, "findings have zero probability");

  InferenceResult result;
  result.evidence_probability = enumerator.total();
  for (std::size_t v = 0; v < net.size(); ++v) {
    auto belief = enumerator.marginal()[v];
    for (double& b : belief) b /= enumerator.total();
    result.beliefs[net.ids[v]] = std::move(belief);
  }
  return result;
}

}  // namespace knet
