#include "inference/indexed.hpp"

namespace knet {

namespace {

// Loop-cutset conditioning: for each instantiation c of the cutset that is
// consistent with the findings, propagate on the network with the cutset's
// outgoing arcs cut and combine the per-instantiation beliefs weighted by
// w_c = P(findings, c). Instantiations are visited in index order so the
// sums are reproducible.
InferenceResult condition_on_cutset(const detail::IndexedNetwork& net,
                                    const detail::Evidence& evidence,
                                    const std::vector<std::size_t>& cutset,
                                    const InferenceOptions& options) {
  std::vector<std::size_t> free_nodes;
  std::vector<std::size_t> free_cards;
  for (std::size_t c : cutset)
    if (!evidence[c]) {
      free_nodes.push_back(c);
      free_cards.push_back(net.card[c]);
    }
  std::size_t count = 1;
  for (std::size_t card : free_cards) {
    if (count > options.max_cutset_instantiations / card)
      throw Error(ErrorCode::TooLarge,
                  "cutset instantiations exceed " +
                      std::to_string(options.max_cutset_instantiations));
    count *= card;
  }

  std::vector<std::size_t> states(cutset.size());
  std::vector<std::vector<double>> mixture;
  for (std::size_t v = 0; v < net.size(); ++v) mixture.emplace_back(net.card[v], 0.0);
  double total = 0.0;

  for (std::size_t index = 0; index < count; ++index) {
    const auto assignment = config_assignment(free_cards, index);
    detail::Evidence conditioned = evidence;
    for (std::size_t k = 0; k < free_nodes.size(); ++k)
      conditioned[free_nodes[k]] = assignment[k];
    for (std::size_t k = 0; k < cutset.size(); ++k) states[k] = *conditioned[cutset[k]];

    const auto cut = detail::cut_outgoing_arcs(net, cutset, states);
    const auto outcome = detail::run_polytree(cut, conditioned);
    const double weight = outcome.evidence_probability;
    if (!(weight > 0.0)) continue;
    total += weight;
    for (std::size_t v = 0; v < net.size(); ++v)
      for (std::size_t s = 0; s < net.card[v]; ++s)
        mixture[v][s] += weight * outcome.belief[v][s];
  }

  if (!(total > 0.0))
    throw Error(ErrorCode::ImpossibleEvidence, "findings have zero probability");

  InferenceResult result;
  result.evidence_probability = total;
  for (std::size_t v = 0; v < net.size(); ++v) {
    for (double& b : mixture[v]) b /= total;
    result.beliefs[net.ids[v]] = std::move(mixture[v]);
  }
  return result;
}

}  // namespace

InferenceResult infer(const Network& network, const Findings& findings,
                      InferenceOptions options) {
  const auto net = detail::index_network(network);
  const auto evidence = detail::to_evidence(network, findings);
  if (detail::skeleton_is_forest(net.parents)) {
    PolytreeResult full = propagate_polytree(network, findings);
    return {std::move(full.beliefs), full.evidence_probability};
  }
  const auto cutset = detail::greedy_loop_cutset(net.ids, net.parents);
  return condition_on_cutset(net, evidence, cutset, options);
}

}  // namespace knet
