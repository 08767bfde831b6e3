#include <algorithm>
#include <numeric>

#include "inference/indexed.hpp"

namespace knet {
namespace detail {

namespace {

// Pi/lambda propagation over a forest. Every message is computed exactly
// once: first towards the pivot of each tree, then away from it. Messages are
// left unnormalised so the pivot's sum of pi * lambda is P(evidence in tree).
class Propagator {
 public:
  Propagator(const IndexedNetwork& net, const Evidence& evidence)
      : net_(net), evidence_(evidence) {
    for (std::size_t v = 0; v < net.size(); ++v) {
      parent_arcs_.emplace_back();
      for (std::size_t u : net.parents[v]) {
        parent_arcs_[v].push_back(arcs_.size());
        arcs_.push_back({u, v});
      }
    }
    child_arcs_.resize(net.size());
    for (std::size_t a = 0; a < arcs_.size(); ++a)
      child_arcs_[arcs_[a].first].push_back(a);
    pi_msg_.resize(arcs_.size());
    lambda_msg_.resize(arcs_.size());
  }

  PolytreeOutcome run() {
    const std::size_t n = net_.size();
    std::vector<bool> visited(n, false);
    double evidence_probability = 1.0;

    for (std::size_t pivot = 0; pivot < n; ++pivot) {
      if (visited[pivot]) continue;
      std::vector<std::size_t> preorder;
      std::vector<std::size_t> up_arc(n, kNone);
      collect_tree(pivot, visited, preorder, up_arc);

      for (auto it = preorder.rbegin(); it != preorder.rend(); ++it) {
        if (*it == pivot) continue;
        send(up_arc[*it], *it);
      }

      const auto pi = causal_support(pivot);
      const auto lambda = diagnostic_support(pivot, kNone);
      double z = 0.0;
      for (std::size_t s = 0; s < pi.size(); ++s) z += pi[s] * lambda[s];
      evidence_probability *= z;

      for (std::size_t v : preorder)
        for (std::size_t a : incident(v))
          if (a != up_arc[v]) send(a, v);
    }

    PolytreeOutcome out;
    out.evidence_probability = evidence_probability;
    for (std::size_t v = 0; v < n; ++v) {
      out.pi.push_back(causal_support(v));
      out.lambda.push_back(diagnostic_support(v, kNone));
    }
    if (evidence_probability > 0.0) {
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> belief(net_.card[v]);
        double total = 0.0;
        for (std::size_t s = 0; s < belief.size(); ++s) {
          belief[s] = out.pi[v][s] * out.lambda[v][s];
          total += belief[s];
        }
        for (double& b : belief) b /= total;
        out.belief.push_back(std::move(belief));
      }
    }
    out.arc_pi = pi_msg_;
    out.arc_lambda = lambda_msg_;
    out.arcs = arcs_;
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<std::size_t> incident(std::size_t v) const {
    std::vector<std::size_t> arcs = parent_arcs_[v];
    arcs.insert(arcs.end(), child_arcs_[v].begin(), child_arcs_[v].end());
    return arcs;
  }

  void collect_tree(std::size_t pivot, std::vector<bool>& visited,
                    std::vector<std::size_t>& preorder,
                    std::vector<std::size_t>& up_arc) const {
    std::vector<std::size_t> stack{pivot};
    visited[pivot] = true;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      preorder.push_back(v);
      auto arcs = incident(v);
      for (auto it = arcs.rbegin(); it != arcs.rend(); ++it) {
        const auto [u, x] = arcs_[*it];
        std::size_t w = (u == v) ? x : u;
        if (visited[w]) continue;
        visited[w] = true;
        up_arc[w] = *it;
        stack.push_back(w);
      }
    }
  }

  double evidence_weight(std::size_t v, std::size_t s) const {
    return (!evidence_[v] || *evidence_[v] == s) ? 1.0 : 0.0;
  }

  // Message from `from` along arc a to its other endpoint.
  void send(std::size_t a, std::size_t from) {
    if (arcs_[a].first == from) send_pi(a);
    else send_lambda(a);
  }

  // pi(x) = sum_u P(x | u) prod_k pi_msg(u_k)
  std::vector<double> causal_support(std::size_t v) const {
    const std::size_t card = net_.card[v];
    std::vector<double> pi(card, 0.0);
    const auto& parents = net_.parents[v];
    const auto& cpt = net_.cpt[v];
    std::vector<std::size_t> assignment(parents.size(), 0);
    const std::size_t rows = cpt.size() / card;
    for (std::size_t row = 0; row < rows; ++row) {
      double weight = 1.0;
      for (std::size_t k = 0; k < parents.size(); ++k)
        weight *= pi_msg_[parent_arcs_[v][k]][assignment[k]];
      if (weight != 0.0)
        for (std::size_t s = 0; s < card; ++s) pi[s] += weight * cpt[row * card + s];
      advance(assignment, parents);
    }
    return pi;
  }

  // lambda(x) = e(x) prod_{children c, arc != skip} lambda_msg_c(x)
  std::vector<double> diagnostic_support(std::size_t v, std::size_t skip) const {
    std::vector<double> lambda(net_.card[v]);
    for (std::size_t s = 0; s < lambda.size(); ++s) lambda[s] = evidence_weight(v, s);
    for (std::size_t a : child_arcs_[v]) {
      if (a == skip) continue;
      for (std::size_t s = 0; s < lambda.size(); ++s) lambda[s] *= lambda_msg_[a][s];
    }
    return lambda;
  }

  // Parent u -> child x: pi(u) times every lambda contribution of u except
  // the one from x (exclusion product, no division).
  void send_pi(std::size_t a) {
    const std::size_t u = arcs_[a].first;
    auto msg = causal_support(u);
    const auto lambda = diagnostic_support(u, a);
    for (std::size_t s = 0; s < msg.size(); ++s) msg[s] *= lambda[s];
    pi_msg_[a] = std::move(msg);
  }

  // Child x -> parent u_i: sum over x and the other parents of
  // lambda(x) P(x | u) prod_{k != i} pi_msg(u_k).
  void send_lambda(std::size_t a) {
    const std::size_t x = arcs_[a].second;
    const auto& parents = net_.parents[x];
    const std::size_t i = static_cast<std::size_t>(
        std::find(parent_arcs_[x].begin(), parent_arcs_[x].end(), a) -
        parent_arcs_[x].begin());
    const std::size_t card = net_.card[x];
    const auto& cpt = net_.cpt[x];
    const auto lambda = diagnostic_support(x, kNone);

    std::vector<double> msg(net_.card[parents[i]], 0.0);
    std::vector<std::size_t> assignment(parents.size(), 0);
    const std::size_t rows = cpt.size() / card;
    for (std::size_t row = 0; row < rows; ++row) {
      double others = 1.0;
      for (std::size_t k = 0; k < parents.size(); ++k)
        if (k != i) others *= pi_msg_[parent_arcs_[x][k]][assignment[k]];
      if (others != 0.0) {
        double inner = 0.0;
        for (std::size_t s = 0; s < card; ++s) inner += cpt[row * card + s] * lambda[s];
        msg[assignment[i]] += others * inner;
      }
      advance(assignment, parents);
    }
    lambda_msg_[a] = std::move(msg);
  }

  void advance(std::vector<std::size_t>& assignment,
               const std::vector<std::size_t>& parents) const {
    for (std::size_t j = assignment.size(); j-- > 0;) {
      if (++assignment[j] < net_.card[parents[j]]) return;
      assignment[j] = 0;
    }
  }

  const IndexedNetwork& net_;
  const Evidence& evidence_;
  std::vector<std::pair<std::size_t, std::size_t>> arcs_;
  std::vector<std::vector<std::size_t>> parent_arcs_;
  std::vector<std::vector<std::size_t>> child_arcs_;
  std::vector<std::vector<double>> pi_msg_;
  std::vector<std::vector<double>> lambda_msg_;
};

}  // namespace

PolytreeOutcome run_polytree(const IndexedNetwork& net, const Evidence& evidence) {
  return Propagator(net, evidence).run();
}

}  // namespace detail

PolytreeResult propagate_polytree(const Network& network, const Findings& findings) {
  const auto net = detail::index_network(network);
  const auto evidence = detail::to_evidence(network, findings);
  if (!detail::skeleton_is_forest(net.parents))
    throw Error(ErrorCode::NotPolytree, "network '" + network.name +
                                            "' is multiply connected");
  auto outcome = detail::run_polytree(net, evidence);
  if (!(outcome.evidence_probability > 0.0))
    throw Error(ErrorCode::ImpossibleEvidence, "findings have zero probability");

  PolytreeResult result;
  result.evidence_probability = outcome.evidence_probability;
  for (std::size_t v = 0; v < net.size(); ++v) {
    result.beliefs[net.ids[v]] = std::move(outcome.belief[v]);
    result.support.pi[net.ids[v]] = std::move(outcome.pi[v]);
    result.support.lambda[net.ids[v]] = std::move(outcome.lambda[v]);
  }
  for (std::size_t a = 0; a < outcome.arcs.size(); ++a)
    result.support.arcs.push_back({net.ids[outcome.arcs[a].first],
                                   net.ids[outcome.arcs[a].second],
                                   std::move(outcome.arc_pi[a]),
                                   std::move(outcome.arc_lambda[a])});
  return result;
}

}  // namespace knet
