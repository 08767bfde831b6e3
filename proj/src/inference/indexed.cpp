#include "inference/indexed.hpp"

#include <algorithm>
#include <numeric>

namespace knet::detail {

IndexedNetwork index_network(const Network& network) {
  if (network.kind != NetworkKind::Belief)
    throw Error(ErrorCode::WrongNetworkKind,
                "exact inference runs on belief networks; transform decision "
                "networks first");
  IndexedNetwork net;
  const std::size_t n = network.nodes.size();
  net.ids.reserve(n);
  net.card.reserve(n);
  net.parents.resize(n);
  net.children.resize(n);
  net.cpt.resize(n);
  for (const auto& node : network.nodes) {
    net.ids.push_back(node.id);
    net.card.push_back(node.cardinality());
  }
  for (std::size_t v = 0; v < n; ++v) {
    const Node& node = network.nodes[v];
    for (const auto& p : node.parents) {
      auto u = network.index_of(p);
      if (!u) throw Error(ErrorCode::UnknownNode, "unknown parent '" + p + "'");
      net.parents[v].push_back(*u);
      net.children[*u].push_back(v);
    }
    auto& flat = net.cpt[v];
    flat.reserve(node.cpt.size() * node.cardinality());
    for (const auto& row : node.cpt) flat.insert(flat.end(), row.begin(), row.end());
  }
  return net;
}

Evidence to_evidence(const Network& network, const Findings& findings) {
  check_findings(network, findings);
  Evidence evidence(network.nodes.size());
  for (const auto& [id, state] : findings) evidence[*network.index_of(id)] = state;
  return evidence;
}

bool skeleton_is_forest(std::span<const std::vector<std::size_t>> parents) {
  std::vector<std::size_t> root(parents.size());
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (std::size_t v = 0; v < parents.size(); ++v) {
    for (std::size_t u : parents[v]) {
      std::size_t a = find(u), b = find(v);
      if (a == b) return false;
      root[a] = b;
    }
  }
  return true;
}

IndexedNetwork cut_outgoing_arcs(const IndexedNetwork& net,
                                 std::span<const std::size_t> fixed,
                                 std::span<const std::size_t> states) {
  std::vector<std::optional<std::size_t>> fixed_state(net.size());
  for (std::size_t i = 0; i < fixed.size(); ++i) fixed_state[fixed[i]] = states[i];

  IndexedNetwork out = net;
  for (auto& c : out.children) c.clear();
  for (std::size_t v = 0; v < net.size(); ++v) {
    const auto& parents = net.parents[v];
    const bool touched = std::any_of(parents.begin(), parents.end(),
                                     [&](std::size_t u) { return fixed_state[u].has_value(); });
    if (touched) {
      // Configurations consistent with the fixed parents, visited in row
      // order, are exactly the rows of the sliced table in its own row order.
      std::vector<std::size_t> kept;
      std::vector<double> sliced;
      const std::size_t k = parents.size();
      std::vector<std::size_t> assignment(k, 0);
      const std::size_t rows = net.cpt[v].size() / net.card[v];
      for (std::size_t row = 0; row < rows; ++row) {
        bool consistent = true;
        for (std::size_t j = 0; j < k; ++j)
          if (fixed_state[parents[j]] && assignment[j] != *fixed_state[parents[j]])
            consistent = false;
        if (consistent) {
          auto first = net.cpt[v].begin() + static_cast<long>(row * net.card[v]);
          sliced.insert(sliced.end(), first, first + static_cast<long>(net.card[v]));
        }
        for (std::size_t j = k; j-- > 0;) {
          if (++assignment[j] < net.card[parents[j]]) break;
          assignment[j] = 0;
        }
      }
      for (std::size_t u : parents)
        if (!fixed_state[u]) kept.push_back(u);
      out.parents[v] = std::move(kept);
      out.cpt[v] = std::move(sliced);
    }
    for (std::size_t u : out.parents[v]) out.children[u].push_back(v);
  }
  return out;
}

}  // namespace knet::detail
