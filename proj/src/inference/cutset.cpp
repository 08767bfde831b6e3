#include <algorithm>
#include <numeric>

#include "inference/indexed.hpp"

namespace knet {
namespace detail {

namespace {

struct Arc {
  std::size_t tail;
  std::size_t head;
};

// An arc lies on an undirected cycle iff its endpoints stay connected
// without it.
bool on_cycle(const std::vector<Arc>& arcs, const std::vector<bool>& active,
              std::size_t skip, std::size_t n) {
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    if (a == skip || !active[a]) continue;
    root[find(arcs[a].tail)] = find(arcs[a].head);
  }
  return find(arcs[skip].tail) == find(arcs[skip].head);
}

}  // namespace

// Conditioning on a cutset node removes its outgoing arcs (its children see
// it as a constant) while it stays attached to its own parents. Candidates are
// therefore nodes with an outgoing arc on a remaining cycle; among those the
// one with the highest remaining undirected degree wins, ties by id.
std::vector<std::size_t> greedy_loop_cutset(
    std::span<const NodeId> ids, std::span<const std::vector<std::size_t>> parents) {
  const std::size_t n = ids.size();
  std::vector<Arc> arcs;
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t u : parents[v]) arcs.push_back({u, v});
  std::vector<bool> active(arcs.size(), true);
  std::vector<bool> chosen(n, false);
  std::vector<std::size_t> cutset;

  while (true) {
    std::vector<bool> candidate(n, false);
    bool any = false;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
      if (!active[a] || candidate[arcs[a].tail]) continue;
      if (on_cycle(arcs, active, a, n)) {
        candidate[arcs[a].tail] = true;
        any = true;
      }
    }
    if (!any) break;

    std::vector<std::size_t> degree(n, 0);
    for (std::size_t a = 0; a < arcs.size(); ++a)
      if (active[a]) {
        ++degree[arcs[a].tail];
        ++degree[arcs[a].head];
      }
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!candidate[v] || chosen[v]) continue;
      if (best == n || degree[v] > degree[best] ||
          (degree[v] == degree[best] && ids[v] < ids[best]))
        best = v;
    }
    chosen[best] = true;
    cutset.push_back(best);
    for (std::size_t a = 0; a < arcs.size(); ++a)
      if (arcs[a].tail == best) active[a] = false;
  }

  std::sort(cutset.begin(), cutset.end(),
            [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  return cutset;
}

}  // namespace detail

LoopCutset find_loop_cutset(const Network& network) {
  // Chance-node subgraph, matching is_polytree.
  std::vector<NodeId> ids;
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::size_t> position(network.nodes.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < network.nodes.size(); ++i)
    if (network.nodes[i].kind == NodeKind::Chance) {
      position[i] = ids.size();
      ids.push_back(network.nodes[i].id);
    }
  parents.resize(ids.size());
  for (std::size_t i = 0; i < network.nodes.size(); ++i) {
    if (position[i] == static_cast<std::size_t>(-1)) continue;
    for (const auto& p : network.nodes[i].parents) {
      auto u = network.index_of(p);
      if (u && position[*u] != static_cast<std::size_t>(-1))
        parents[position[i]].push_back(position[*u]);
    }
  }
  LoopCutset cutset;
  for (std::size_t v : detail::greedy_loop_cutset(ids, parents)) cutset.push_back(ids[v]);
  return cutset;
}

}  // namespace knet
