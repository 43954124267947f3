#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlpath/bfs_exact.hpp"
#include "mlpath/generators.hpp"
#include "mlpath/parallel.hpp"
#include "mlpath/pipeline.hpp"

namespace mlpath {

/// Node numbering used to orient the network: BFS from S, each distance
/// layer visited in a seed-dependent random order, S = 0 and D = |V|-1.
/// Nodes unreachable from S come after the reachable ones, ascending. If D
/// did not land on |V|-1 it swaps numbers with the node that did.
inline std::vector<std::size_t> dag_numbering(const Network& net, NodeId source, NodeId dest, std::uint64_t seed) {
  if (source >= net.node_count() || dest >= net.node_count() || source == dest) {
    throw std::invalid_argument("dag numbering needs two distinct nodes of the network");
  }
  const auto adj = graph_of(net).adjacency();
  const auto dist = bfs_distances(adj, source);
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  if (dist[dest] == kUnreached) throw std::invalid_argument("destination is unreachable from the source");

  std::vector<std::vector<NodeId>> layers;
  std::vector<NodeId> unreached;
  for (NodeId u = 0; u < net.node_count(); ++u) {
    if (dist[u] == kUnreached) {
      unreached.push_back(u);
      continue;
    }
    if (layers.size() <= dist[u]) layers.resize(dist[u] + 1);
    layers[dist[u]].push_back(u);
  }
  Rng rng(seed);
  std::vector<std::size_t> number(net.node_count());
  std::size_t next = 0;
  for (auto& layer : layers) {
    rng.shuffle(layer);
    for (NodeId u : layer) number[u] = next++;
  }
  for (NodeId u : unreached) number[u] = next++;

  const std::size_t last = net.node_count() - 1;
  if (number[dest] != last) {
    const auto holder = static_cast<NodeId>(std::find(number.begin(), number.end(), last) - number.begin());
    std::swap(number[dest], number[holder]);
  }
  return number;
}

/// Copy of `net` keeping only the edges accepted by keep(edge); weights on
/// kept edges carry over. Node ids are unchanged.
template <typename Keep>
Network filter_edges(const Network& net, Keep&& keep) {
  Network out;
  for (const auto& p : net.protocol_names()) out.add_protocol(p);
  for (const auto& n : net.node_names()) out.add_node(n);
  out.set_qos_dimension(net.qos_dimension());
  for (NodeId u = 0; u < net.node_count(); ++u) {
    for (const auto& f : net.functions(u)) out.add_function(u, f);
  }
  for (const auto& e : net.edges()) {
    if (keep(e)) out.add_edge(e.from, e.to, e.bandwidth, e.qos);
  }
  for (const auto& [key, w] : net.explicit_weights()) {
    const auto& [u, f, v] = key;
    if (out.find_edge(u, v)) out.set_weight(u, f, v, w);
  }
  return out;
}

/// Drops every edge (U, V) with number(V) < number(U). The result is acyclic.
inline Network dagify(const Network& net, NodeId source, NodeId dest, std::uint64_t seed) {
  const auto number = dag_numbering(net, source, dest, seed);
  return filter_edges(net, [&](const Edge& e) { return number[e.from] < number[e.to]; });
}

/// Drops the edges whose bandwidth is below the floor.
inline Network prune_thin_edges(const Network& net, double min_bandwidth) {
  return filter_edges(net, [&](const Edge& e) { return e.bandwidth >= min_bandwidth; });
}

struct DagOptions {
  std::uint64_t seed = 1;
  /// Independent orientations tried; the lightest result wins (ties: lowest
  /// restart index). Restart r > 0 uses seed Rng(seed).split(r).
  std::size_t restarts = 1;
  std::size_t workers = 1;
};

namespace detail {

inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t r) {
  return r == 0 ? seed : Rng(seed).split(r).next();
}

template <typename Solve>
std::optional<PathResult> best_of_restarts(const DagOptions& opt, Solve&& solve) {
  const std::size_t n = std::max<std::size_t>(1, opt.restarts);
  std::vector<std::optional<PathResult>> results(n);
  parallel_for(n, opt.workers, [&](std::size_t r) { results[r] = solve(restart_seed(opt.seed, r)); });
  std::optional<PathResult> best;
  for (auto& r : results) {
    if (r && (!best || r->weight < best->weight)) best = std::move(r);
  }
  return best;
}

}  // namespace detail

/// DAG-PDA: orient, prune thin links, run the exact pipeline. Each edge is
/// then used at most once, so any result meets the bandwidth floor.
inline std::optional<PathResult> dag_pda(const Network& net, NodeId source, NodeId dest, double min_bandwidth,
                                         Metric metric = Metric::Custom, const DagOptions& opt = {}) {
  if (!(min_bandwidth > 0.0)) throw std::invalid_argument("bandwidth floor must be positive");
  const Network weighted = with_metric(net, metric);
  return detail::best_of_restarts(opt, [&](std::uint64_t seed) {
    const Network dag = prune_thin_edges(dagify(weighted, source, dest, seed), min_bandwidth);
    return run_pipeline(dag, source, dest).result;
  });
}

/// DAG-BFS: orient, prune, then the breadth-first search in bandwidth mode.
inline std::optional<PathResult> dag_bfs(const Network& net, NodeId source, NodeId dest, double min_bandwidth,
                                         std::optional<std::size_t> max_hops, Metric metric = Metric::Custom,
                                         const DagOptions& opt = {}) {
  if (!(min_bandwidth > 0.0)) throw std::invalid_argument("bandwidth floor must be positive");
  const Network weighted = with_metric(net, metric);
  return detail::best_of_restarts(opt, [&](std::uint64_t seed) {
    const Network dag = prune_thin_edges(dagify(weighted, source, dest, seed), min_bandwidth);
    BfsOptions bo;
    bo.max_hops = max_hops;
    bo.min_bandwidth = min_bandwidth;
    return bfs_search(dag, source, dest, bo).result;
  });
}

}  // namespace mlpath
