#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlpath/search_common.hpp"

namespace mlpath {

struct FeasibilityOptions {
  std::optional<double> time_limit_seconds;
  /// Budget on distinct partial-path states expanded.
  std::size_t max_states = 20'000'000;
};

/// Decides whether any path meets the bandwidth floor, ignoring weights.
/// Depth-first over (node, protocol, stack, nb). Whether a state can still
/// reach D depends on nothing else, so every state that failed once is
/// remembered and skipped. The path returned is the first one found, not
/// the lightest.
inline SearchOutcome first_feasible(const Network& net, NodeId source, NodeId dest, double min_bandwidth,
                                    const FeasibilityOptions& opt = {}) {
  if (source == dest) throw std::invalid_argument("source and destination must differ");
  if (min_bandwidth <= 0.0) throw std::invalid_argument("bandwidth floor must be positive");

  std::vector<std::uint32_t> cap(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) cap[e] = crossing_cap(net.edge(e).bandwidth, min_bandwidth);

  const Deadline deadline(opt.time_limit_seconds);
  // Per (node, protocol, stack): residual capacities of live edges in
  // states known to fail. Any state with no more residual anywhere fails too.
  std::unordered_map<std::string, std::vector<EdgeCounts>> failed;
  std::vector<std::pair<NodeId, AdaptationFunction>> steps;  // (node, function applied there)
  std::size_t expanded = 0;
  bool censored = false;

  std::vector<NodeId> tail(net.edge_count()), head(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    tail[e] = net.edge(e).from;
    head[e] = net.edge(e).to;
  }
  std::vector<std::vector<EdgeId>> in_edges(net.node_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) in_edges[head[e]].push_back(e);

  // An edge is live when it has capacity left, its tail is reachable from
  // `node` and D is reachable from its head, all over edges with capacity
  // left. Only live edges can appear in a completion, so two states agreeing
  // on node, protocol, stack and the residual capacity of live edges have
  // the same future, and one with less residual everywhere can do no
  // better. Returns false when D is out of reach.
  std::vector<char> fwd(net.node_count()), bwd(net.node_count());
  std::vector<NodeId> queue;
  const auto live_residual = [&](NodeId node, const EdgeCounts& nb, EdgeCounts& left) {
    const auto open = [&](EdgeId e) { return nb.count(e) < cap[e] && head[e] != source; };
    std::fill(fwd.begin(), fwd.end(), 0);
    std::fill(bwd.begin(), bwd.end(), 0);
    queue.assign(1, node);
    fwd[node] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (EdgeId e : net.out_edges(queue[i])) {
        if (open(e) && !fwd[head[e]]) {
          fwd[head[e]] = 1;
          queue.push_back(head[e]);
        }
      }
    }
    if (!fwd[dest] && node != dest) return false;
    queue.assign(1, dest);
    bwd[dest] = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (EdgeId e : in_edges[queue[i]]) {
        if (open(e) && !bwd[tail[e]]) {
          bwd[tail[e]] = 1;
          queue.push_back(tail[e]);
        }
      }
    }
    for (EdgeId e = 0; e < net.edge_count(); ++e) {
      if (!open(e) || !fwd[tail[e]] || !bwd[head[e]]) continue;
      for (auto k = cap[e] - nb.count(e); k > 0; --k) left.increment(e);
    }
    return true;
  };

  // Protocols that head(e) can pop from the stack when entered over e: some
  // decapsulation there takes an input that tail(e) is able to send.
  std::vector<ProtocolSet> pops_via(net.edge_count());
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    for (const auto& f : net.functions(head[e])) {
      if (f.kind == FunctionKind::Decapsulation && net.out_set(tail[e]).contains(f.input())) pops_via[e].insert(f.from);
    }
  }
  // Every stacked protocol needs its own pop, and every pop but one made at
  // the current node needs a fresh crossing of an edge that can feed it.
  std::vector<std::uint32_t> need(net.protocol_count()), supply(net.protocol_count());
  const auto poppable = [&](NodeId node, ProtocolId current, const ProtocolStack& stack, const EdgeCounts& left) {
    std::fill(need.begin(), need.end(), 0);
    for (ProtocolId p : stack) ++need[p];
    std::fill(supply.begin(), supply.end(), 0);
    for (const auto& f : net.functions(node)) {
      if (f.kind == FunctionKind::Decapsulation && f.input() == current) supply[f.from] = 1;
    }
    for (const auto& [e, c] : left.items()) {
      for (ProtocolId p : pops_via[e].to_vector()) supply[p] += c;
    }
    for (std::size_t p = 0; p < need.size(); ++p) {
      if (need[p] > supply[p]) return false;
    }
    return true;
  };

  // True once the search should stop: a path was found or a budget ran out.
  const auto dfs = [&](auto&& self, NodeId node, ProtocolId current, const ProtocolStack& stack,
                       EdgeCounts& nb) -> bool {
    if (node == dest && stack.empty()) return true;
    if (++expanded > opt.max_states || deadline.expired()) {
      censored = true;
      return true;
    }
    EdgeCounts left;
    if (!live_residual(node, nb, left) || !poppable(node, current, stack, left)) return false;
    auto& known = failed[state_key(node, current, stack)];
    for (const auto& f : known) {
      if (left.dominated_by_or_equal(f)) return false;
    }
    bool stop = false;
    for_each_extension(net, source, node, current, stack,
                       [&](const AdaptationFunction& f, EdgeId e, NodeId v, ProtocolId cur, const ProtocolStack& st) {
                         if (stop || nb.count(e) + 1u > cap[e]) return;
                         EdgeCounts next = nb;
                         next.increment(e);
                         steps.emplace_back(node, f);
                         stop = self(self, v, cur, st, next);
                         if (!stop) steps.pop_back();
                       });
    if (!stop) {
      auto& list = failed[state_key(node, current, stack)];
      std::erase_if(list, [&](const EdgeCounts& f) { return f.dominated_by_or_equal(left); });
      list.push_back(std::move(left));
    }
    return stop;
  };

  SearchOutcome out;
  for (EdgeId e : net.out_edges(source)) {
    const NodeId u = net.edge(e).to;
    if (u == source || cap[e] < 1) continue;
    for (ProtocolId x : net.out_set(source).to_vector()) {
      if (!net.in_set(u).contains(x)) continue;
      EdgeCounts nb;
      nb.increment(e);
      if (!dfs(dfs, u, x, {}, nb)) continue;
      out.states = expanded;
      out.seconds = deadline.elapsed();
      if (censored) {
        out.status = SearchStatus::Censored;
        return out;
      }
      PathResult r;
      r.path.source = source;
      r.path.dest = dest;
      r.path.emitted = x;
      for (const auto& [n, f] : steps) r.path.steps.push_back({n, f});
      r.weight = path_weight(net, r.path);
      r.trace = trace_of(r.path);
      out.result = std::move(r);
      out.status = SearchStatus::Found;
      return out;
    }
  }
  out.states = expanded;
  out.seconds = deadline.elapsed();
  out.status = SearchStatus::NotFound;
  return out;
}

}  // namespace mlpath
