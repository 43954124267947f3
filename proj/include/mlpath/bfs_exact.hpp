#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "mlpath/search_common.hpp"

namespace mlpath {

struct BfsOptions {
  /// Paths longer than this many edges are dropped.
  std::optional<std::size_t> max_hops;
  /// Bandwidth floor q_b_min; every edge may then be crossed at most
  /// floor(q_b(E) / q_b_min) times.
  std::optional<double> min_bandwidth;
  /// Censoring: wall-clock limit and partial-path budget.
  std::optional<double> time_limit_seconds;
  std::size_t max_states = 4'000'000;
  bool domination = true;
};

/// Breadth-first exploration of partial paths, layer by hop count. A new
/// partial path is dropped when a stored one ends at the same node with the
/// same current protocol and stack, weighs no more, and (bandwidth mode) has
/// crossed no edge more often. Returns the lightest path reaching D with an
/// empty stack once the frontier is exhausted.
///
/// Without max_hops or min_bandwidth the search space is infinite whenever
/// stacks can grow, and only the censoring limits stop it.
inline SearchOutcome bfs_search(const Network& net, NodeId source, NodeId dest, const BfsOptions& opt = {}) {
  if (source == dest) throw std::invalid_argument("source and destination must differ");
  if (opt.min_bandwidth && *opt.min_bandwidth <= 0.0) throw std::invalid_argument("bandwidth floor must be positive");
  if (opt.max_hops && *opt.max_hops < 1) throw std::invalid_argument("max_hops must be at least 1");

  struct State {
    std::uint32_t record;
    NodeId node;
    ProtocolId current;
    ProtocolStack stack;
    double weight;
    EdgeCounts nb;
  };
  struct Label {
    double weight;
    EdgeCounts nb;
  };

  const Deadline deadline(opt.time_limit_seconds);
  const bool bw = opt.min_bandwidth.has_value();
  PathRecords records;
  std::unordered_map<std::string, std::vector<Label>> labels;
  std::optional<std::pair<double, std::uint32_t>> best;

  SearchOutcome out;
  const auto finish = [&](SearchStatus status) {
    out.states = records.size();
    out.seconds = deadline.elapsed();
    if (best) {
      PathResult r;
      r.path = records.path(best->second, source);
      r.weight = best->first;
      r.trace = trace_of(r.path);
      out.result = std::move(r);
    }
    out.status = status == SearchStatus::Censored ? status : (best ? SearchStatus::Found : SearchStatus::NotFound);
    return out;
  };

  // Returns false when dominated.
  const auto admit = [&](NodeId node, ProtocolId current, const ProtocolStack& stack, double weight,
                         const EdgeCounts& nb) {
    if (!opt.domination) return true;
    auto& list = labels[state_key(node, current, stack)];
    for (const auto& l : list) {
      if (l.weight <= weight && (!bw || l.nb.dominated_by_or_equal(nb))) return false;
    }
    if (bw) {
      std::erase_if(list, [&](const Label& l) { return weight <= l.weight && nb.dominated_by_or_equal(l.nb); });
      list.push_back({weight, nb});
    } else {
      list.assign(1, {weight, {}});
    }
    return true;
  };

  const auto cap_ok = [&](EdgeId e, std::uint16_t count) {
    return !bw || count <= crossing_cap(net.edge(e).bandwidth, *opt.min_bandwidth);
  };

  std::vector<State> frontier;
  for (EdgeId e : net.out_edges(source)) {
    const NodeId u = net.edge(e).to;
    if (u == source) continue;
    for (ProtocolId x : net.out_set(source).to_vector()) {
      if (!net.in_set(u).contains(x)) continue;
      EdgeCounts nb;
      if (!cap_ok(e, nb.increment(e))) continue;
      if (!admit(u, x, {}, 0.0, nb)) continue;
      const auto rec = records.add(PathRecords::kRoot, u, AdaptationFunction::passive(x));
      frontier.push_back(State{rec, u, x, {}, 0.0, std::move(nb)});
    }
  }

  std::size_t hops = 1;
  while (!frontier.empty()) {
    std::vector<State> next;
    for (auto& s : frontier) {
      if (deadline.expired() || records.size() >= opt.max_states) return finish(SearchStatus::Censored);
      if (s.node == dest && s.stack.empty()) {
        if (!best || s.weight < best->first) best = {s.weight, s.record};
        continue;
      }
      if (opt.max_hops && hops >= *opt.max_hops) continue;
      for_each_extension(net, source, s.node, s.current, s.stack,
                         [&](const AdaptationFunction& f, EdgeId e, NodeId v, ProtocolId cur, const ProtocolStack& st) {
                           EdgeCounts nb = s.nb;
                           if (bw && !cap_ok(e, nb.increment(e))) return;
                           const double w = s.weight + net.weight(s.node, f, v);
                           if (!admit(v, cur, st, w, nb)) return;
                           const auto rec = records.add(s.record, v, f);
                           next.push_back(State{rec, v, cur, st, w, bw ? std::move(nb) : EdgeCounts{}});
                         });
    }
    frontier = std::move(next);
    ++hops;
  }
  return finish(SearchStatus::NotFound);
}

/// Convenience wrapper: the optimum, or nullopt when none exists within
/// the hop bound. The search must be finite, so at least one of max_hops
/// and min_bandwidth is required.
inline std::optional<PathResult> bfs_shortest(const Network& net, NodeId source, NodeId dest,
                                              std::optional<std::size_t> max_hops,
                                              std::optional<double> min_bandwidth = std::nullopt) {
  if (!max_hops && !min_bandwidth) throw std::invalid_argument("bfs_shortest needs a hop bound or a bandwidth floor");
  BfsOptions opt;
  opt.max_hops = max_hops;
  opt.min_bandwidth = min_bandwidth;
  auto out = bfs_search(net, source, dest, opt);
  if (out.status == SearchStatus::Censored) throw std::runtime_error("bfs search exceeded its state budget");
  return out.result;
}

}  // namespace mlpath
