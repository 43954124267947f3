#pragma once

#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mlpath/search_common.hpp"

namespace mlpath {

/// Bandwidth floor q_b^min and additive QoS ceilings q^max (one per metric).
struct ConstraintSet {
  double min_bandwidth = 1.0;
  std::vector<double> qos_max;
};

/// A partial path stored in the search queue.
struct QueueEntry {
  std::uint32_t record = 0;
  NodeId node = 0;
  ProtocolId current = 0;
  ProtocolStack stack;
  EdgeCounts nb;
  std::vector<double> qos;  // sum of q_i(E) * nb(E)
  double slack = std::numeric_limits<double>::infinity();  // min q_b(E) / nb(E)
  double weight = 0.0;
  std::size_t hops = 0;
};

/// a dominates b: at least as much bandwidth slack, no worse on any QoS
/// accumulator, same node, stack and current protocol, no heavier, and no
/// edge crossed more often (so every extension of b stays open to a).
inline bool dominates(const QueueEntry& a, const QueueEntry& b) {
  if (a.node != b.node || a.current != b.current || a.stack != b.stack) return false;
  if (a.slack < b.slack || a.weight > b.weight) return false;
  for (std::size_t i = 0; i < a.qos.size() && i < b.qos.size(); ++i) {
    if (a.qos[i] > b.qos[i]) return false;
  }
  return a.nb.dominated_by_or_equal(b.nb);
}

struct SamcraOptions {
  bool domination = true;
  /// Keep at most k entries per (node, protocol, stack). Any cap makes the
  /// search a heuristic; the outcome is flagged accordingly.
  std::optional<std::size_t> k;
  std::optional<double> time_limit_seconds;
  std::size_t max_entries = 4'000'000;
};

struct SamcraOutcome : SearchOutcome {
  bool heuristic = false;
  std::size_t max_hops_seen = 0;
};

/// Best-first search on path weight. Extensions follow the stack machine;
/// an extension is dropped when a QoS sum exceeds its ceiling, an edge is
/// crossed more than floor(q_b(E)/q_b^min) times, or a stored entry
/// dominates it. The first complete entry popped is optimal.
inline SamcraOutcome ml_samcra(const Network& net, NodeId source, NodeId dest, const ConstraintSet& c,
                               const SamcraOptions& opt = {}) {
  if (source == dest) throw std::invalid_argument("source and destination must differ");
  if (!(c.min_bandwidth > 0.0)) throw std::invalid_argument("bandwidth floor must be positive");
  const std::size_t m = net.qos_dimension();
  if (!c.qos_max.empty() && c.qos_max.size() != m) {
    throw std::invalid_argument("expected " + std::to_string(m) + " QoS ceilings, got " + std::to_string(c.qos_max.size()));
  }

  const Deadline deadline(opt.time_limit_seconds);
  PathRecords records;
  std::vector<QueueEntry> entries;
  std::vector<std::uint8_t> dead;
  std::unordered_map<std::string, std::vector<std::uint32_t>> stored;

  using Key = std::pair<double, std::uint32_t>;  // (weight, insertion order)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;

  SamcraOutcome out;
  out.heuristic = opt.k.has_value();

  // Applies crossing e to `entry`; false when a constraint breaks.
  const auto cross = [&](QueueEntry& entry, EdgeId e) {
    const auto& edge = net.edge(e);
    const auto count = entry.nb.increment(e);
    if (count > crossing_cap(edge.bandwidth, c.min_bandwidth)) return false;
    entry.slack = std::min(entry.slack, edge.bandwidth / count);
    for (std::size_t i = 0; i < m; ++i) {
      entry.qos[i] += edge.qos[i];
      if (!c.qos_max.empty() && entry.qos[i] > c.qos_max[i] + 1e-9) return false;
    }
    ++entry.hops;
    return true;
  };

  const auto admit = [&](QueueEntry&& entry) {
    auto& list = stored[state_key(entry.node, entry.current, entry.stack)];
    if (opt.domination) {
      for (auto id : list) {
        if (!dead[id] && dominates(entries[id], entry)) return;
      }
      std::erase_if(list, [&](std::uint32_t id) {
        if (dead[id]) return true;
        if (dominates(entry, entries[id])) {
          dead[id] = 1;
          return true;
        }
        return false;
      });
    }
    if (opt.k && list.size() >= *opt.k) return;
    const auto id = static_cast<std::uint32_t>(entries.size());
    list.push_back(id);
    queue.push({entry.weight, id});
    out.max_hops_seen = std::max(out.max_hops_seen, entry.hops);
    entries.push_back(std::move(entry));
    dead.push_back(0);
  };

  for (EdgeId e : net.out_edges(source)) {
    const NodeId u = net.edge(e).to;
    if (u == source) continue;
    for (ProtocolId x : net.out_set(source).to_vector()) {
      if (!net.in_set(u).contains(x)) continue;
      QueueEntry entry;
      entry.node = u;
      entry.current = x;
      entry.qos.assign(m, 0.0);
      if (!cross(entry, e)) continue;
      entry.record = records.add(PathRecords::kRoot, u, AdaptationFunction::passive(x));
      admit(std::move(entry));
    }
  }

  const auto finish = [&](SearchStatus status) {
    out.status = status;
    out.states = entries.size();
    out.seconds = deadline.elapsed();
    return out;
  };

  while (!queue.empty()) {
    if (deadline.expired() || entries.size() >= opt.max_entries) return finish(SearchStatus::Censored);
    const auto [w, id] = queue.top();
    queue.pop();
    if (dead[id]) continue;
    const QueueEntry entry = entries[id];
    if (entry.node == dest && entry.stack.empty()) {
      PathResult r;
      r.path = records.path(entry.record, source);
      r.weight = entry.weight;
      r.trace = trace_of(r.path);
      out.result = std::move(r);
      return finish(SearchStatus::Found);
    }
    for_each_extension(net, source, entry.node, entry.current, entry.stack,
                       [&](const AdaptationFunction& f, EdgeId e, NodeId v, ProtocolId cur, const ProtocolStack& st) {
                         QueueEntry next;
                         next.node = v;
                         next.current = cur;
                         next.stack = st;
                         next.nb = entry.nb;
                         next.qos = entry.qos;
                         next.slack = entry.slack;
                         next.hops = entry.hops;
                         next.weight = entry.weight + net.weight(entry.node, f, v);
                         if (!cross(next, e)) return;
                         next.record = records.add(entry.record, v, f);
                         admit(std::move(next));
                       });
  }
  return finish(SearchStatus::NotFound);
}

}  // namespace mlpath
