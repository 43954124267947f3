#pragma once

// Brute-force reference implementations. They share only the data model
// (Network, MLPath, Wpda, Wcfg) with the code under test and re-derive
// everything else from first principles.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "mlpath.hpp"

namespace oracle {

using namespace mlpath;

inline bool node_receives(const Network& net, NodeId u, ProtocolId x) {
  for (const auto& f : net.functions(u)) {
    const ProtocolId in = f.kind == FunctionKind::Decapsulation ? f.to : f.from;
    if (in == x) return true;
  }
  return false;
}

inline std::vector<ProtocolId> node_sends(const Network& net, NodeId u) {
  std::set<ProtocolId> out;
  for (const auto& f : net.functions(u)) out.insert(f.kind == FunctionKind::Decapsulation ? f.from : f.to);
  return {out.begin(), out.end()};
}

/// Packet state after f, or nullopt when f does not apply.
inline std::optional<std::pair<ProtocolId, std::vector<ProtocolId>>> step(const AdaptationFunction& f, ProtocolId cur,
                                                                          std::vector<ProtocolId> stack) {
  switch (f.kind) {
    case FunctionKind::Conversion:
      if (cur != f.from) return std::nullopt;
      return std::make_pair(f.to, stack);
    case FunctionKind::Encapsulation:
      if (cur != f.from) return std::nullopt;
      stack.push_back(f.from);
      return std::make_pair(f.to, stack);
    case FunctionKind::Decapsulation:
      if (cur != f.to || stack.empty() || stack.back() != f.from) return std::nullopt;
      stack.pop_back();
      return std::make_pair(f.from, stack);
  }
  return std::nullopt;
}

/// Every feasible S-D path with at most `max_steps` functions. Paths never
/// re-enter S. `edge_cap`, when given, limits how often edge e may be used.
inline void for_each_feasible_path(const Network& net, NodeId s, NodeId d, std::size_t max_steps,
                                   const std::function<void(const MLPath&)>& visit,
                                   const std::function<std::size_t(EdgeId)>& edge_cap = nullptr) {
  MLPath path;
  path.source = s;
  path.dest = d;
  std::map<EdgeId, std::size_t> used;
  const auto take = [&](NodeId u, NodeId v) -> std::optional<EdgeId> {
    auto e = net.find_edge(u, v);
    if (!e) return std::nullopt;
    if (edge_cap && used[*e] + 1 > edge_cap(*e)) return std::nullopt;
    ++used[*e];
    return e;
  };

  std::function<void(NodeId, ProtocolId, const std::vector<ProtocolId>&)> dfs =
      [&](NodeId u, ProtocolId cur, const std::vector<ProtocolId>& stack) {
        if (u == d && stack.empty() && node_receives(net, d, cur)) visit(path);
        const std::size_t left = max_steps - path.steps.size();
        if (left == 0 || stack.size() > left) return;
        for (const auto& f : net.functions(u)) {
          auto next = step(f, cur, stack);
          if (!next) continue;
          for (NodeId v = 0; v < net.node_count(); ++v) {
            if (v == s) continue;
            auto e = take(u, v);
            if (!e) continue;
            path.steps.push_back({u, f});
            dfs(v, next->first, next->second);
            path.steps.pop_back();
            --used[*e];
          }
        }
      };

  for (ProtocolId x : node_sends(net, s)) {
    path.emitted = x;
    for (NodeId v = 0; v < net.node_count(); ++v) {
      if (v == s) continue;
      auto e = take(s, v);
      if (!e) continue;
      dfs(v, x, {});
      --used[*e];
    }
  }
}

/// Minimum path weight over feasible paths with at most max_steps functions.
inline std::optional<double> bounded_optimum(const Network& net, NodeId s, NodeId d, std::size_t max_steps) {
  std::optional<double> best;
  for_each_feasible_path(net, s, d, max_steps, [&](const MLPath& p) {
    const double w = path_weight(net, p);
    if (!best || w < *best) best = w;
  });
  return best;
}

/// Words of length <= max_len accepted by the automaton, by exhaustive
/// simulation of configurations (state, stack).
inline std::set<Trace> wpda_words(const Wpda& w, std::size_t max_len) {
  std::set<Trace> words;
  std::vector<StackSymbol> stack{w.bottom()};  // top at back
  Trace word;
  std::function<void(StateId)> run = [&](StateId q) {
    if (q == Wpda::kFinal && stack.empty()) words.insert(word);
    if (stack.empty()) return;
    if (stack.size() > max_len - word.size() + 1) return;
    for (const auto& t : w.transitions()) {
      if (t.from != q || t.pop != stack.back()) continue;
      if (t.input && word.size() == max_len) continue;
      const StackSymbol popped = stack.back();
      stack.pop_back();
      for (std::size_t k = t.push_len; k > 0; --k) stack.push_back(t.push[k - 1]);
      if (t.input) word.push_back(*t.input);
      run(t.to);
      if (t.input) word.pop_back();
      for (std::size_t k = 0; k < t.push_len; ++k) stack.pop_back();
      stack.push_back(popped);
    }
  };
  run(Wpda::kInitial);
  return words;
}

/// Words of length <= max_len derivable from the axiom, by fixpoint over
/// bounded word sets per nonterminal.
inline std::set<Trace> grammar_words(const Wcfg& g, std::size_t max_len) {
  std::vector<std::set<Trace>> sets(g.nonterminals().size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules()) {
      std::vector<Trace> produced{Trace{}};
      if (r.terminal) produced[0].push_back(*r.terminal);
      for (std::size_t k = 0; k < r.rhs_len; ++k) {
        std::vector<Trace> next;
        for (const auto& prefix : produced) {
          for (const auto& tail : sets[r.rhs[k]]) {
            if (prefix.size() + tail.size() > max_len) continue;
            Trace t = prefix;
            t.insert(t.end(), tail.begin(), tail.end());
            next.push_back(std::move(t));
          }
        }
        produced = std::move(next);
      }
      for (auto& t : produced) changed |= sets[r.lhs].insert(std::move(t)).second;
    }
  }
  return sets[Wcfg::kAxiom];
}

/// Hamiltonian path from s to d in h, by trying every node order.
inline bool has_hamiltonian_path(const Digraph& h, NodeId s, NodeId d) {
  if (h.n == 1) return s == d;
  std::vector<NodeId> middle;
  for (NodeId u = 0; u < h.n; ++u) {
    if (u != s && u != d) middle.push_back(u);
  }
  std::sort(middle.begin(), middle.end());
  do {
    NodeId prev = s;
    bool ok = true;
    for (NodeId u : middle) {
      if (!h.has_edge(prev, u)) {
        ok = false;
        break;
      }
      prev = u;
    }
    if (ok && h.has_edge(prev, d)) return true;
  } while (std::next_permutation(middle.begin(), middle.end()));
  return false;
}

/// Minimum weight over all feasible paths with every edge used at most
/// floor(q_b / floor) times and QoS sums within the ceilings. Depth-first
/// with a weight bound; exhaustive otherwise. The caps keep it finite.
inline std::optional<double> constrained_optimum(const Network& net, NodeId s, NodeId d, double min_bandwidth,
                                                 const std::vector<double>& qos_max) {
  const std::size_t m = net.qos_dimension();
  std::vector<std::size_t> cap(net.edge_count());
  std::size_t total = 0;
  for (EdgeId e = 0; e < net.edge_count(); ++e) {
    cap[e] = static_cast<std::size_t>(std::floor(net.edge(e).bandwidth / min_bandwidth + 1e-9));
    total += cap[e];
  }
  std::vector<std::size_t> used(net.edge_count(), 0);
  std::vector<double> qos(m, 0.0);
  std::optional<double> best;

  const auto enter = [&](EdgeId e) {
    if (used[e] + 1 > cap[e]) return false;
    for (std::size_t i = 0; i < m; ++i) {
      if (!qos_max.empty() && qos[i] + net.edge(e).qos[i] > qos_max[i] + 1e-9) return false;
    }
    ++used[e];
    for (std::size_t i = 0; i < m; ++i) qos[i] += net.edge(e).qos[i];
    return true;
  };
  const auto leave = [&](EdgeId e) {
    --used[e];
    for (std::size_t i = 0; i < m; ++i) qos[i] -= net.edge(e).qos[i];
  };

  std::function<void(NodeId, ProtocolId, std::vector<ProtocolId>&, double, std::size_t)> dfs =
      [&](NodeId u, ProtocolId cur, std::vector<ProtocolId>& stack, double weight, std::size_t hops) {
        if (best && weight >= *best) return;
        if (u == d && stack.empty() && node_receives(net, d, cur)) {
          best = weight;
          return;
        }
        if (stack.size() > total - hops) return;
        for (const auto& f : net.functions(u)) {
          auto next = step(f, cur, stack);
          if (!next) continue;
          for (EdgeId e : net.out_edges(u)) {
            const NodeId v = net.edge(e).to;
            if (v == s || !enter(e)) continue;
            dfs(v, next->first, next->second, weight + net.weight(u, f, v), hops + 1);
            leave(e);
          }
        }
      };

  for (ProtocolId x : node_sends(net, s)) {
    for (EdgeId e : net.out_edges(s)) {
      const NodeId v = net.edge(e).to;
      if (v == s || !enter(e)) continue;
      std::vector<ProtocolId> stack;
      dfs(v, x, stack, 0.0, 1);
      leave(e);
    }
  }
  return best;
}

}  // namespace oracle
