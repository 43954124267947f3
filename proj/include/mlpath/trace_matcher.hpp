#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mlpath/path.hpp"

namespace mlpath {

struct TraceMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The function a node must apply at trace position i, given the symbol
/// there and the protocol of the next symbol.
inline AdaptationFunction function_for_symbol(const TaggedProtocol& here, ProtocolId next_protocol) {
  switch (here.tag) {
    case SymbolTag::Plain: return AdaptationFunction::conversion(here.protocol, next_protocol);
    case SymbolTag::Push: return AdaptationFunction::encapsulation(here.protocol, next_protocol);
    case SymbolTag::Pop: return AdaptationFunction::decapsulation(next_protocol, here.protocol);
  }
  return {};
}

/// Layered search graph for a trace x_1 .. x_{n+1}: layer 0 holds S, layer
/// i holds the candidates for U_i, layer n+1 the candidates for D.
struct LayeredSearchGraph {
  struct Link {
    NodeId from;
    NodeId to;
    double weight;
  };
  std::vector<std::vector<NodeId>> nodes;
  std::vector<std::vector<Link>> links;  // links[i]: layer i -> layer i+1
};

inline LayeredSearchGraph build_layers(const Network& net, const Trace& trace, NodeId source) {
  LayeredSearchGraph g;
  if (trace.empty()) return g;
  const std::size_t n = trace.size() - 1;
  g.nodes.resize(n + 2);
  g.links.resize(n + 1);
  g.nodes[0] = {source};

  std::vector<std::uint8_t> seen(net.node_count());
  const auto add = [&](std::size_t layer, NodeId from, NodeId to, double w) {
    g.links[layer].push_back({from, to, w});
    if (!seen[to]) {
      seen[to] = 1;
      g.nodes[layer + 1].push_back(to);
    }
  };

  // Emission hop: S sends x_1, which U_1 must be able to receive.
  const ProtocolId first = trace.front().protocol;
  if (net.out_set(source).contains(first)) {
    std::fill(seen.begin(), seen.end(), 0);
    for (EdgeId e : net.out_edges(source)) {
      const NodeId v = net.edge(e).to;
      if (v != source && net.in_set(v).contains(first)) add(0, source, v, 0.0);
    }
  }

  for (std::size_t i = 1; i <= n; ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    const auto f = function_for_symbol(trace[i - 1], trace[i].protocol);
    for (NodeId u : g.nodes[i]) {
      if (!net.has_function(u, f)) continue;
      for (EdgeId e : net.out_edges(u)) {
        const NodeId v = net.edge(e).to;
        if (v == source || !net.in_set(v).contains(f.output())) continue;
        add(i, u, v, net.weight(u, f, v));
      }
    }
    std::sort(g.nodes[i + 1].begin(), g.nodes[i + 1].end());
  }
  return g;
}

/// Cheapest path whose trace is exactly `trace`, by forward relaxation over
/// the layered DAG. Equal costs keep the predecessor with the smallest node
/// id. Throws TraceMismatch when no path matches.
inline MLPath match_trace(const Network& net, const Trace& trace, NodeId source, NodeId dest) {
  if (trace.empty() || trace.back().tag != SymbolTag::Plain) throw TraceMismatch("trace must end with a plain symbol");
  const auto g = build_layers(net, trace, source);
  const std::size_t n = trace.size() - 1;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

  std::vector<std::vector<double>> cost(n + 2, std::vector<double>(net.node_count(), kInf));
  std::vector<std::vector<NodeId>> pred(n + 2, std::vector<NodeId>(net.node_count(), kNone));
  cost[0][source] = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (const auto& link : g.links[i]) {
      const double c = cost[i][link.from] + link.weight;
      if (cost[i][link.from] == kInf) continue;
      auto& best = cost[i + 1][link.to];
      auto& p = pred[i + 1][link.to];
      if (c < best || (c == best && link.from < p)) {
        best = c;
        p = link.from;
      }
    }
  }

  if (cost[n + 1][dest] == kInf || !net.in_set(dest).contains(trace.back().protocol)) {
    throw TraceMismatch("no path of the network matches the trace");
  }

  MLPath path;
  path.source = source;
  path.dest = dest;
  path.emitted = trace.front().protocol;
  path.steps.resize(n);
  NodeId at = dest;
  for (std::size_t i = n + 1; i > 1; --i) {
    at = pred[i][at];
    path.steps[i - 2] = PathStep{at, function_for_symbol(trace[i - 2], trace[i - 1].protocol)};
  }
  return path;
}

}  // namespace mlpath
