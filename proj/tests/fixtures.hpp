#pragma once

#include <string>

#include "mlpath.hpp"

namespace fixtures {

using namespace mlpath;
using F = AdaptationFunction;

/// S -> U -> D, one protocol, passive everywhere.
inline Network passive_net() {
  Network net;
  const auto a = net.add_protocol("a");
  const auto s = net.add_node("S");
  const auto u = net.add_node("U");
  const auto d = net.add_node("D");
  net.add_edge(s, u, 10.0);
  net.add_edge(u, d, 10.0);
  net.add_function(s, F::passive(a));
  net.add_function(u, F::passive(a));
  net.add_function(d, F::passive(a));
  return net;
}

/// S -> U1 -> U2 -> D: U1 wraps a in b, U2 unwraps it.
inline Network encap_net() {
  Network net;
  const auto a = net.add_protocol("a");
  const auto b = net.add_protocol("b");
  const auto s = net.add_node("S");
  const auto u1 = net.add_node("U1");
  const auto u2 = net.add_node("U2");
  const auto d = net.add_node("D");
  net.add_edge(s, u1);
  net.add_edge(u1, u2);
  net.add_edge(u2, d);
  net.add_function(s, F::passive(a));
  net.add_function(u1, F::encapsulation(a, b));
  net.add_function(u2, F::decapsulation(a, b));
  net.add_function(d, F::passive(a));
  return net;
}

/// S -> U1 -> U2 -> U3 -> U4 -> D: a in b, then b in c, then unwrapped in order.
inline Network nested_net() {
  Network net;
  const auto a = net.add_protocol("a");
  const auto b = net.add_protocol("b");
  const auto c = net.add_protocol("c");
  NodeId prev = net.add_node("S");
  net.add_function(prev, F::passive(a));
  const F chain[] = {F::encapsulation(a, b), F::encapsulation(b, c), F::decapsulation(b, c), F::decapsulation(a, b)};
  for (int i = 0; i < 4; ++i) {
    const auto u = net.add_node("U" + std::to_string(i + 1));
    net.add_edge(prev, u);
    net.add_function(u, chain[i]);
    prev = u;
  }
  const auto d = net.add_node("D");
  net.add_edge(prev, d);
  net.add_function(d, F::passive(a));
  return net;
}

/// Nodes S, A, B, D. The only feasible route is S A B A B D, crossing A->B
/// twice. `ab_bandwidth` sets q_b(A->B); all other edges have 10.
inline Network loop_net(double ab_bandwidth = 10.0) {
  Network net;
  const auto a = net.add_protocol("a");
  const auto b = net.add_protocol("b");
  const auto s = net.add_node("S");
  const auto na = net.add_node("A");
  const auto nb = net.add_node("B");
  const auto d = net.add_node("D");
  net.add_edge(s, na, 10.0);
  net.add_edge(na, nb, ab_bandwidth);
  net.add_edge(nb, na, 10.0);
  net.add_edge(nb, d, 10.0);
  net.add_function(s, F::passive(a));
  net.add_function(na, F::encapsulation(a, b));
  net.add_function(na, F::decapsulation(a, b));
  net.add_function(nb, F::passive(b));
  net.add_function(nb, F::passive(a));
  net.add_function(d, F::passive(a));
  return net;
}

struct Instance {
  Network net;
  NodeId source = 0;
  NodeId dest = 0;
};

struct RandomSpec {
  std::size_t min_nodes = 3;
  std::size_t max_nodes = 8;
  std::size_t max_protocols = 3;
  double min_density = 0.25;
  double max_density = 0.6;
  double min_p = 0.1;
  double max_p = 0.9;
  int min_weight = 1;
  int max_weight = 3;
  std::size_t qos_dimension = 0;
  int bandwidth_min = 1;
  int bandwidth_max = 10;
};

/// Random digraph (each ordered pair independently), random functions, and
/// random integer weights on every (U, f, V) triple. S = 0, D = n-1.
inline Instance random_instance(std::uint64_t seed, const RandomSpec& spec = {}) {
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(spec.min_nodes), static_cast<std::int64_t>(spec.max_nodes)));
  const double density = spec.min_density + (spec.max_density - spec.min_density) * rng.uniform01();
  Digraph g;
  g.n = n;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && rng.uniform01() < density) g.edges.emplace_back(u, v);
    }
  }
  GenParams params;
  params.protocols = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(spec.max_protocols)));
  params.p = spec.min_p + (spec.max_p - spec.min_p) * rng.uniform01();
  params.seed = rng.next();
  params.qos_dimension = spec.qos_dimension;
  params.bandwidth_min = spec.bandwidth_min;
  params.bandwidth_max = spec.bandwidth_max;
  params.qos_min = 1;
  params.qos_max = 5;
  Instance inst;
  inst.net = allocate_functions(g, params);
  for (const auto& e : inst.net.edges()) {
    for (const auto& f : inst.net.functions(e.from)) {
      inst.net.set_weight(e.from, f, e.to, static_cast<double>(rng.uniform_int(spec.min_weight, spec.max_weight)));
    }
  }
  inst.source = 0;
  inst.dest = static_cast<NodeId>(n - 1);
  return inst;
}

}  // namespace fixtures
