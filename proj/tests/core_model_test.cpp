#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace mlpath;
using namespace fixtures;

namespace {

MLPath make_path(NodeId s, ProtocolId emitted, std::vector<PathStep> steps, NodeId d) {
  MLPath p;
  p.source = s;
  p.emitted = emitted;
  p.steps = std::move(steps);
  p.dest = d;
  return p;
}

// Random walk of up to `len` steps that follows edges and node functions
// but ignores protocol continuity, so many walks are infeasible.
MLPath random_walk(const Network& net, Rng& rng, std::size_t len) {
  MLPath p;
  p.source = 0;
  p.emitted = static_cast<ProtocolId>(rng.uniform_int(0, static_cast<std::int64_t>(net.protocol_count()) - 1));
  NodeId at = 0;
  for (std::size_t i = 0; i <= len; ++i) {
    const auto out = net.out_edges(at);
    if (out.empty()) break;
    const NodeId next = net.edge(out[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(out.size()) - 1))]).to;
    const auto& fs = net.functions(next);
    if (i == len || fs.empty()) {
      p.dest = next;
      return p;
    }
    p.steps.push_back({next, fs[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(fs.size()) - 1))]});
    at = next;
  }
  p.dest = p.steps.empty() ? 1 : p.steps.back().node;
  if (!p.steps.empty()) p.steps.pop_back();
  return p;
}

}  // namespace

TEST(Feasibility, PassivePathIsFeasible) {
  const auto net = passive_net();
  const auto rep = check_feasibility(net, make_path(0, 0, {{1, F::passive(0)}}, 2));
  EXPECT_TRUE(rep.feasible);
  EXPECT_FALSE(rep.failure);
  EXPECT_TRUE(rep.final_stack.empty());
}

TEST(Feasibility, EncapThenDecapIsFeasible) {
  const auto net = encap_net();
  const auto rep = check_feasibility(net, make_path(0, 0, {{1, F::encapsulation(0, 1)}, {2, F::decapsulation(0, 1)}}, 3));
  EXPECT_TRUE(rep.feasible);
}

TEST(Feasibility, DecapWithWrongTopReportsWrongDecapOrder) {
  // a in b, then b in b; the first decap expects a on top but finds b.
  Network net;
  const auto a = net.add_protocol("a");
  const auto b = net.add_protocol("b");
  for (int i = 0; i < 5; ++i) net.add_node();
  for (NodeId u = 0; u < 4; ++u) net.add_edge(u, u + 1);
  net.add_function(0, F::passive(a));
  net.add_function(1, F::encapsulation(a, b));
  net.add_function(2, F::encapsulation(b, b));
  net.add_function(3, F::decapsulation(a, b));
  net.add_function(4, F::passive(a));
  const auto rep = check_feasibility(
      net, make_path(0, a, {{1, F::encapsulation(a, b)}, {2, F::encapsulation(b, b)}, {3, F::decapsulation(a, b)}}, 4));
  ASSERT_FALSE(rep.feasible);
  EXPECT_EQ(rep.failure->reason, FailureReason::WrongDecapOrder);
  EXPECT_EQ(rep.failure->step, 3u);
}

TEST(Feasibility, FailureReasons) {
  const auto enc = encap_net();
  // Decap with an empty stack.
  Network net = enc;
  net.add_function(1, F::decapsulation(0, 0));
  auto rep = check_feasibility(net, make_path(0, 0, {{1, F::decapsulation(0, 0)}, {2, F::decapsulation(0, 1)}}, 3));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::StackUnderflow);
  EXPECT_EQ(rep.failure->step, 1u);

  // Encapsulated packet reaches D.
  Network open = enc;
  open.add_edge(1, 3);
  rep = check_feasibility(open, make_path(0, 0, {{1, F::encapsulation(0, 1)}}, 3));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::ProtocolMismatch);  // D cannot receive b
  open.add_function(3, F::passive(1));
  rep = check_feasibility(open, make_path(0, 0, {{1, F::encapsulation(0, 1)}}, 3));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::StackNonEmptyAtDest);
  EXPECT_EQ(rep.failure->step, 2u);
  EXPECT_EQ(rep.final_stack, ProtocolStack{0});

  rep = check_feasibility(enc, make_path(0, 0, {{2, F::decapsulation(0, 1)}}, 3));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::NotAnEdge);
  EXPECT_EQ(rep.failure->step, 0u);

  rep = check_feasibility(enc, make_path(0, 0, {{1, F::passive(0)}}, 2));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::FunctionUnavailable);

  rep = check_feasibility(enc, make_path(0, 1, {{1, F::encapsulation(0, 1)}}, 2));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::ProtocolMismatch);  // S cannot emit b
  EXPECT_EQ(rep.failure->step, 0u);
}

TEST(Feasibility, SourceNeverActsInTransit) {
  Network net = passive_net();
  net.add_edge(1, 0);
  net.add_edge(0, 1 + 1);
  const auto rep = check_feasibility(net, make_path(0, 0, {{1, F::passive(0)}, {0, F::passive(0)}}, 2));
  ASSERT_TRUE(rep.failure);
  EXPECT_EQ(rep.failure->reason, FailureReason::FunctionUnavailable);
  EXPECT_EQ(rep.failure->step, 2u);
}

TEST(Trace, Examples) {
  EXPECT_EQ(trace_of(make_path(0, 0, {{1, F::passive(0)}}, 2)), (Trace{TaggedProtocol::plain(0), TaggedProtocol::plain(0)}));
  EXPECT_EQ(trace_of(make_path(0, 0, {{1, F::encapsulation(0, 1)}, {2, F::decapsulation(0, 1)}}, 3)),
            (Trace{TaggedProtocol::push(0), TaggedProtocol::pop(1), TaggedProtocol::plain(0)}));
  const auto nested = make_path(0, 0,
                                {{1, F::encapsulation(0, 1)},
                                 {2, F::encapsulation(1, 2)},
                                 {3, F::decapsulation(1, 2)},
                                 {4, F::decapsulation(0, 1)}},
                                5);
  EXPECT_TRUE(check_feasibility(nested_net(), nested).feasible);
  EXPECT_EQ(trace_of(nested), (Trace{TaggedProtocol::push(0), TaggedProtocol::push(1), TaggedProtocol::pop(2),
                                     TaggedProtocol::pop(1), TaggedProtocol::plain(0)}));
}

TEST(ProtocolSets, Examples) {
  Network net;
  const auto a = net.add_protocol("a");
  const auto b = net.add_protocol("b");
  const auto u = net.add_node();
  EXPECT_TRUE(in_set(net, u).empty());
  EXPECT_TRUE(out_set(net, u).empty());
  net.add_function(u, F::encapsulation(a, b));
  EXPECT_EQ(in_set(net, u).to_vector(), std::vector<ProtocolId>{a});
  EXPECT_EQ(out_set(net, u).to_vector(), std::vector<ProtocolId>{b});

  const auto v = net.add_node();
  net.add_function(v, F::decapsulation(a, b));
  net.add_function(v, F::passive(a));
  EXPECT_EQ(in_set(net, v).to_vector(), (std::vector<ProtocolId>{a, b}));
  EXPECT_EQ(out_set(net, v).to_vector(), std::vector<ProtocolId>{a});
}

TEST(ProtocolSets, MatchIndependentDerivation) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = random_instance(seed);
    for (NodeId u = 0; u < inst.net.node_count(); ++u) {
      for (ProtocolId x = 0; x < inst.net.protocol_count(); ++x) {
        EXPECT_EQ(inst.net.in_set(u).contains(x), oracle::node_receives(inst.net, u, x));
      }
      EXPECT_EQ(inst.net.out_set(u).to_vector(), oracle::node_sends(inst.net, u));
    }
  }
}

TEST(PathWeight, Examples) {
  Network net;
  net.add_protocol("a");
  for (int i = 0; i < 5; ++i) net.add_node();
  for (NodeId u = 0; u < 4; ++u) {
    net.add_edge(u, u + 1);
    net.add_function(u, F::passive(0));
  }
  net.add_function(4, F::passive(0));
  const auto p = make_path(0, 0, {{1, F::passive(0)}, {2, F::passive(0)}, {3, F::passive(0)}}, 4);
  EXPECT_DOUBLE_EQ(path_weight(net, p), 3.0);
  net.set_weight(1, F::passive(0), 2, 0.5);
  net.set_weight(2, F::passive(0), 3, 0.25);
  net.set_weight(3, F::passive(0), 4, 0.25);
  EXPECT_DOUBLE_EQ(path_weight(net, p), 1.0);

  const auto enc = with_metric(encap_net(), Metric::Encapsulations);
  EXPECT_DOUBLE_EQ(path_weight(enc, make_path(0, 0, {{1, F::encapsulation(0, 1)}, {2, F::decapsulation(0, 1)}}, 3)), 1.0);
}

TEST(PathWeight, SetWeightValidates) {
  Network net = passive_net();
  EXPECT_THROW(net.set_weight(1, F::passive(0), 0, 1.0), std::invalid_argument);  // no edge U->S
  EXPECT_THROW(net.set_weight(1, F::encapsulation(0, 0), 2, 1.0), std::invalid_argument);
  EXPECT_THROW(net.set_weight(1, F::passive(0), 2, -1.0), std::invalid_argument);
}

TEST(PathBandwidth, Examples) {
  const auto net = passive_net();
  const auto p = make_path(0, 0, {{1, F::passive(0)}}, 2);
  EXPECT_DOUBLE_EQ(path_bandwidth(net, p), 10.0);

  const auto loop = loop_net(10.0);
  const auto lp = make_path(0, 0,
                            {{1, F::encapsulation(0, 1)}, {2, F::passive(1)}, {1, F::decapsulation(0, 1)}, {2, F::passive(0)}},
                            3);
  EXPECT_TRUE(check_feasibility(loop, lp).feasible);
  EXPECT_DOUBLE_EQ(path_bandwidth(loop, lp), 5.0);
  EXPECT_TRUE(has_repeated_edge(loop, lp));

  Network q;
  q.add_protocol("a");
  for (int i = 0; i < 5; ++i) q.add_node();
  for (NodeId u = 0; u < 4; ++u) {
    q.add_edge(u, u + 1, 3.0, {1.0});
    q.add_function(u, F::passive(0));
  }
  const auto qp = make_path(0, 0, {{1, F::passive(0)}, {2, F::passive(0)}, {3, F::passive(0)}}, 4);
  EXPECT_EQ(path_qos(q, qp), std::vector<double>{4.0});
}

TEST(PathBandwidth, AgreesWithPerHopRecount) {
  Rng rng(7);
  fixtures::RandomSpec spec;
  spec.qos_dimension = 2;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; checked < 1000; ++seed) {
    const auto inst = random_instance(seed, spec);
    const auto p = random_walk(inst.net, rng, static_cast<std::size_t>(rng.uniform_int(0, 12)));
    const auto nodes = p.nodes();
    std::vector<EdgeId> hops;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      auto e = inst.net.find_edge(nodes[i], nodes[i + 1]);
      if (!e) {
        ok = false;
        break;
      }
      hops.push_back(*e);
    }
    if (!ok) continue;
    ++checked;
    std::vector<double> qos(2, 0.0);
    double bw = std::numeric_limits<double>::infinity();
    for (EdgeId e : hops) {
      const auto times = static_cast<double>(std::count(hops.begin(), hops.end(), e));
      bw = std::min(bw, inst.net.edge(e).bandwidth / times);
      for (int i = 0; i < 2; ++i) qos[i] += inst.net.edge(e).qos[i];
    }
    EXPECT_DOUBLE_EQ(path_bandwidth(inst.net, p), bw);
    const auto got = path_qos(inst.net, p);
    EXPECT_DOUBLE_EQ(got[0], qos[0]);
    EXPECT_DOUBLE_EQ(got[1], qos[1]);
  }
}

TEST(Feasibility, FailureIsPrefixMonotone) {
  Rng rng(11);
  std::size_t failures = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto inst = random_instance(seed);
    const auto p = random_walk(inst.net, rng, 10);
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
      MLPath prefix = p;
      prefix.steps.resize(k);
      prefix.dest = p.steps[k].node;
      const auto pr = check_feasibility(inst.net, prefix);
      // Only failures inside the prefix count; the arrival test is not a prefix property.
      if (!pr.failure || pr.failure->step > k) continue;
      ++failures;
      const auto full = check_feasibility(inst.net, p);
      ASSERT_TRUE(full.failure);
      EXPECT_EQ(full.failure->step, pr.failure->step);
      EXPECT_EQ(full.failure->reason, pr.failure->reason);
    }
  }
  EXPECT_GT(failures, 100u);
}

TEST(PathWeight, AdditiveAtJunction) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 300 && checked < 200; ++seed) {
    const auto inst = random_instance(seed);
    oracle::for_each_feasible_path(inst.net, inst.source, inst.dest, 6, [&](const MLPath& p) {
      if (p.steps.size() < 2 || checked >= 200) return;
      ++checked;
      for (std::size_t k = 1; k < p.steps.size(); ++k) {
        // P = P1 (S .. U_k) + hop U_k -f_k-> U_{k+1} + P2 (U_k emitting f_k's output onwards).
        MLPath p1 = p;
        p1.steps.resize(k - 1);
        p1.dest = p.steps[k - 1].node;
        MLPath p2;
        p2.source = p.steps[k - 1].node;
        p2.emitted = p.steps[k - 1].function.output();
        p2.steps.assign(p.steps.begin() + static_cast<std::ptrdiff_t>(k), p.steps.end());
        p2.dest = p.dest;
        const double junction = inst.net.weight(p.steps[k - 1].node, p.steps[k - 1].function, p.steps[k].node);
        EXPECT_DOUBLE_EQ(path_weight(inst.net, p), path_weight(inst.net, p1) + junction + path_weight(inst.net, p2));
      }
    });
  }
  EXPECT_GE(checked, 50u);
}
