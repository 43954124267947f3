#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace mlpath;
using namespace fixtures;

namespace {

bool acyclic(const Network& net) {
  std::vector<int> indegree(net.node_count(), 0);
  for (const auto& e : net.edges()) ++indegree[e.to];
  std::vector<NodeId> ready;
  for (NodeId u = 0; u < net.node_count(); ++u) {
    if (indegree[u] == 0) ready.push_back(u);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const NodeId u = ready.back();
    ready.pop_back();
    ++seen;
    for (EdgeId e : net.out_edges(u)) {
      if (--indegree[net.edge(e).to] == 0) ready.push_back(net.edge(e).to);
    }
  }
  return seen == net.node_count();
}

RandomSpec dense_spec() {
  RandomSpec spec;
  spec.min_density = 0.4;
  spec.bandwidth_max = 5;
  return spec;
}

// First instance from `seed` on in which D is reachable from S.
Instance connected_instance(std::uint64_t seed, const RandomSpec& spec = dense_spec()) {
  for (;; ++seed) {
    auto inst = random_instance(seed, spec);
    if (bfs_distances(graph_of(inst.net).adjacency(), inst.source)[inst.dest] != std::numeric_limits<std::size_t>::max()) {
      return inst;
    }
  }
}

}  // namespace

TEST(DagHeuristic, NumberingPutsEndpointsAtTheEnds) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = connected_instance(seed * 7);
    const auto number = dag_numbering(inst.net, inst.source, inst.dest, seed);
    EXPECT_EQ(number[inst.source], 0u);
    EXPECT_EQ(number[inst.dest], inst.net.node_count() - 1);
    auto sorted = number;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
    EXPECT_EQ(number, dag_numbering(inst.net, inst.source, inst.dest, seed));
  }
}

TEST(DagHeuristic, DagifyIsAcyclicSubgraph) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = connected_instance(seed * 11);
    const auto dag = dagify(inst.net, inst.source, inst.dest, seed);
    EXPECT_TRUE(acyclic(dag));
    for (const auto& e : dag.edges()) {
      const auto orig = inst.net.find_edge(e.from, e.to);
      ASSERT_TRUE(orig);
      EXPECT_EQ(inst.net.edge(*orig), e);
      for (const auto& f : dag.functions(e.from)) EXPECT_EQ(dag.weight(e.from, f, e.to), inst.net.weight(e.from, f, e.to));
    }
    const auto pruned = prune_thin_edges(dag, 3.0);
    for (const auto& e : pruned.edges()) EXPECT_GE(e.bandwidth, 3.0);
  }
}

TEST(DagHeuristic, UnreachableDestinationThrows) {
  Network net = passive_net();
  net.add_node("Z");
  EXPECT_THROW(dag_numbering(net, 0, 3, 1), std::invalid_argument);
}

TEST(DagHeuristic, ResultsAreFeasibleAndMeetTheFloor) {
  // Small nets and bandwidths keep the exhaustive oracle cheap.
  RandomSpec spec = dense_spec();
  spec.max_nodes = 6;
  spec.bandwidth_max = 4;
  std::size_t dag_found = 0, exact_found = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto inst = connected_instance(seed * 13, spec);
    const double floor = 2.0;
    DagOptions opt;
    opt.seed = seed;
    opt.restarts = 3;
    const auto r = dag_pda(inst.net, inst.source, inst.dest, floor, Metric::Custom, opt);
    const auto exact = oracle::constrained_optimum(inst.net, inst.source, inst.dest, floor, {});
    if (exact) ++exact_found;
    if (!r) continue;
    ++dag_found;
    EXPECT_TRUE(check_feasibility(inst.net, r->path).feasible);
    EXPECT_FALSE(has_repeated_edge(inst.net, r->path));
    EXPECT_GE(path_bandwidth(inst.net, r->path), floor);
    EXPECT_DOUBLE_EQ(path_weight(inst.net, r->path), r->weight);
    ASSERT_TRUE(exact) << "seed " << seed;
    EXPECT_GE(r->weight, *exact);
  }
  EXPECT_LE(dag_found, exact_found);
  EXPECT_GT(dag_found, 0u);
}

TEST(DagHeuristic, PdaAndBfsAgreeOnTheSameDag) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto inst = connected_instance(seed * 17);
    DagOptions opt;
    opt.seed = seed;
    const auto a = dag_pda(inst.net, inst.source, inst.dest, 2.0, Metric::Custom, opt);
    const auto b = dag_bfs(inst.net, inst.source, inst.dest, 2.0, std::nullopt, Metric::Custom, opt);
    ASSERT_EQ(a.has_value(), b.has_value()) << "seed " << seed;
    if (a) {
      EXPECT_DOUBLE_EQ(a->weight, b->weight);
    }
  }
}

TEST(DagHeuristic, RestartsOnlyHelpAndWorkersDoNotMatter) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto inst = connected_instance(seed * 19);
    DagOptions one;
    one.seed = seed;
    DagOptions many = one;
    many.restarts = 6;
    DagOptions parallel = many;
    parallel.workers = 3;
    const auto a = dag_pda(inst.net, inst.source, inst.dest, 1.0, Metric::Hops, one);
    const auto b = dag_pda(inst.net, inst.source, inst.dest, 1.0, Metric::Hops, many);
    const auto c = dag_pda(inst.net, inst.source, inst.dest, 1.0, Metric::Hops, parallel);
    if (a) {
      ASSERT_TRUE(b);
      EXPECT_LE(b->weight, a->weight);
    }
    ASSERT_EQ(b.has_value(), c.has_value());
    if (b) {
      EXPECT_EQ(b->path, c->path);
    }
  }
}

TEST(DagHeuristic, LoopOnlyRouteIsLost) {
  // The only route repeats A->B, which no orientation keeps.
  EXPECT_FALSE(dag_pda(loop_net(), 0, 3, 1.0));
  EXPECT_THROW(dag_pda(loop_net(), 0, 3, 0.0), std::invalid_argument);
}
