#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mlpath/network.hpp"
#include "mlpath/random.hpp"
#include "mlpath/topology_io.hpp"

namespace mlpath {

/// Plain simple digraph on nodes 0..n-1, used before functions are allocated.
struct Digraph {
  std::size_t n = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;

  bool has_edge(NodeId u, NodeId v) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(u, v)) != edges.end();
  }
  void add_symmetric(NodeId u, NodeId v) {
    edges.emplace_back(u, v);
    edges.emplace_back(v, u);
  }
  std::vector<std::vector<NodeId>> adjacency() const {
    std::vector<std::vector<NodeId>> adj(n);
    for (const auto& [u, v] : edges) adj[u].push_back(v);
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
  }
};

inline Digraph graph_of(const Network& net) {
  Digraph g;
  g.n = net.node_count();
  for (const auto& e : net.edges()) g.edges.emplace_back(e.from, e.to);
  return g;
}

/// Hop distances from `from` (max value when unreachable).
inline std::vector<std::size_t> bfs_distances(const std::vector<std::vector<NodeId>>& adj, NodeId from) {
  std::vector<std::size_t> dist(adj.size(), std::numeric_limits<std::size_t>::max());
  std::deque<NodeId> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : adj[u]) {
      if (dist[v] == std::numeric_limits<std::size_t>::max()) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

inline bool weakly_connected(const Digraph& g) {
  if (g.n == 0) return true;
  std::vector<std::vector<NodeId>> adj(g.n);
  for (const auto& [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  const auto dist = bfs_distances(adj, 0);
  return std::none_of(dist.begin(), dist.end(), [](std::size_t d) { return d == std::numeric_limits<std::size_t>::max(); });
}

/// Uniform simple graph with n nodes and m undirected links (G(n, M)), each
/// link as two opposite edges. Resampled until connected.
inline Digraph erdos_renyi_symmetric(std::size_t n, std::size_t m, Rng& rng) {
  const std::size_t max_links = n * (n - 1) / 2;
  if (n < 2 || m < n - 1 || m > max_links) throw std::invalid_argument("er graph needs n >= 2 and n-1 <= m <= n(n-1)/2");
  std::vector<std::pair<NodeId, NodeId>> all;
  all.reserve(max_links);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) all.emplace_back(u, v);
  }
  for (int attempt = 0; attempt < 10000; ++attempt) {
    // Partial Fisher-Yates: the first m entries are a uniform m-subset.
    for (std::size_t i = 0; i < m; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(all.size()) - 1));
      std::swap(all[i], all[j]);
    }
    Digraph g;
    g.n = n;
    std::vector<std::pair<NodeId, NodeId>> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(chosen.begin(), chosen.end());
    for (const auto& [u, v] : chosen) g.add_symmetric(u, v);
    if (weakly_connected(g)) return g;
  }
  throw std::runtime_error("could not draw a connected er graph; increase the link count");
}

/// Random k-regular simple graph by the pairing model, resampled until
/// simple and connected.
inline Digraph random_regular(std::size_t n, std::size_t k, Rng& rng) {
  if (k >= n || (n * k) % 2 != 0 || k < 1) throw std::invalid_argument("regular graph needs k < n and n*k even");
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<NodeId> points;
    for (NodeId u = 0; u < n; ++u) points.insert(points.end(), k, u);
    rng.shuffle(points);
    std::set<std::pair<NodeId, NodeId>> links;
    bool ok = true;
    for (std::size_t i = 0; i < points.size() && ok; i += 2) {
      auto u = points[i], v = points[i + 1];
      if (u > v) std::swap(u, v);
      ok = u != v && links.emplace(u, v).second;
    }
    if (!ok) continue;
    Digraph g;
    g.n = n;
    for (const auto& [u, v] : links) g.add_symmetric(u, v);
    if (weakly_connected(g)) return g;
  }
  throw std::runtime_error("could not draw a simple connected regular graph");
}

inline Digraph grid_graph(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("grid needs positive dimensions");
  Digraph g;
  g.n = rows * cols;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto id = static_cast<NodeId>(r * cols + c);
      if (c + 1 < cols) g.add_symmetric(id, id + 1);
      if (r + 1 < rows) g.add_symmetric(id, static_cast<NodeId>(id + cols));
    }
  }
  return g;
}

/// Edge list file: one "u v" pair per line, node ids 0..n-1, '#' comments.
/// Each pair becomes two opposite edges. A file starting with a section
/// header is read as a topology file and only its graph is kept.
inline Digraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  {
    std::istringstream probe(text);
    std::string line;
    while (std::getline(probe, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      if (line[first] == '[') return graph_of(parse_topology(text).net);
      break;
    }
  }

  Digraph g;
  std::set<std::pair<NodeId, NodeId>> links;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long u = 0, v = 0;
    if (!(fields >> u)) continue;
    std::string rest;
    if (!(fields >> v) || (fields >> rest) || u < 0 || v < 0 || u == v) {
      throw ParseError(line_no, 1, "edge list line must be two distinct non-negative node ids");
    }
    links.emplace(std::min(u, v), std::max(u, v));
    g.n = std::max<std::size_t>(g.n, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  for (const auto& [u, v] : links) g.add_symmetric(static_cast<NodeId>(u), static_cast<NodeId>(v));
  return g;
}

/// Graph specs: "er:N:M", "regular:N:K", "grid:R:C", "file:PATH".
inline Digraph make_graph(const std::string& spec, Rng& rng) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("graph spec '" + spec + "' has no kind prefix");
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (kind == "file") return load_graph_file(rest);

  const auto sep = rest.find(':');
  std::size_t a = 0, b = 0;
  try {
    if (sep == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    a = std::stoul(rest.substr(0, sep), &used);
    if (used != sep) throw std::invalid_argument("");
    b = std::stoul(rest.substr(sep + 1), &used);
    if (used != rest.size() - sep - 1) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("graph spec '" + spec + "' needs two integers");
  }
  if (kind == "er") return erdos_renyi_symmetric(a, b, rng);
  if (kind == "regular") return random_regular(a, b, rng);
  if (kind == "grid") return grid_graph(a, b);
  throw std::invalid_argument("unknown graph kind '" + kind + "'");
}

struct GenParams {
  double p = 0.5;
  std::size_t protocols = 2;
  std::uint64_t seed = 1;
  int bandwidth_min = 1;
  int bandwidth_max = 10;
  std::size_t qos_dimension = 0;
  int qos_min = 1;
  int qos_max = 10;
};

/// Protocol names a, b, ..., z, then p26, p27, ...
inline std::string protocol_label(std::size_t i) {
  return i < 26 ? std::string(1, static_cast<char>('a' + i)) : "p" + std::to_string(i);
}

/// Every candidate function of an alphabet of size k, in draw order:
/// kind (conv, encap, decap), then (from, to) lexicographic.
inline std::vector<AdaptationFunction> candidate_functions(std::size_t k) {
  std::vector<AdaptationFunction> out;
  out.reserve(3 * k * k);
  for (auto kind : {FunctionKind::Conversion, FunctionKind::Encapsulation, FunctionKind::Decapsulation}) {
    for (ProtocolId a = 0; a < k; ++a) {
      for (ProtocolId b = 0; b < k; ++b) out.push_back({kind, a, b});
    }
  }
  return out;
}

/// Builds a network over `g`. Each node receives each of the 3|A|^2
/// candidate functions independently with probability p: one uniform per
/// (node, function), nodes ascending then candidate_functions order, all
/// from stream 0 of the seed, kept when u < p. The draws do not depend on p,
/// so raising p only adds functions. Bandwidths (stream 1) and QoS values
/// (stream 2) are uniform integers drawn per edge in edge order.
inline Network allocate_functions(const Digraph& g, const GenParams& params) {
  if (params.p < 0.0 || params.p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
  if (params.protocols < 1 || params.protocols > kMaxProtocols) throw std::invalid_argument("protocol count out of range");
  if (params.bandwidth_min < 1 || params.bandwidth_max < params.bandwidth_min) throw std::invalid_argument("bad bandwidth range");
  if (params.qos_min < 0 || params.qos_max < params.qos_min) throw std::invalid_argument("bad QoS range");

  Network net;
  for (std::size_t i = 0; i < params.protocols; ++i) net.add_protocol(protocol_label(i));
  for (std::size_t u = 0; u < g.n; ++u) net.add_node();
  net.set_qos_dimension(params.qos_dimension);

  const Rng root(params.seed);
  Rng functions = root.split(0);
  Rng bandwidths = root.split(1);
  Rng qos = root.split(2);

  const auto candidates = candidate_functions(params.protocols);
  for (NodeId u = 0; u < g.n; ++u) {
    for (const auto& f : candidates) {
      if (functions.uniform01() < params.p) net.add_function(u, f);
    }
  }
  for (const auto& [u, v] : g.edges) {
    const auto bw = static_cast<double>(bandwidths.uniform_int(params.bandwidth_min, params.bandwidth_max));
    std::vector<double> q(params.qos_dimension);
    for (auto& x : q) x = static_cast<double>(qos.uniform_int(params.qos_min, params.qos_max));
    net.add_edge(u, v, bw, std::move(q));
  }
  return net;
}

/// Pair (S, D) at maximum hop distance; ties go to the smallest (S, D).
inline std::pair<NodeId, NodeId> diameter_endpoints(const Digraph& g) {
  if (g.n < 2) throw std::invalid_argument("diameter needs at least two nodes");
  if (!weakly_connected(g)) throw std::invalid_argument("graph is disconnected");
  const auto adj = g.adjacency();
  std::pair<NodeId, NodeId> best{0, 1};
  std::size_t best_dist = 0;
  for (NodeId s = 0; s < g.n; ++s) {
    const auto dist = bfs_distances(adj, s);
    for (NodeId d = 0; d < g.n; ++d) {
      if (d == s || dist[d] == std::numeric_limits<std::size_t>::max()) continue;
      if (dist[d] > best_dist) {
        best_dist = dist[d];
        best = {s, d};
      }
    }
  }
  return best;
}

/// Output of the Hamiltonian-path reduction.
struct HamReduction {
  Network net;
  NodeId source = 0;
  NodeId dest = 0;
  double min_bandwidth = 1.0;
  /// split[u][i] is the copy U_{i+1} of original node u.
  std::vector<std::array<NodeId, 4>> split;
  std::vector<NodeId> tail;  // C_0 = S, ..., C_{n+1}
  NodeId x = 0;
};

/// Maps a symmetric digraph H and endpoints (s, d) to a network in which a
/// path crossing every edge at most once exists iff H has a Hamiltonian
/// path from s to d. Protocols {a, b}; all bandwidths and the floor are 1.
///
/// S and D also carry the passive (a->a): S must be able to send a and D to
/// receive it.
inline HamReduction sym_ham_reduce(const Digraph& h, NodeId s, NodeId d) {
  if (s == d || s >= h.n || d >= h.n) throw std::invalid_argument("reduction needs distinct endpoints inside the graph");
  for (const auto& [u, v] : h.edges) {
    if (!h.has_edge(v, u)) throw std::invalid_argument("reduction input must be symmetric");
  }
  const std::size_t n = h.n;
  HamReduction r;
  Network& net = r.net;
  const ProtocolId a = net.add_protocol("a");
  const ProtocolId b = net.add_protocol("b");

  r.tail.resize(n + 2);
  r.tail[0] = net.add_node("S");
  for (std::size_t i = 1; i <= n + 1; ++i) r.tail[i] = net.add_node("C" + std::to_string(i));
  r.split.resize(n);
  for (NodeId u = 0; u < n; ++u) {
    for (int i = 0; i < 4; ++i) r.split[u][i] = net.add_node("U" + std::to_string(u) + "_" + std::to_string(i + 1));
  }
  r.x = net.add_node("X");
  r.dest = net.add_node("D");
  r.source = r.tail[0];

  const auto link = [&](NodeId u, NodeId v) {
    net.add_edge(u, v, 1.0);
    net.add_edge(v, u, 1.0);
  };
  for (NodeId u = 0; u < n; ++u) {
    for (int i = 0; i < 3; ++i) link(r.split[u][i], r.split[u][i + 1]);
  }
  for (const auto& [u, v] : h.edges) net.add_edge(r.split[u][0], r.split[v][0], 1.0);
  for (std::size_t i = 0; i <= n; ++i) link(r.tail[i], r.tail[i + 1]);
  link(r.tail[n + 1], r.split[s][0]);
  link(r.split[d][0], r.x);
  link(r.x, r.dest);

  using F = AdaptationFunction;
  net.add_function(r.source, F::passive(a));
  net.add_function(r.dest, F::passive(a));
  for (std::size_t i = 1; i <= n; ++i) net.add_function(r.tail[i], F::encapsulation(a, a));
  net.add_function(r.tail[n + 1], F::encapsulation(a, b));
  for (NodeId u = 0; u < n; ++u) {
    const auto& c = r.split[u];
    net.add_function(c[0], F::encapsulation(b, b));
    net.add_function(c[0], F::encapsulation(a, b));
    net.add_function(c[1], F::decapsulation(b, b));
    net.add_function(c[1], F::passive(a));
    net.add_function(c[2], F::decapsulation(a, b));
    net.add_function(c[2], F::passive(a));
    net.add_function(c[3], F::decapsulation(a, a));
  }
  net.add_function(r.x, F::decapsulation(a, b));
  return r;
}

}  // namespace mlpath
