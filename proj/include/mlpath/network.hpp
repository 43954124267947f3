#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mlpath/types.hpp"

namespace mlpath {

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double bandwidth = 1.0;
  std::vector<double> qos;

  bool operator==(const Edge&) const = default;
};

/// A multi-layer network: simple digraph, protocol alphabet, per-node
/// adaptation functions, and weight / bandwidth / additive-QoS maps.
///
/// Built incrementally through the add_* methods, then treated as an
/// immutable value. Weight triples (U, f, V) that were never set read as 1.0,
/// so the hop metric needs no explicit table.
class Network {
 public:
  static constexpr double kDefaultWeight = 1.0;

  ProtocolId add_protocol(std::string name) {
    if (protocols_.size() >= kMaxProtocols) throw std::length_error("too many protocols");
    if (find_protocol(name)) throw std::invalid_argument("duplicate protocol '" + name + "'");
    protocols_.push_back(std::move(name));
    return static_cast<ProtocolId>(protocols_.size() - 1);
  }

  NodeId add_node(std::string name = {}) {
    const auto id = static_cast<NodeId>(nodes_.size());
    if (name.empty()) name = std::to_string(id);
    if (node_index_.contains(name)) throw std::invalid_argument("duplicate node '" + name + "'");
    node_index_.emplace(name, id);
    nodes_.push_back(std::move(name));
    functions_.emplace_back();
    out_.emplace_back();
    in_set_.emplace_back();
    out_set_.emplace_back();
    return id;
  }

  /// Adds the edge (u, v). The QoS vector length fixes the network's
  /// dimension m on the first edge; later edges must match it.
  EdgeId add_edge(NodeId u, NodeId v, double bandwidth = 1.0, std::vector<double> qos = {}) {
    check_node(u);
    check_node(v);
    if (bandwidth <= 0.0) throw std::invalid_argument("edge bandwidth must be positive");
    if (qos_dim_) {
      if (qos.size() != *qos_dim_) throw std::invalid_argument("QoS vector length mismatch");
    } else {
      qos_dim_ = qos.size();
    }
    for (double q : qos) {
      if (q < 0.0) throw std::invalid_argument("QoS values must be non-negative");
    }
    const auto key = pair_key(u, v);
    if (edge_index_.contains(key)) throw std::invalid_argument("parallel edge " + nodes_[u] + "->" + nodes_[v]);
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back(Edge{u, v, bandwidth, std::move(qos)});
    edge_index_.emplace(key, id);
    out_[u].push_back(id);
    return id;
  }

  void add_function(NodeId u, AdaptationFunction f) {
    check_node(u);
    if (f.from >= protocols_.size() || f.to >= protocols_.size()) {
      throw std::invalid_argument("adaptation function references unknown protocol");
    }
    auto& fs = functions_[u];
    auto it = std::lower_bound(fs.begin(), fs.end(), f);
    if (it != fs.end() && *it == f) return;
    fs.insert(it, f);
    in_set_[u].insert(f.input());
    out_set_[u].insert(f.output());
  }

  void set_weight(NodeId u, AdaptationFunction f, NodeId v, double w) {
    if (w < 0.0) throw std::invalid_argument("weights must be non-negative");
    if (!find_edge(u, v)) throw std::invalid_argument("weight on a missing edge");
    if (!has_function(u, f)) throw std::invalid_argument("weight on a function absent from the node");
    weights_[weight_key(u, f, v)] = w;
  }

  void clear_weights() { weights_.clear(); }

  /// Fixes m for a network that may end up with no edges.
  void set_qos_dimension(std::size_t m) {
    if (qos_dim_ && *qos_dim_ != m && !edges_.empty()) throw std::invalid_argument("QoS dimension already fixed");
    qos_dim_ = m;
  }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t protocol_count() const { return protocols_.size(); }
  std::size_t qos_dimension() const { return qos_dim_.value_or(0); }

  const std::string& node_name(NodeId u) const { return nodes_.at(u); }
  const std::string& protocol_name(ProtocolId p) const { return protocols_.at(p); }
  const std::vector<std::string>& protocol_names() const { return protocols_; }
  const std::vector<std::string>& node_names() const { return nodes_; }

  std::optional<NodeId> find_node(const std::string& name) const {
    auto it = node_index_.find(name);
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ProtocolId> find_protocol(const std::string& name) const {
    for (std::size_t i = 0; i < protocols_.size(); ++i) {
      if (protocols_[i] == name) return static_cast<ProtocolId>(i);
    }
    return std::nullopt;
  }

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const EdgeId> out_edges(NodeId u) const { return out_.at(u); }

  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const {
    auto it = edge_index_.find(pair_key(u, v));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  /// F(U), sorted and duplicate-free.
  const std::vector<AdaptationFunction>& functions(NodeId u) const { return functions_.at(u); }

  bool has_function(NodeId u, AdaptationFunction f) const {
    const auto& fs = functions_.at(u);
    return std::binary_search(fs.begin(), fs.end(), f);
  }

  /// In(U): protocols U can receive.
  ProtocolSet in_set(NodeId u) const { return in_set_.at(u); }
  /// Out(U): protocols U can send.
  ProtocolSet out_set(NodeId u) const { return out_set_.at(u); }

  double weight(NodeId u, AdaptationFunction f, NodeId v) const {
    auto it = weights_.find(weight_key(u, f, v));
    return it == weights_.end() ? kDefaultWeight : it->second;
  }

  /// Explicitly set weight triples as ((U, f, V), w), sorted for stable output.
  std::vector<std::pair<std::tuple<NodeId, AdaptationFunction, NodeId>, double>> explicit_weights() const {
    std::vector<std::pair<std::tuple<NodeId, AdaptationFunction, NodeId>, double>> out;
    out.reserve(weights_.size());
    for (const auto& [key, w] : weights_) out.emplace_back(decode_weight_key(key), w);
    std::sort(out.begin(), out.end());
    return out;
  }

  bool operator==(const Network& o) const {
    return nodes_ == o.nodes_ && protocols_ == o.protocols_ && edges_ == o.edges_ &&
           functions_ == o.functions_ && weights_ == o.weights_ && qos_dimension() == o.qos_dimension();
  }

 private:
  static std::uint64_t pair_key(NodeId u, NodeId v) { return (std::uint64_t{u} << 32) | v; }

  // 24 bits per node id, 16 bits of function code.
  static std::uint64_t weight_key(NodeId u, AdaptationFunction f, NodeId v) {
    return (std::uint64_t{u} << 40) | (std::uint64_t{v} << 16) | function_code(f);
  }
  static std::tuple<NodeId, AdaptationFunction, NodeId> decode_weight_key(std::uint64_t key) {
    const auto code = static_cast<std::uint32_t>(key & 0xFFFF);
    AdaptationFunction f{static_cast<FunctionKind>(code / (kMaxProtocols * kMaxProtocols)),
                         static_cast<ProtocolId>((code / kMaxProtocols) % kMaxProtocols),
                         static_cast<ProtocolId>(code % kMaxProtocols)};
    return {static_cast<NodeId>(key >> 40), f, static_cast<NodeId>((key >> 16) & 0xFFFFFF)};
  }

  void check_node(NodeId u) const {
    if (u >= nodes_.size()) throw std::out_of_range("unknown node id " + std::to_string(u));
  }

  std::vector<std::string> nodes_;
  std::unordered_map<std::string, NodeId> node_index_;
  std::vector<std::string> protocols_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, EdgeId> edge_index_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<AdaptationFunction>> functions_;
  std::vector<ProtocolSet> in_set_;
  std::vector<ProtocolSet> out_set_;
  std::unordered_map<std::uint64_t, double> weights_;
  std::optional<std::size_t> qos_dim_;
};

inline ProtocolSet in_set(const Network& net, NodeId u) { return net.in_set(u); }
inline ProtocolSet out_set(const Network& net, NodeId u) { return net.out_set(u); }

inline std::string to_string(const Network& net, const AdaptationFunction& f) {
  const auto& a = net.protocol_name(f.from);
  const auto& b = net.protocol_name(f.to);
  switch (f.kind) {
    case FunctionKind::Conversion: return "(" + a + "->" + b + ")";
    case FunctionKind::Encapsulation: return "(" + a + "->" + a + b + ")";
    case FunctionKind::Decapsulation: return "~(" + a + "->" + a + b + ")";
  }
  return "?";
}

inline std::string to_string(const Network& net, const TaggedProtocol& s) {
  const auto& name = net.protocol_name(s.protocol);
  switch (s.tag) {
    case SymbolTag::Plain: return name;
    case SymbolTag::Push: return name + "^";
    case SymbolTag::Pop: return name + "_";
  }
  return "?";
}

inline std::string to_string(const Network& net, const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ' ';
    out += to_string(net, t[i]);
  }
  return out;
}

}  // namespace mlpath
