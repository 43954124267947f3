#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlpath/network.hpp"

namespace mlpath {

/// A network plus the optional endpoints recorded with it.
struct Topology {
  Network net;
  std::optional<NodeId> source;
  std::optional<NodeId> dest;

  bool operator==(const Topology&) const = default;
};

struct ParseError : std::runtime_error {
  std::size_t line;
  std::size_t column;

  ParseError(std::size_t line_no, std::size_t col, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_no) + ", column " + std::to_string(col) + ": " + message),
        line(line_no),
        column(col) {}
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                    ch == '-' || ch == '.' || ch == ':';
    if (!ok) return false;
  }
  return s.front() != '[';
}

class TopologyParser {
 public:
  Topology parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++line_no_;
      handle(line);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    return std::move(topo_);
  }

 private:
  enum class Section { None, Protocols, Nodes, Edges, Functions, Weights, Endpoints, Qos };

  [[noreturn]] void fail(std::size_t column, const std::string& message) const {
    throw ParseError(line_no_, column, message);
  }

  void handle(std::string_view line) {
    const auto tokens = tokenize(line);
    if (tokens.empty()) return;
    const auto& first = tokens.front();
    if (first.text.front() == '[') {
      if (tokens.size() != 1 || first.text.back() != ']') fail(first.column, "malformed section header");
      open_section(first);
      return;
    }
    switch (section_) {
      case Section::None: fail(first.column, "content before the first section header");
      case Section::Protocols: return protocols(tokens);
      case Section::Nodes: return nodes(tokens);
      case Section::Edges: return edges(tokens);
      case Section::Functions: return functions(tokens);
      case Section::Weights: return weights(tokens);
      case Section::Endpoints: return endpoints(tokens);
      case Section::Qos: return qos(tokens);
    }
  }

  void open_section(const Token& t) {
    const auto name = t.text.substr(1, t.text.size() - 2);
    Section s = Section::None;
    if (name == "protocols") s = Section::Protocols;
    else if (name == "nodes") s = Section::Nodes;
    else if (name == "edges") s = Section::Edges;
    else if (name == "functions") s = Section::Functions;
    else if (name == "weights") s = Section::Weights;
    else if (name == "endpoints") s = Section::Endpoints;
    else if (name == "qos") s = Section::Qos;
    else fail(t.column, "unknown section '" + std::string(name) + "'");
    const auto idx = static_cast<std::size_t>(s);
    if (seen_[idx]) fail(t.column, "duplicate section '" + std::string(name) + "'");
    seen_[idx] = true;
    section_ = s;
  }

  void protocols(const std::vector<Token>& ts) {
    for (const auto& t : ts) {
      if (!valid_name(t.text)) fail(t.column, "invalid protocol name '" + std::string(t.text) + "'");
      if (topo_.net.find_protocol(std::string(t.text))) fail(t.column, "duplicate protocol '" + std::string(t.text) + "'");
      if (topo_.net.protocol_count() >= kMaxProtocols) fail(t.column, "too many protocols");
      topo_.net.add_protocol(std::string(t.text));
    }
  }

  void nodes(const std::vector<Token>& ts) {
    for (const auto& t : ts) {
      if (!valid_name(t.text)) fail(t.column, "invalid node name '" + std::string(t.text) + "'");
      if (topo_.net.find_node(std::string(t.text))) fail(t.column, "duplicate node '" + std::string(t.text) + "'");
      topo_.net.add_node(std::string(t.text));
    }
  }

  NodeId node(const Token& t) const {
    auto id = topo_.net.find_node(std::string(t.text));
    if (!id) fail(t.column, "unknown node '" + std::string(t.text) + "'");
    return *id;
  }

  ProtocolId protocol(const Token& t) const {
    auto id = topo_.net.find_protocol(std::string(t.text));
    if (!id) fail(t.column, "unknown protocol '" + std::string(t.text) + "'");
    return *id;
  }

  double number(const Token& t, std::string_view text) const {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) fail(t.column, "expected a number, got '" + std::string(text) + "'");
    return v;
  }

  AdaptationFunction function(const std::vector<Token>& ts, std::size_t at) const {
    FunctionKind kind{};
    try {
      kind = parse_kind(ts[at].text);
    } catch (const std::invalid_argument&) {
      fail(ts[at].column, "unknown function kind '" + std::string(ts[at].text) + "' (expected conv, encap or decap)");
    }
    return {kind, protocol(ts[at + 1]), protocol(ts[at + 2])};
  }

  // U V [bandwidth=B] [qos=q1,q2,...]
  void edges(const std::vector<Token>& ts) {
    if (ts.size() < 2) fail(ts.front().column, "edge needs two endpoints");
    const NodeId u = node(ts[0]);
    const NodeId v = node(ts[1]);
    double bandwidth = 1.0;
    std::vector<double> q;
    bool has_bw = false;
    bool has_qos = false;
    for (std::size_t i = 2; i < ts.size(); ++i) {
      const auto eq = ts[i].text.find('=');
      if (eq == std::string_view::npos) fail(ts[i].column, "expected key=value");
      const auto key = ts[i].text.substr(0, eq);
      const auto value = ts[i].text.substr(eq + 1);
      if (key == "bandwidth" && !has_bw) {
        has_bw = true;
        bandwidth = number(ts[i], value);
        if (!(bandwidth > 0.0)) fail(ts[i].column, "bandwidth must be positive");
      } else if (key == "qos" && !has_qos) {
        has_qos = true;
        std::size_t start = 0;
        while (start <= value.size()) {
          const auto comma = value.find(',', start);
          const auto item = value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
          const double x = number(ts[i], item);
          if (x < 0.0) fail(ts[i].column, "QoS values must be non-negative");
          q.push_back(x);
          if (comma == std::string_view::npos) break;
          start = comma + 1;
        }
      } else {
        fail(ts[i].column, "unknown or repeated edge key '" + std::string(key) + "'");
      }
    }
    if (topo_.net.find_edge(u, v)) fail(ts[0].column, "duplicate edge " + std::string(ts[0].text) + " " + std::string(ts[1].text));
    if (topo_.net.edge_count() > 0 || qos_dim_) {
      const auto m = topo_.net.edge_count() > 0 ? topo_.net.qos_dimension() : *qos_dim_;
      if (q.size() != m) fail(ts[0].column, "edge has " + std::to_string(q.size()) + " QoS values, expected " + std::to_string(m));
    }
    topo_.net.add_edge(u, v, bandwidth, std::move(q));
  }

  // U kind from to
  void functions(const std::vector<Token>& ts) {
    if (ts.size() != 4) fail(ts.front().column, "function line is: node kind from to");
    topo_.net.add_function(node(ts[0]), function(ts, 1));
  }

  // U kind from to V weight
  void weights(const std::vector<Token>& ts) {
    if (ts.size() != 6) fail(ts.front().column, "weight line is: node kind from to next weight");
    const NodeId u = node(ts[0]);
    const auto f = function(ts, 1);
    const NodeId v = node(ts[4]);
    const double w = number(ts[5], ts[5].text);
    if (w < 0.0) fail(ts[5].column, "weights must be non-negative");
    if (!topo_.net.find_edge(u, v)) fail(ts[4].column, "weight on a missing edge");
    if (!topo_.net.has_function(u, f)) fail(ts[1].column, "weight on a function the node does not have");
    topo_.net.set_weight(u, f, v, w);
  }

  void endpoints(const std::vector<Token>& ts) {
    if (ts.size() != 2) fail(ts.front().column, "endpoint line is: source|dest node");
    if (ts[0].text == "source" && !topo_.source) {
      topo_.source = node(ts[1]);
    } else if (ts[0].text == "dest" && !topo_.dest) {
      topo_.dest = node(ts[1]);
    } else {
      fail(ts[0].column, "unknown or repeated endpoint key '" + std::string(ts[0].text) + "'");
    }
  }

  void qos(const std::vector<Token>& ts) {
    if (ts.size() != 2 || ts[0].text != "dimension" || qos_dim_) fail(ts.front().column, "qos section holds one line: dimension M");
    const double m = number(ts[1], ts[1].text);
    if (m < 0 || m != static_cast<double>(static_cast<std::size_t>(m))) fail(ts[1].column, "dimension must be a non-negative integer");
    if (topo_.net.edge_count() > 0) fail(ts[0].column, "qos section must precede the edges");
    qos_dim_ = static_cast<std::size_t>(m);
    topo_.net.set_qos_dimension(*qos_dim_);
  }

  Topology topo_;
  Section section_ = Section::None;
  bool seen_[8] = {};
  std::size_t line_no_ = 0;
  std::optional<std::size_t> qos_dim_;
};

inline std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses the sectioned text format (see docs/topology-format.md).
inline Topology parse_topology(std::string_view text) { return detail::TopologyParser{}.parse(text); }

inline Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_topology(ss.str());
}

/// Canonical text form; parse_topology(serialize_topology(t)) == t.
inline std::string serialize_topology(const Network& net, std::optional<NodeId> source = std::nullopt,
                                      std::optional<NodeId> dest = std::nullopt) {
  using detail::format_number;
  std::string out;
  const auto fn = [&](const AdaptationFunction& f) {
    return std::string(kind_name(f.kind)) + " " + net.protocol_name(f.from) + " " + net.protocol_name(f.to);
  };

  out += "[protocols]\n";
  for (const auto& p : net.protocol_names()) out += p + "\n";
  if (net.qos_dimension() > 0) out += "\n[qos]\ndimension " + std::to_string(net.qos_dimension()) + "\n";
  out += "\n[nodes]\n";
  for (const auto& n : net.node_names()) out += n + "\n";
  out += "\n[edges]\n";
  for (const auto& e : net.edges()) {
    out += net.node_name(e.from) + " " + net.node_name(e.to) + " bandwidth=" + format_number(e.bandwidth);
    if (!e.qos.empty()) {
      out += " qos=";
      for (std::size_t i = 0; i < e.qos.size(); ++i) out += (i ? "," : "") + format_number(e.qos[i]);
    }
    out += "\n";
  }
  out += "\n[functions]\n";
  for (NodeId u = 0; u < net.node_count(); ++u) {
    for (const auto& f : net.functions(u)) out += net.node_name(u) + " " + fn(f) + "\n";
  }
  const auto weights = net.explicit_weights();
  if (!weights.empty()) {
    out += "\n[weights]\n";
    for (const auto& [key, w] : weights) {
      const auto& [u, f, v] = key;
      out += net.node_name(u) + " " + fn(f) + " " + net.node_name(v) + " " + format_number(w) + "\n";
    }
  }
  if (source || dest) {
    out += "\n[endpoints]\n";
    if (source) out += "source " + net.node_name(*source) + "\n";
    if (dest) out += "dest " + net.node_name(*dest) + "\n";
  }
  return out;
}

inline std::string serialize_topology(const Topology& t) { return serialize_topology(t.net, t.source, t.dest); }

}  // namespace mlpath
