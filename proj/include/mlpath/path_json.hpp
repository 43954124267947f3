#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mlpath/path.hpp"
#include "mlpath/pipeline.hpp"

namespace mlpath {

inline nlohmann::json function_to_json(const Network& net, const AdaptationFunction& f) {
  return {{"kind", kind_name(f.kind)}, {"from", net.protocol_name(f.from)}, {"to", net.protocol_name(f.to)}};
}

/// Machine form of a computed path: names rather than ids, so it can be
/// checked against the topology file it came from.
inline nlohmann::json path_to_json(const Network& net, const PathResult& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.path.steps) {
    steps.push_back({{"node", net.node_name(s.node)}, {"function", function_to_json(net, s.function)}});
  }
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& sym : r.trace) trace.push_back(to_string(net, sym));
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId u : r.path.nodes()) nodes.push_back(net.node_name(u));
  return {
      {"source", net.node_name(r.path.source)},
      {"emitted", net.protocol_name(r.path.emitted)},
      {"steps", steps},
      {"dest", net.node_name(r.path.dest)},
      {"nodes", nodes},
      {"trace", trace},
      {"weight", r.weight},
      {"hops", r.path.hop_count()},
      {"bandwidth", path_bandwidth(net, r.path)},
      {"qos", path_qos(net, r.path)},
  };
}

struct PathFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads the source, emitted, steps and dest fields back into an MLPath.
/// Other fields are ignored.
inline MLPath path_from_json(const Network& net, const nlohmann::json& j) {
  const auto field = [&](const nlohmann::json& obj, const char* key) -> const nlohmann::json& {
    if (!obj.is_object() || !obj.contains(key)) throw PathFormatError(std::string("missing field '") + key + "'");
    return obj.at(key);
  };
  const auto text = [&](const nlohmann::json& obj, const char* key) {
    const auto& v = field(obj, key);
    if (!v.is_string()) throw PathFormatError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  };
  const auto node = [&](const std::string& name) {
    auto id = net.find_node(name);
    if (!id) throw PathFormatError("unknown node '" + name + "'");
    return *id;
  };
  const auto protocol = [&](const std::string& name) {
    auto id = net.find_protocol(name);
    if (!id) throw PathFormatError("unknown protocol '" + name + "'");
    return *id;
  };

  MLPath p;
  p.source = node(text(j, "source"));
  p.emitted = protocol(text(j, "emitted"));
  p.dest = node(text(j, "dest"));
  const auto& steps = field(j, "steps");
  if (!steps.is_array()) throw PathFormatError("field 'steps' must be an array");
  for (const auto& s : steps) {
    const auto& f = field(s, "function");
    FunctionKind kind{};
    try {
      kind = parse_kind(text(f, "kind"));
    } catch (const std::invalid_argument& e) {
      throw PathFormatError(e.what());
    }
    p.steps.push_back({node(text(s, "node")), {kind, protocol(text(f, "from")), protocol(text(f, "to"))}});
  }
  return p;
}

}  // namespace mlpath
