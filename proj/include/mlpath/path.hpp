#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlpath/network.hpp"

namespace mlpath {

/// Encapsulated protocols, bottom to top. The top is the last protocol
/// wrapped beneath the current one.
using ProtocolStack = std::vector<ProtocolId>;

struct PathStep {
  NodeId node = 0;
  AdaptationFunction function;

  bool operator==(const PathStep&) const = default;
};

/// S f0 U1 f1 ... Un fn D. The fictitious f0 is represented by the protocol
/// S emits; the hop S->U1 carries no function.
struct MLPath {
  NodeId source = 0;
  ProtocolId emitted = 0;
  std::vector<PathStep> steps;
  NodeId dest = 0;

  /// Node sequence S, U1, ..., Un, D.
  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(steps.size() + 2);
    out.push_back(source);
    for (const auto& s : steps) out.push_back(s.node);
    out.push_back(dest);
    return out;
  }

  std::size_t hop_count() const { return steps.size() + 1; }

  bool operator==(const MLPath&) const = default;
};

enum class FailureReason {
  NotAnEdge,
  FunctionUnavailable,
  ProtocolMismatch,
  StackUnderflow,
  StackNonEmptyAtDest,
  WrongDecapOrder,
};

inline std::string_view reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::NotAnEdge: return "NotAnEdge";
    case FailureReason::FunctionUnavailable: return "FunctionUnavailable";
    case FailureReason::ProtocolMismatch: return "ProtocolMismatch";
    case FailureReason::StackUnderflow: return "StackUnderflow";
    case FailureReason::StackNonEmptyAtDest: return "StackNonEmptyAtDest";
    case FailureReason::WrongDecapOrder: return "WrongDecapOrder";
  }
  return "?";
}

/// Step 0 is the emission hop S->U1, steps 1..n the functions, n+1 the
/// arrival at D.
struct Failure {
  std::size_t step = 0;
  FailureReason reason = FailureReason::NotAnEdge;

  bool operator==(const Failure&) const = default;
};

struct FeasibilityReport {
  bool feasible = false;
  std::optional<Failure> failure;
  ProtocolStack final_stack;
  ProtocolId final_protocol = 0;
};

/// Applies f to the packet state (current protocol, stack). Returns the
/// failure reason and leaves the state untouched when f cannot apply.
inline std::optional<FailureReason> apply_function(const AdaptationFunction& f, ProtocolId& current,
                                                   ProtocolStack& stack) {
  switch (f.kind) {
    case FunctionKind::Conversion:
      if (current != f.from) return FailureReason::ProtocolMismatch;
      current = f.to;
      return std::nullopt;
    case FunctionKind::Encapsulation:
      if (current != f.from) return FailureReason::ProtocolMismatch;
      stack.push_back(f.from);
      current = f.to;
      return std::nullopt;
    case FunctionKind::Decapsulation:
      if (current != f.to) return FailureReason::ProtocolMismatch;
      if (stack.empty()) return FailureReason::StackUnderflow;
      if (stack.back() != f.from) return FailureReason::WrongDecapOrder;
      stack.pop_back();
      current = f.from;
      return std::nullopt;
  }
  return FailureReason::ProtocolMismatch;
}

/// Runs the stack machine along the path. S only emits (its own functions
/// never apply in transit), so a path that passes back through S is
/// rejected with FunctionUnavailable at that step.
inline FeasibilityReport check_feasibility(const Network& net, const MLPath& path) {
  FeasibilityReport report;
  const auto fail = [&](std::size_t step, FailureReason reason) {
    report.feasible = false;
    report.failure = Failure{step, reason};
    return report;
  };

  ProtocolId current = path.emitted;
  ProtocolStack stack;
  const auto nodes = path.nodes();

  if (!net.out_set(path.source).contains(path.emitted)) return fail(0, FailureReason::ProtocolMismatch);
  if (!net.find_edge(nodes[0], nodes[1])) return fail(0, FailureReason::NotAnEdge);

  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const auto& step = path.steps[i];
    const std::size_t idx = i + 1;
    if (step.node == path.source || !net.has_function(step.node, step.function)) {
      return fail(idx, FailureReason::FunctionUnavailable);
    }
    if (auto err = apply_function(step.function, current, stack)) return fail(idx, *err);
    if (!net.find_edge(step.node, nodes[idx + 1])) return fail(idx, FailureReason::NotAnEdge);
  }

  report.final_stack = stack;
  report.final_protocol = current;
  const std::size_t arrival = path.steps.size() + 1;
  if (!net.in_set(path.dest).contains(current)) return fail(arrival, FailureReason::ProtocolMismatch);
  if (!stack.empty()) return fail(arrival, FailureReason::StackNonEmptyAtDest);
  report.feasible = true;
  return report;
}

/// Tagged protocol sequence of the path: one symbol per function, plus the
/// protocol arriving at D.
inline Trace trace_of(const MLPath& path) {
  Trace trace;
  trace.reserve(path.steps.size() + 1);
  ProtocolId current = path.emitted;
  for (const auto& step : path.steps) {
    const auto& f = step.function;
    switch (f.kind) {
      case FunctionKind::Conversion: trace.push_back(TaggedProtocol::plain(f.from)); break;
      case FunctionKind::Encapsulation: trace.push_back(TaggedProtocol::push(f.from)); break;
      case FunctionKind::Decapsulation: trace.push_back(TaggedProtocol::pop(f.to)); break;
    }
    current = f.output();
  }
  trace.push_back(TaggedProtocol::plain(current));
  return trace;
}

/// Sum of h(U_i, f_i, U_{i+1}) over the steps; the emission hop costs 0.
inline double path_weight(const Network& net, const MLPath& path) {
  double total = 0.0;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const NodeId next = i + 1 < path.steps.size() ? path.steps[i + 1].node : path.dest;
    total += net.weight(path.steps[i].node, path.steps[i].function, next);
  }
  return total;
}

/// nb(E): how many times each edge is crossed, emission and arrival hops included.
inline std::map<EdgeId, std::size_t> edge_multiplicity(const Network& net, const MLPath& path) {
  std::map<EdgeId, std::size_t> nb;
  const auto nodes = path.nodes();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (auto e = net.find_edge(nodes[i], nodes[i + 1])) ++nb[*e];
  }
  return nb;
}

/// min over used edges of q_b(E) / nb(E).
inline double path_bandwidth(const Network& net, const MLPath& path) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [e, count] : edge_multiplicity(net, path)) {
    best = std::min(best, net.edge(e).bandwidth / static_cast<double>(count));
  }
  return best;
}

/// Per metric i: sum over used edges of q_i(E) * nb(E).
inline std::vector<double> path_qos(const Network& net, const MLPath& path) {
  std::vector<double> total(net.qos_dimension(), 0.0);
  for (const auto& [e, count] : edge_multiplicity(net, path)) {
    const auto& q = net.edge(e).qos;
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += q[i] * static_cast<double>(count);
  }
  return total;
}

/// True when some edge appears more than once.
inline bool has_repeated_edge(const Network& net, const MLPath& path) {
  for (const auto& [e, count] : edge_multiplicity(net, path)) {
    if (count > 1) return true;
  }
  return false;
}

inline std::string to_string(const Network& net, const MLPath& path) {
  std::string out = net.node_name(path.source) + " [" + net.protocol_name(path.emitted) + "]";
  for (const auto& s : path.steps) out += " -> " + net.node_name(s.node) + " " + to_string(net, s.function);
  out += " -> " + net.node_name(path.dest);
  return out;
}

}  // namespace mlpath
