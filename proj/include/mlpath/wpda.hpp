#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlpath/network.hpp"

namespace mlpath {

using StateId = std::uint32_t;
using StackSymbol = std::uint16_t;

struct WpdaState {
  enum class Kind : std::uint8_t { Initial, Final, NodeProtocol };
  Kind kind = Kind::NodeProtocol;
  NodeId node = 0;
  ProtocolId protocol = 0;
};

/// (from, <input, pop, push>, to) with weight. `push` is top-first and holds
/// push_len symbols; an absent input is an epsilon move.
struct Transition {
  enum class Kind : std::uint8_t { Pop, Keep, Push };

  StateId from = 0;
  std::optional<TaggedProtocol> input;
  StackSymbol pop = 0;
  std::array<StackSymbol, 2> push{};
  std::uint8_t push_len = 0;
  StateId to = 0;
  double weight = 0.0;

  Kind kind() const {
    if (push_len == 0) return Kind::Pop;
    if (push_len == 1) return Kind::Keep;
    return Kind::Push;
  }
};

/// Weighted push-down automaton (S, Sigma, Gamma, delta, Q0, Z0, {QF}, omega).
/// Stack symbols are protocol ids plus Z0 == protocol_count().
class Wpda {
 public:
  static constexpr StateId kInitial = 0;
  static constexpr StateId kFinal = 1;

  std::size_t protocol_count() const { return protocol_count_; }
  StackSymbol bottom() const { return static_cast<StackSymbol>(protocol_count_); }
  std::size_t stack_alphabet_size() const { return protocol_count_ + 1; }

  const std::vector<WpdaState>& states() const { return states_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  std::optional<StateId> state_of(NodeId node, ProtocolId protocol) const {
    const std::size_t idx = std::size_t{node} * protocol_count_ + protocol;
    if (idx >= state_index_.size() || state_index_[idx] == kNoState) return std::nullopt;
    return state_index_[idx];
  }

  /// Stable text dump of states and transitions.
  std::string dump(const Network& net) const {
    std::ostringstream os;
    os << "states " << states_.size() << "\n";
    for (std::size_t i = 0; i < states_.size(); ++i) os << "  " << i << " " << state_name(net, static_cast<StateId>(i)) << "\n";
    std::vector<std::string> lines;
    for (const auto& t : transitions_) {
      std::ostringstream l;
      l << "  " << state_name(net, t.from) << " <" << (t.input ? to_string(net, *t.input) : std::string("eps")) << ", "
        << symbol_name(net, t.pop) << ", ";
      if (t.push_len == 0) l << "-";
      for (std::size_t k = 0; k < t.push_len; ++k) l << symbol_name(net, t.push[k]);
      l << "> " << state_name(net, t.to) << " w=" << t.weight;
      lines.push_back(l.str());
    }
    std::sort(lines.begin(), lines.end());
    os << "transitions " << lines.size() << "\n";
    for (const auto& l : lines) os << l << "\n";
    return os.str();
  }

  std::string state_name(const Network& net, StateId s) const {
    const auto& st = states_.at(s);
    switch (st.kind) {
      case WpdaState::Kind::Initial: return "Q0";
      case WpdaState::Kind::Final: return "QF";
      case WpdaState::Kind::NodeProtocol: return net.node_name(st.node) + "_" + net.protocol_name(st.protocol);
    }
    return "?";
  }

  std::string symbol_name(const Network& net, StackSymbol s) const {
    return s == bottom() ? std::string("Z0") : net.protocol_name(s);
  }

 private:
  friend Wpda build_wpda(const Network& net, NodeId source, NodeId dest);
  friend class WpdaBuilder;

  static constexpr StateId kNoState = std::numeric_limits<StateId>::max();

  std::size_t protocol_count_ = 0;
  std::vector<WpdaState> states_;
  std::vector<StateId> state_index_;
  std::vector<Transition> transitions_;
};

class WpdaBuilder {
 public:
  explicit WpdaBuilder(Wpda& w) : w_(w) {}

  // Identical (from, input, pop, push, to) records keep the cheaper weight.
  void add(StateId from, std::optional<TaggedProtocol> input, StackSymbol pop,
           std::initializer_list<StackSymbol> push, StateId to, double weight) {
    Transition t;
    t.from = from;
    t.input = input;
    t.pop = pop;
    t.push_len = static_cast<std::uint8_t>(push.size());
    std::copy(push.begin(), push.end(), t.push.begin());
    t.to = to;
    t.weight = weight;

    const std::uint64_t k1 = (std::uint64_t{from} << 32) | to;
    const std::uint64_t in = input ? (static_cast<std::uint64_t>(input->tag) << 8 | input->protocol) : 0xFFFF;
    const std::uint64_t p0 = t.push_len > 0 ? t.push[0] : 0xFFFF;
    const std::uint64_t p1 = t.push_len > 1 ? t.push[1] : 0xFFFF;
    const std::uint64_t k2 = (in << 48) | (std::uint64_t{pop} << 32) | (p0 << 16) | p1;
    auto [it, inserted] = index_.try_emplace(Key{k1, k2}, w_.transitions_.size());
    if (inserted) {
      w_.transitions_.push_back(t);
    } else {
      auto& existing = w_.transitions_[it->second];
      existing.weight = std::min(existing.weight, weight);
    }
  }

 private:
  struct Key {
    std::uint64_t a, b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>{}(k.a * 0x9E3779B97F4A7C15ULL ^ k.b); }
  };

  Wpda& w_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

/// Network -> WPDA. One state U_x per node U != S and protocol x in In(U),
/// plus Q0 (standing for S) and the fictitious final state QF.
///
///   emission   (Q0, <eps, Z0, Z0>, U_x)        (S,U) in E, x in Out(S) and In(U); weight 0
///   arrival    (D_x, <x, Z0, ->, QF)           x in In(D); weight 0
///   conversion (U_x, <x, a, a>, V_y)           (x->y) in F(U), y in In(V), every a in Gamma
///   encap      (U_x, <x^, a, x a>, V_y)        (x->xy) in F(U), y in In(V), every a in Gamma
///   decap      (U_y, <y_, x, ->, V_x)          ~(x->xy) in F(U), x in In(V)
///
/// Edges leaving S, and edges entering S (which has no U_x states), carry no
/// function transitions.
inline Wpda build_wpda(const Network& net, NodeId source, NodeId dest) {
  if (source >= net.node_count() || dest >= net.node_count()) throw std::out_of_range("endpoint out of range");
  if (source == dest) throw std::invalid_argument("source and destination must differ");

  Wpda w;
  const std::size_t na = net.protocol_count();
  w.protocol_count_ = na;
  w.states_.push_back({WpdaState::Kind::Initial, source, 0});
  w.states_.push_back({WpdaState::Kind::Final, dest, 0});
  w.state_index_.assign(net.node_count() * na, Wpda::kNoState);
  for (NodeId u = 0; u < net.node_count(); ++u) {
    if (u == source) continue;
    for (ProtocolId x : net.in_set(u).to_vector()) {
      w.state_index_[std::size_t{u} * na + x] = static_cast<StateId>(w.states_.size());
      w.states_.push_back({WpdaState::Kind::NodeProtocol, u, x});
    }
  }

  WpdaBuilder b(w);
  const StackSymbol z0 = w.bottom();
  const auto state = [&](NodeId u, ProtocolId x) { return w.state_index_[std::size_t{u} * na + x]; };

  for (EdgeId e : net.out_edges(source)) {
    const NodeId u = net.edge(e).to;
    if (u == source) continue;
    for (ProtocolId x : net.out_set(source).to_vector()) {
      if (net.in_set(u).contains(x)) b.add(Wpda::kInitial, std::nullopt, z0, {z0}, state(u, x), 0.0);
    }
  }
  for (ProtocolId x : net.in_set(dest).to_vector()) {
    b.add(state(dest, x), TaggedProtocol::plain(x), z0, {}, Wpda::kFinal, 0.0);
  }

  for (const auto& edge : net.edges()) {
    const NodeId u = edge.from;
    const NodeId v = edge.to;
    if (u == source || v == source) continue;
    const ProtocolSet in_v = net.in_set(v);
    for (const auto& f : net.functions(u)) {
      const double h = net.weight(u, f, v);
      switch (f.kind) {
        case FunctionKind::Conversion:
          if (!in_v.contains(f.to)) break;
          for (StackSymbol a = 0; a <= z0; ++a) {
            b.add(state(u, f.from), TaggedProtocol::plain(f.from), a, {a}, state(v, f.to), h);
          }
          break;
        case FunctionKind::Encapsulation:
          if (!in_v.contains(f.to)) break;
          for (StackSymbol a = 0; a <= z0; ++a) {
            b.add(state(u, f.from), TaggedProtocol::push(f.from), a, {f.from, a}, state(v, f.to), h);
          }
          break;
        case FunctionKind::Decapsulation:
          if (!in_v.contains(f.from)) break;
          b.add(state(u, f.to), TaggedProtocol::pop(f.to), f.from, {}, state(v, f.from), h);
          break;
      }
    }
  }
  return w;
}

struct AcceptingRun {
  double weight = 0.0;
  std::vector<std::size_t> transitions;
};

/// Minimum-weight accepting run for `word`: exhaustive exploration of
/// configurations (state, stack) position by position, from (Q0, [Z0]) to
/// QF with the input consumed. Runs longer than `run_length_cap` transitions
/// are not considered.
inline std::optional<AcceptingRun> accepts_min(const Wpda& w, const Trace& word, std::size_t run_length_cap) {
  using Stack = std::vector<StackSymbol>;  // bottom-first
  struct Entry {
    double weight;
    std::size_t length;
    std::int64_t parent;  // index into `history`, -1 for the start
    std::size_t transition;
  };
  struct Node {
    StateId state;
    Stack stack;
    Entry entry;
  };
  std::vector<Node> history;

  // Outgoing transitions per state, split by epsilon/consuming.
  std::vector<std::vector<std::size_t>> eps(w.states().size()), consuming(w.states().size());
  for (std::size_t i = 0; i < w.transitions().size(); ++i) {
    const auto& t = w.transitions()[i];
    (t.input ? consuming : eps)[t.from].push_back(i);
  }

  const auto apply = [&](const Transition& t, const Stack& s) -> std::optional<Stack> {
    if (s.empty() || s.back() != t.pop) return std::nullopt;
    Stack out(s.begin(), s.end() - 1);
    for (std::size_t k = t.push_len; k > 0; --k) out.push_back(t.push[k - 1]);
    return out;
  };

  using Layer = std::map<std::pair<StateId, Stack>, std::size_t>;  // -> history index
  const auto relax = [&](Layer& layer, StateId st, Stack stack, Entry e) -> bool {
    auto key = std::make_pair(st, stack);
    auto it = layer.find(key);
    if (it != layer.end()) {
      auto& cur = history[it->second].entry;
      if (cur.weight < e.weight || (cur.weight == e.weight && cur.length <= e.length)) return false;
    }
    history.push_back(Node{st, std::move(stack), e});
    layer[std::move(key)] = history.size() - 1;
    return true;
  };

  const auto close_epsilon = [&](Layer& layer) {
    bool changed = true;
    while (changed) {
      changed = false;
      const Layer snapshot = layer;
      for (const auto& [key, idx] : snapshot) {
        const Entry base = history[idx].entry;
        if (base.length >= run_length_cap) continue;
        for (std::size_t ti : eps[key.first]) {
          const auto& t = w.transitions()[ti];
          if (auto s = apply(t, key.second)) {
            changed |= relax(layer, t.to, std::move(*s),
                             Entry{base.weight + t.weight, base.length + 1, static_cast<std::int64_t>(idx), ti});
          }
        }
      }
    }
  };

  Layer layer;
  relax(layer, Wpda::kInitial, Stack{w.bottom()}, Entry{0.0, 0, -1, 0});
  close_epsilon(layer);
  for (const auto& symbol : word) {
    Layer next;
    for (const auto& [key, idx] : layer) {
      const Entry base = history[idx].entry;
      if (base.length >= run_length_cap) continue;
      for (std::size_t ti : consuming[key.first]) {
        const auto& t = w.transitions()[ti];
        if (*t.input != symbol) continue;
        if (auto s = apply(t, key.second)) {
          relax(next, t.to, std::move(*s), Entry{base.weight + t.weight, base.length + 1, static_cast<std::int64_t>(idx), ti});
        }
      }
    }
    close_epsilon(next);
    layer = std::move(next);
  }

  auto it = layer.find({Wpda::kFinal, Stack{}});
  if (it == layer.end() || word.empty()) return std::nullopt;
  AcceptingRun run;
  run.weight = history[it->second].entry.weight;
  for (std::int64_t i = static_cast<std::int64_t>(it->second); history[static_cast<std::size_t>(i)].entry.parent >= 0;
       i = history[static_cast<std::size_t>(i)].entry.parent) {
    run.transitions.push_back(history[static_cast<std::size_t>(i)].entry.transition);
  }
  std::reverse(run.transitions.begin(), run.transitions.end());
  return run;
}

}  // namespace mlpath
