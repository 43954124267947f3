#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "mlpath/wpda.hpp"

namespace mlpath {

using NonterminalId = std::uint32_t;

/// The axiom [Q0], or a triple [p a q]: from state p with a on top of the
/// stack, the automaton can reach q having popped a.
struct Nonterminal {
  bool axiom = false;
  StateId from = 0;
  StackSymbol symbol = 0;
  StateId to = 0;
};

/// lhs -> [terminal] rhs[0] [rhs[1]]. Every rule produced from a WPDA has at
/// most one terminal, placed first, and at most two nonterminals.
struct Rule {
  NonterminalId lhs = 0;
  std::optional<TaggedProtocol> terminal;
  std::array<NonterminalId, 2> rhs{};
  std::uint8_t rhs_len = 0;
  double weight = 0.0;
};

class Wcfg {
 public:
  static constexpr NonterminalId kAxiom = 0;

  const std::vector<Nonterminal>& nonterminals() const { return nonterminals_; }
  const std::vector<Rule>& rules() const { return rules_; }
  std::vector<Rule>& mutable_rules() { return rules_; }

  std::optional<NonterminalId> find(StateId from, StackSymbol symbol, StateId to) const {
    const auto idx = triple_index(from, symbol, to);
    if (idx >= index_.size() || index_[idx] == kNone) return std::nullopt;
    return index_[idx];
  }

 private:
  friend class GrammarBuilder;
  static constexpr NonterminalId kNone = std::numeric_limits<NonterminalId>::max();

  std::size_t triple_index(StateId from, StackSymbol symbol, StateId to) const {
    return (std::size_t{from} * symbols_ + symbol) * states_ + to;
  }

  std::size_t states_ = 0;
  std::size_t symbols_ = 0;
  std::vector<Nonterminal> nonterminals_;
  std::vector<NonterminalId> index_;
  std::vector<Rule> rules_;
};

class GrammarBuilder {
 public:
  GrammarBuilder(Wcfg& g, std::size_t states, std::size_t symbols) : g_(g) {
    g_.states_ = states;
    g_.symbols_ = symbols;
    g_.index_.assign(states * symbols * states, Wcfg::kNone);
    g_.nonterminals_.push_back(Nonterminal{true, 0, 0, 0});
  }

  NonterminalId nonterminal(StateId from, StackSymbol symbol, StateId to) {
    auto& slot = g_.index_[g_.triple_index(from, symbol, to)];
    if (slot == Wcfg::kNone) {
      slot = static_cast<NonterminalId>(g_.nonterminals_.size());
      g_.nonterminals_.push_back(Nonterminal{false, from, symbol, to});
    }
    return slot;
  }

  void rule(NonterminalId lhs, std::optional<TaggedProtocol> terminal, std::initializer_list<NonterminalId> rhs,
            double weight) {
    Rule r;
    r.lhs = lhs;
    r.terminal = terminal;
    r.rhs_len = static_cast<std::uint8_t>(rhs.size());
    std::copy(rhs.begin(), rhs.end(), r.rhs.begin());
    r.weight = weight;
    g_.rules_.push_back(r);
  }

 private:
  Wcfg& g_;
};

struct GrammarOptions {
  /// Keep only nonterminals that derive some word and are reachable from
  /// the axiom. Off reproduces the eager triple construction rule for rule.
  bool prune = true;
};

namespace detail {

inline Wcfg eager_grammar(const Wpda& w) {
  const std::size_t ns = w.states().size();
  Wcfg g;
  GrammarBuilder b(g, ns, w.stack_alphabet_size());
  const StackSymbol z0 = w.bottom();
  for (StateId s = 0; s < ns; ++s) b.rule(Wcfg::kAxiom, std::nullopt, {b.nonterminal(Wpda::kInitial, z0, s)}, 0.0);
  for (const auto& t : w.transitions()) {
    switch (t.kind()) {
      case Transition::Kind::Pop:
        b.rule(b.nonterminal(t.from, t.pop, t.to), t.input, {}, t.weight);
        break;
      case Transition::Kind::Keep:
        for (StateId qi = 0; qi < ns; ++qi) {
          b.rule(b.nonterminal(t.from, t.pop, qi), t.input, {b.nonterminal(t.to, t.pop, qi)}, t.weight);
        }
        break;
      case Transition::Kind::Push:
        for (StateId qi = 0; qi < ns; ++qi) {
          for (StateId qj = 0; qj < ns; ++qj) {
            b.rule(b.nonterminal(t.from, t.pop, qj), t.input,
                   {b.nonterminal(t.to, t.push[0], qi), b.nonterminal(qi, t.pop, qj)}, t.weight);
          }
        }
        break;
    }
  }
  return g;
}

// Same rules as the eager construction, restricted to useful nonterminals.
// Productive triples are found by a bottom-up saturation over the three
// transition shapes; rules are then emitted top-down from the axiom.
inline Wcfg pruned_grammar(const Wpda& w) {
  const std::size_t ns = w.states().size();
  const std::size_t ng = w.stack_alphabet_size();
  const auto idx = [&](StateId p, StackSymbol a, StateId q) { return (std::size_t{p} * ng + a) * ns + q; };
  const auto pair_idx = [&](StateId p, StackSymbol a) { return std::size_t{p} * ng + a; };

  std::vector<std::vector<std::size_t>> keep_by_to(ns * ng), push_by_to(ns * ng), by_from(ns * ng);
  for (std::size_t i = 0; i < w.transitions().size(); ++i) {
    const auto& t = w.transitions()[i];
    by_from[pair_idx(t.from, t.pop)].push_back(i);
    if (t.kind() == Transition::Kind::Keep) keep_by_to[pair_idx(t.to, t.pop)].push_back(i);
    if (t.kind() == Transition::Kind::Push) push_by_to[pair_idx(t.to, t.push[0])].push_back(i);
  }

  std::vector<std::uint8_t> productive(ns * ng * ns, 0);
  std::vector<std::vector<StateId>> ends(ns * ng);           // (p, a) -> q with [p a q] productive
  std::vector<std::vector<std::size_t>> waiting(ns * ng);    // (r, a) -> push t with [t.to push0 r] productive
  std::vector<std::tuple<StateId, StackSymbol, StateId>> queue;

  const auto mark = [&](StateId p, StackSymbol a, StateId q) {
    auto& cell = productive[idx(p, a, q)];
    if (cell) return;
    cell = 1;
    ends[pair_idx(p, a)].push_back(q);
    queue.emplace_back(p, a, q);
  };

  for (const auto& t : w.transitions()) {
    if (t.kind() == Transition::Kind::Pop) mark(t.from, t.pop, t.to);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [s, a, q] = queue[head];
    for (std::size_t ti : keep_by_to[pair_idx(s, a)]) mark(w.transitions()[ti].from, a, q);
    for (std::size_t ti : push_by_to[pair_idx(s, a)]) {
      const auto& t = w.transitions()[ti];
      waiting[pair_idx(q, t.pop)].push_back(ti);
      const auto& tails = ends[pair_idx(q, t.pop)];
      for (std::size_t k = 0; k < tails.size(); ++k) mark(t.from, t.pop, tails[k]);
    }
    const auto& wl = waiting[pair_idx(s, a)];
    for (std::size_t k = 0; k < wl.size(); ++k) mark(w.transitions()[wl[k]].from, a, q);
  }

  Wcfg g;
  GrammarBuilder b(g, ns, ng);
  std::vector<std::uint8_t> reached(ns * ng * ns, 0);
  std::vector<std::tuple<StateId, StackSymbol, StateId>> todo;
  const auto reach = [&](StateId p, StackSymbol a, StateId q) {
    const NonterminalId id = b.nonterminal(p, a, q);
    auto& cell = reached[idx(p, a, q)];
    if (!cell) {
      cell = 1;
      todo.emplace_back(p, a, q);
    }
    return id;
  };

  const StackSymbol z0 = w.bottom();
  for (StateId s = 0; s < ns; ++s) {
    if (productive[idx(Wpda::kInitial, z0, s)]) b.rule(Wcfg::kAxiom, std::nullopt, {reach(Wpda::kInitial, z0, s)}, 0.0);
  }
  for (std::size_t head = 0; head < todo.size(); ++head) {
    const auto [p, a, q] = todo[head];
    const NonterminalId lhs = *g.find(p, a, q);
    for (std::size_t ti : by_from[pair_idx(p, a)]) {
      const auto& t = w.transitions()[ti];
      switch (t.kind()) {
        case Transition::Kind::Pop:
          if (t.to == q) b.rule(lhs, t.input, {}, t.weight);
          break;
        case Transition::Kind::Keep:
          if (productive[idx(t.to, a, q)]) b.rule(lhs, t.input, {reach(t.to, a, q)}, t.weight);
          break;
        case Transition::Kind::Push: {
          const auto& mids = ends[pair_idx(t.to, t.push[0])];
          for (std::size_t k = 0; k < mids.size(); ++k) {
            const StateId r = mids[k];
            if (!productive[idx(r, a, q)]) continue;
            const NonterminalId first = reach(t.to, t.push[0], r);
            const NonterminalId second = reach(r, a, q);
            b.rule(lhs, t.input, {first, second}, t.weight);
          }
          break;
        }
      }
    }
  }
  return g;
}

}  // namespace detail

/// WPDA -> WCFG by the triple construction; rule weights copy transition
/// weights. Rule shapes:
///   [Q0] -> [Q0 Z0 q]                                  weight 0
///   [p a q] -> x                      pop transition  (p, <x, a, ->, q)
///   [p a r] -> x [q a r]              keep transition (p, <x, a, a>, q), every r
///   [p a s] -> x [q y r] [r a s]      push transition (p, <x, a, y a>, q), every r, s
inline Wcfg wpda_to_wcfg(const Wpda& w, GrammarOptions options = {}) {
  return options.prune ? detail::pruned_grammar(w) : detail::eager_grammar(w);
}

/// l([X]) for every nonterminal, with a witness rule per derivable one.
struct DerivationValue {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();
  static constexpr std::int64_t kNoRule = -1;

  std::vector<double> value;
  std::vector<std::uint64_t> tree_size;
  std::vector<std::int64_t> witness;

  double axiom_value() const { return value.at(Wcfg::kAxiom); }
  bool derivable() const { return axiom_value() < kInfinity; }
};

/// Knuth's generalisation of Dijkstra to grammars. A nonterminal is settled
/// when it leaves the queue; a rule is evaluated once all its right-hand
/// nonterminals are settled. Keys are (weight, tree size) compared
/// lexicographically, so zero-weight cycles still yield finite witnesses.
/// Requires non-negative rule weights.
inline DerivationValue knuth_min(const Wcfg& g) {
  const std::size_t nn = g.nonterminals().size();
  const auto& rules = g.rules();

  DerivationValue dv;
  dv.value.assign(nn, DerivationValue::kInfinity);
  dv.tree_size.assign(nn, std::numeric_limits<std::uint64_t>::max());
  dv.witness.assign(nn, DerivationValue::kNoRule);

  // CSR occurrence lists: rules in which a nonterminal appears on the right.
  std::vector<std::uint32_t> start(nn + 1, 0);
  for (const auto& r : rules) {
    if (r.weight < 0.0) throw std::invalid_argument("negative rule weight");
    for (std::size_t k = 0; k < r.rhs_len; ++k) ++start[r.rhs[k] + 1];
  }
  for (std::size_t i = 0; i < nn; ++i) start[i + 1] += start[i];
  std::vector<std::uint32_t> occ(start[nn]);
  {
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (std::size_t ri = 0; ri < rules.size(); ++ri) {
      for (std::size_t k = 0; k < rules[ri].rhs_len; ++k) occ[fill[rules[ri].rhs[k]]++] = static_cast<std::uint32_t>(ri);
    }
  }

  using Key = std::tuple<double, std::uint64_t, NonterminalId>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  std::vector<std::uint8_t> settled(nn, 0);
  std::vector<std::uint8_t> remaining(rules.size());

  const auto offer = [&](std::size_t ri) {
    const auto& r = rules[ri];
    double v = r.weight;
    std::uint64_t size = 1;
    for (std::size_t k = 0; k < r.rhs_len; ++k) {
      v += dv.value[r.rhs[k]];
      const auto s = dv.tree_size[r.rhs[k]];
      size = (size > std::numeric_limits<std::uint64_t>::max() - s) ? std::numeric_limits<std::uint64_t>::max() : size + s;
    }
    if (std::tie(v, size) < std::tie(dv.value[r.lhs], dv.tree_size[r.lhs])) {
      dv.value[r.lhs] = v;
      dv.tree_size[r.lhs] = size;
      dv.witness[r.lhs] = static_cast<std::int64_t>(ri);
      heap.emplace(v, size, r.lhs);
    }
  };

  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    remaining[ri] = rules[ri].rhs_len;
    if (remaining[ri] == 0) offer(ri);
  }
  while (!heap.empty()) {
    const auto [v, size, n] = heap.top();
    heap.pop();
    if (settled[n] || v != dv.value[n] || size != dv.tree_size[n]) continue;
    settled[n] = 1;
    for (std::uint32_t k = start[n]; k < start[n + 1]; ++k) {
      const std::uint32_t ri = occ[k];
      if (--remaining[ri] == 0 && !settled[rules[ri].lhs]) offer(ri);
    }
  }
  return dv;
}

struct NoFeasiblePath : std::runtime_error {
  NoFeasiblePath() : std::runtime_error("no feasible path") {}
};

/// Expands witness rules depth-first from the axiom and collects terminals.
inline Trace extract_min_word(const Wcfg& g, const DerivationValue& dv) {
  if (!dv.derivable()) throw NoFeasiblePath();
  Trace word;
  std::vector<NonterminalId> stack{Wcfg::kAxiom};
  while (!stack.empty()) {
    const NonterminalId n = stack.back();
    stack.pop_back();
    const auto wi = dv.witness.at(n);
    if (wi == DerivationValue::kNoRule) throw std::logic_error("witness missing for a derivable nonterminal");
    const auto& r = g.rules()[static_cast<std::size_t>(wi)];
    if (r.terminal) word.push_back(*r.terminal);
    for (std::size_t k = r.rhs_len; k > 0; --k) stack.push_back(r.rhs[k - 1]);
  }
  return word;
}

}  // namespace mlpath
