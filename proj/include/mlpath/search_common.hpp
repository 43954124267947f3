#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlpath/path.hpp"
#include "mlpath/pipeline.hpp"

namespace mlpath {

/// nb(E): a bitset of edges crossed at least once, plus a sorted list of
/// the edges crossed more than once with their counts. Most edges in a
/// bandwidth search are crossed at most once, so dominance tests usually
/// reduce to word-wise subset checks.
class EdgeCounts {
 public:
  std::uint16_t count(EdgeId e) const {
    if (!touched(e)) return 0;
    auto it = find(e);
    return it != repeats_.end() && it->first == e ? it->second : 1;
  }

  /// Increments nb(e) and returns the new count.
  std::uint16_t increment(EdgeId e) {
    const std::size_t word = e / 64;
    const std::uint64_t bit = std::uint64_t{1} << (e % 64);
    if (word >= bits_.size()) bits_.resize(word + 1, 0);
    if (!(bits_[word] & bit)) {
      bits_[word] |= bit;
      return 1;
    }
    auto it = find(e);
    if (it != repeats_.end() && it->first == e) return ++it->second;
    repeats_.insert(it, {e, 2});
    return 2;
  }

  /// Componentwise nb <= other.nb.
  bool dominated_by_or_equal(const EdgeCounts& other) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      const std::uint64_t theirs = i < other.bits_.size() ? other.bits_[i] : 0;
      if (bits_[i] & ~theirs) return false;
    }
    auto jt = other.repeats_.begin();
    for (const auto& [e, c] : repeats_) {
      while (jt != other.repeats_.end() && jt->first < e) ++jt;
      if (jt == other.repeats_.end() || jt->first != e || jt->second < c) return false;
    }
    return true;
  }

  /// (edge, count) for every crossed edge, by edge id.
  std::vector<std::pair<EdgeId, std::uint16_t>> items() const {
    std::vector<std::pair<EdgeId, std::uint16_t>> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      for (std::uint64_t w = bits_[i]; w; w &= w - 1) {
        const auto e = static_cast<EdgeId>(i * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        out.emplace_back(e, count(e));
      }
    }
    return out;
  }
  bool operator==(const EdgeCounts& other) const { return items() == other.items(); }

 private:
  bool touched(EdgeId e) const {
    const std::size_t word = e / 64;
    return word < bits_.size() && (bits_[word] >> (e % 64)) & 1;
  }
  std::vector<std::pair<EdgeId, std::uint16_t>>::iterator find(EdgeId e) {
    return std::lower_bound(repeats_.begin(), repeats_.end(), e, [](const auto& p, EdgeId x) { return p.first < x; });
  }
  std::vector<std::pair<EdgeId, std::uint16_t>>::const_iterator find(EdgeId e) const {
    return std::lower_bound(repeats_.begin(), repeats_.end(), e, [](const auto& p, EdgeId x) { return p.first < x; });
  }

  std::vector<std::uint64_t> bits_;
  std::vector<std::pair<EdgeId, std::uint16_t>> repeats_;
};

/// How many times an edge may be crossed under a bandwidth floor:
/// floor(q_b(E) / q_b_min). A tiny tolerance absorbs representation error.
inline std::uint32_t crossing_cap(double bandwidth, double min_bandwidth) {
  return static_cast<std::uint32_t>(std::floor(bandwidth / min_bandwidth + 1e-9));
}

enum class SearchStatus { Found, NotFound, Censored };

inline std::string_view status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::NotFound: return "not-found";
    case SearchStatus::Censored: return "censored";
  }
  return "?";
}

struct SearchOutcome {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<PathResult> result;
  std::size_t states = 0;
  double seconds = 0.0;
};

/// Parent-pointer arena for partial paths. Record i says "arrived at `node`
/// from record `parent`, after `function` was applied at the parent's node".
/// Root records (first hop out of S) hold passive(emitted) as their function.
class PathRecords {
 public:
  static constexpr std::uint32_t kRoot = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t add(std::uint32_t parent, NodeId node, AdaptationFunction function) {
    records_.push_back({parent, node, function});
    return static_cast<std::uint32_t>(records_.size() - 1);
  }

  std::size_t size() const { return records_.size(); }

  MLPath path(std::uint32_t last, NodeId source) const {
    std::vector<std::uint32_t> chain;
    for (auto i = last; i != kRoot; i = records_[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    MLPath p;
    p.source = source;
    p.emitted = records_[chain.front()].function.from;
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
      p.steps.push_back({records_[chain[k]].node, records_[chain[k + 1]].function});
    }
    p.dest = records_[chain.back()].node;
    return p;
  }

 private:
  struct Record {
    std::uint32_t parent;
    NodeId node;
    AdaptationFunction function;
  };
  std::vector<Record> records_;
};

/// Visits every one-hop extension of a packet at `node` carrying `current`
/// over `stack`: each applicable f in F(node), each out-edge (node, V) with
/// V != source and f's output in In(V).
template <typename Visit>
void for_each_extension(const Network& net, NodeId source, NodeId node, ProtocolId current,
                        const ProtocolStack& stack, Visit&& visit) {
  for (const auto& f : net.functions(node)) {
    if (f.input() != current) continue;
    ProtocolId next = current;
    ProtocolStack next_stack = stack;
    if (apply_function(f, next, next_stack)) continue;
    for (EdgeId e : net.out_edges(node)) {
      const NodeId v = net.edge(e).to;
      if (v == source || !net.in_set(v).contains(next)) continue;
      visit(f, e, v, next, next_stack);
    }
  }
}

/// Hash key for (node, current protocol, stack).
inline std::string state_key(NodeId node, ProtocolId current, const ProtocolStack& stack) {
  std::string key;
  key.reserve(5 + stack.size());
  key.append(reinterpret_cast<const char*>(&node), sizeof node);
  key.push_back(static_cast<char>(current));
  for (ProtocolId p : stack) key.push_back(static_cast<char>(p));
  return key;
}

class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(std::optional<double> seconds)
      : start_(std::chrono::steady_clock::now()), limit_(seconds) {}

  bool expired() const {
    return limit_ && elapsed() > *limit_;
  }
  double elapsed() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
  std::optional<double> limit_;
};

}  // namespace mlpath
