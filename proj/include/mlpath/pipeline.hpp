#pragma once

#include <chrono>
#include <optional>
#include <string_view>

#include "mlpath/path.hpp"
#include "mlpath/trace_matcher.hpp"
#include "mlpath/wcfg.hpp"
#include "mlpath/wpda.hpp"

namespace mlpath {

enum class Metric { Hops, Encapsulations, Custom };

inline Metric parse_metric(std::string_view s) {
  if (s == "hops") return Metric::Hops;
  if (s == "encaps" || s == "encapsulations") return Metric::Encapsulations;
  if (s == "custom") return Metric::Custom;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

/// Copy of `net` whose weight map realises the metric preset. Hops: every
/// triple weighs 1. Encapsulations: 1 on encapsulation triples, 0 elsewhere.
/// Custom: the network's own weights.
inline Network with_metric(const Network& net, Metric metric) {
  Network out = net;
  switch (metric) {
    case Metric::Custom: break;
    case Metric::Hops: out.clear_weights(); break;
    case Metric::Encapsulations:
      out.clear_weights();
      for (const auto& e : net.edges()) {
        for (const auto& f : net.functions(e.from)) {
          out.set_weight(e.from, f, e.to, f.kind == FunctionKind::Encapsulation ? 1.0 : 0.0);
        }
      }
      break;
  }
  return out;
}

struct PathResult {
  MLPath path;
  double weight = 0.0;
  Trace trace;
};

struct PipelineStats {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t nonterminals = 0;
  std::size_t rules = 0;
  double wpda_seconds = 0.0;
  double grammar_seconds = 0.0;
  double knuth_seconds = 0.0;
  double match_seconds = 0.0;
  std::optional<PathResult> result;
};

/// network -> WPDA -> WCFG -> Knuth -> minimum-weight trace -> path, with
/// stage sizes and wall-clock times. `net` is used with its own weights.
inline PipelineStats run_pipeline(const Network& net, NodeId source, NodeId dest, GrammarOptions options = {}) {
  using Clock = std::chrono::steady_clock;
  const auto seconds = [](Clock::time_point a, Clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };

  PipelineStats stats;
  auto t0 = Clock::now();
  const Wpda wpda = build_wpda(net, source, dest);
  auto t1 = Clock::now();
  const Wcfg grammar = wpda_to_wcfg(wpda, options);
  auto t2 = Clock::now();
  const DerivationValue dv = knuth_min(grammar);
  auto t3 = Clock::now();

  stats.states = wpda.states().size();
  stats.transitions = wpda.transitions().size();
  stats.nonterminals = grammar.nonterminals().size();
  stats.rules = grammar.rules().size();
  stats.wpda_seconds = seconds(t0, t1);
  stats.grammar_seconds = seconds(t1, t2);
  stats.knuth_seconds = seconds(t2, t3);

  if (dv.derivable()) {
    PathResult r;
    r.trace = extract_min_word(grammar, dv);
    r.path = match_trace(net, r.trace, source, dest);
    r.weight = path_weight(net, r.path);
    stats.result = std::move(r);
  }
  stats.match_seconds = seconds(t3, Clock::now());
  return stats;
}

/// Shortest feasible path under `metric`; nullopt iff no feasible path exists.
inline std::optional<PathResult> shortest_feasible_path(const Network& net, NodeId source, NodeId dest,
                                                        Metric metric = Metric::Custom) {
  if (metric == Metric::Custom) return run_pipeline(net, source, dest).result;
  return run_pipeline(with_metric(net, metric), source, dest).result;
}

inline PipelineStats pipeline_stats(const Network& net, NodeId source, NodeId dest) {
  return run_pipeline(net, source, dest);
}

}  // namespace mlpath
