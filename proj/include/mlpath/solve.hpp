#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlpath/bfs_exact.hpp"
#include "mlpath/dag_heuristic.hpp"
#include "mlpath/ml_samcra.hpp"
#include "mlpath/pipeline.hpp"

namespace mlpath {

enum class Algorithm { Pda, Bfs, DagPda, DagBfs, Samcra };

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "pda") return Algorithm::Pda;
  if (s == "bfs") return Algorithm::Bfs;
  if (s == "dag-pda") return Algorithm::DagPda;
  if (s == "dag-bfs") return Algorithm::DagBfs;
  if (s == "samcra") return Algorithm::Samcra;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Pda: return "pda";
    case Algorithm::Bfs: return "bfs";
    case Algorithm::DagPda: return "dag-pda";
    case Algorithm::DagBfs: return "dag-bfs";
    case Algorithm::Samcra: return "samcra";
  }
  return "?";
}

struct SolveRequest {
  Algorithm algorithm = Algorithm::Pda;
  Metric metric = Metric::Custom;
  std::optional<std::size_t> max_hops;
  std::optional<double> min_bandwidth;
  std::vector<double> qos_max;
  std::uint64_t seed = 1;
  std::size_t restarts = 1;
  std::size_t workers = 1;
  std::optional<double> time_limit_seconds;
  std::optional<std::size_t> samcra_k;
};

struct SolveOutcome {
  SearchStatus status = SearchStatus::NotFound;
  std::optional<PathResult> result;
  /// The answer may be suboptimal or a false "not found".
  bool heuristic = false;
  double seconds = 0.0;
};

/// Rejects flag combinations an algorithm cannot honour.
inline void check_request(const SolveRequest& req) {
  const bool needs_bw = req.algorithm == Algorithm::DagPda || req.algorithm == Algorithm::DagBfs ||
                        req.algorithm == Algorithm::Samcra;
  const std::string name(algorithm_name(req.algorithm));
  if (needs_bw && !req.min_bandwidth) throw std::invalid_argument(name + " needs a bandwidth floor");
  if (req.min_bandwidth && !(*req.min_bandwidth > 0.0)) throw std::invalid_argument("bandwidth floor must be positive");
  if (req.algorithm == Algorithm::Pda && req.min_bandwidth) {
    throw std::invalid_argument("pda ignores bandwidth; use dag-pda or samcra");
  }
  if (!req.qos_max.empty() && req.algorithm != Algorithm::Samcra) {
    throw std::invalid_argument("QoS ceilings are only supported by samcra");
  }
  if (req.max_hops && (req.algorithm == Algorithm::Pda || req.algorithm == Algorithm::DagPda ||
                       req.algorithm == Algorithm::Samcra)) {
    throw std::invalid_argument(name + " does not take a hop limit");
  }
  if (req.max_hops && *req.max_hops < 1) throw std::invalid_argument("hop limit must be at least 1");
  if (req.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
}

inline SolveOutcome solve(const Network& net, NodeId source, NodeId dest, const SolveRequest& req) {
  check_request(req);
  const auto start = std::chrono::steady_clock::now();
  SolveOutcome out;
  const auto found = [&](std::optional<PathResult> r) {
    out.status = r ? SearchStatus::Found : SearchStatus::NotFound;
    out.result = std::move(r);
  };
  DagOptions dag;
  dag.seed = req.seed;
  dag.restarts = req.restarts;
  dag.workers = req.workers;

  switch (req.algorithm) {
    case Algorithm::Pda: found(shortest_feasible_path(net, source, dest, req.metric)); break;
    case Algorithm::Bfs: {
      BfsOptions opt;
      opt.max_hops = req.max_hops;
      opt.min_bandwidth = req.min_bandwidth;
      opt.time_limit_seconds = req.time_limit_seconds;
      const auto weighted = with_metric(net, req.metric);
      auto r = bfs_search(weighted, source, dest, opt);
      out.status = r.status;
      out.result = std::move(r.result);
      // A hop limit makes the answer exact only up to that length.
      out.heuristic = req.max_hops.has_value();
      break;
    }
    case Algorithm::DagPda:
      found(dag_pda(net, source, dest, *req.min_bandwidth, req.metric, dag));
      out.heuristic = true;
      break;
    case Algorithm::DagBfs:
      found(dag_bfs(net, source, dest, *req.min_bandwidth, req.max_hops, req.metric, dag));
      out.heuristic = true;
      break;
    case Algorithm::Samcra: {
      ConstraintSet c{*req.min_bandwidth, req.qos_max};
      SamcraOptions opt;
      opt.k = req.samcra_k;
      opt.time_limit_seconds = req.time_limit_seconds;
      auto r = ml_samcra(with_metric(net, req.metric), source, dest, c, opt);
      out.status = r.status;
      out.result = std::move(r.result);
      out.heuristic = r.heuristic;
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace mlpath
