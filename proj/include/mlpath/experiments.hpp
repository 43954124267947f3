#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "mlpath/generators.hpp"
#include "mlpath/parallel.hpp"
#include "mlpath/pipeline.hpp"
#include "mlpath/solve.hpp"

namespace mlpath {

/// Wilson score interval for k successes out of n (z = 1.96 for 95%).
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (phat + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Pin the ends exactly so CSV output shows 0 and 1 instead of rounding noise.
  return {k == 0 ? 0.0 : std::max(0.0, centre - half), k == n ? 1.0 : std::min(1.0, centre + half)};
}

/// "0.02:0.5:0.02" (start:stop:step, inclusive) or "0.1,0.2,0.3".
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad number '" + s + "' in grid '" + text + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(number(item));
    if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) throw std::invalid_argument("grid range is start:stop:step");
    const auto steps = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    // Rounded so that 0.02 + 5 * 0.02 prints as 0.12.
    for (std::size_t i = 0; i <= steps; ++i) out.push_back(std::round((parts[0] + static_cast<double>(i) * parts[2]) * 1e12) / 1e12);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

/// The graph and endpoints shared by all runs of an experiment.
struct ExperimentGraph {
  Digraph graph;
  NodeId source = 0;
  NodeId dest = 0;
};

inline ExperimentGraph experiment_graph(const std::string& spec, std::uint64_t seed) {
  Rng rng = Rng(seed).split(0);
  ExperimentGraph g;
  g.graph = make_graph(spec, rng);
  std::tie(g.source, g.dest) = diameter_endpoints(g.graph);
  return g;
}

/// Function-allocation seed of run r. It does not depend on p, which is
/// what couples the runs across the grid.
inline std::uint64_t run_seed(std::uint64_t seed, std::size_t run) { return Rng(seed).split(1000 + run).next(); }

struct PhaseOptions {
  std::string graph_spec = "er:40:148";
  std::size_t protocols = 2;
  std::vector<double> p_grid;
  std::size_t runs = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct PhaseRow {
  double p = 0.0;
  std::size_t runs = 0;
  std::size_t feasible = 0;
  std::size_t loops = 0;  // optimum repeats an edge
  double p_feasible = 0.0;
  double feasible_lo = 0.0;
  double feasible_hi = 0.0;
  double p_loop = 0.0;  // among feasible runs
  double loop_lo = 0.0;
  double loop_hi = 0.0;
};

struct PhaseResult {
  PhaseOptions options;
  ExperimentGraph graph;
  std::vector<PhaseRow> rows;
  /// feasible[i][r]: run r at p_grid[i] has a feasible path.
  std::vector<std::vector<std::uint8_t>> feasible;
};

/// First p where P(feasible) reaches 0.5, linearly interpolated between
/// grid points.
inline std::optional<double> half_crossing(const std::vector<PhaseRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].p_feasible < 0.5) continue;
    if (i == 0) return rows[0].p;
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    return a.p + (0.5 - a.p_feasible) * (b.p - a.p) / (b.p_feasible - a.p_feasible);
  }
  return std::nullopt;
}

/// Count of (run, consecutive p pair) where a run is feasible at the lower p
/// but not the higher one. Zero under coupled draws.
inline std::size_t monotonicity_violations(const PhaseResult& r) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i + 1 < r.feasible.size(); ++i) {
    for (std::size_t k = 0; k < r.feasible[i].size(); ++k) bad += r.feasible[i][k] && !r.feasible[i + 1][k];
  }
  return bad;
}

/// P(feasible) and P(loop | feasible) per p. Run r at every p draws from the
/// same uniforms, so a function present at p stays present at any larger p.
inline PhaseResult phase_transition(const PhaseOptions& opt) {
  if (opt.runs < 1) throw std::invalid_argument("runs must be at least 1");
  PhaseResult res;
  res.options = opt;
  res.graph = experiment_graph(opt.graph_spec, opt.seed);
  const std::size_t np = opt.p_grid.size();
  res.feasible.assign(np, std::vector<std::uint8_t>(opt.runs, 0));
  std::vector<std::vector<std::uint8_t>> loops(np, std::vector<std::uint8_t>(opt.runs, 0));

  parallel_for(np * opt.runs, opt.workers, [&](std::size_t job) {
    const std::size_t i = job / opt.runs;
    const std::size_t r = job % opt.runs;
    GenParams params;
    params.p = opt.p_grid[i];
    params.protocols = opt.protocols;
    params.seed = run_seed(opt.seed, r);
    const Network net = allocate_functions(res.graph.graph, params);
    const auto best = shortest_feasible_path(net, res.graph.source, res.graph.dest, Metric::Hops);
    if (best) {
      res.feasible[i][r] = 1;
      loops[i][r] = has_repeated_edge(net, best->path);
    }
  });

  for (std::size_t i = 0; i < np; ++i) {
    PhaseRow row;
    row.p = opt.p_grid[i];
    row.runs = opt.runs;
    for (std::size_t r = 0; r < opt.runs; ++r) {
      row.feasible += res.feasible[i][r];
      row.loops += loops[i][r];
    }
    row.p_feasible = static_cast<double>(row.feasible) / static_cast<double>(row.runs);
    std::tie(row.feasible_lo, row.feasible_hi) = wilson_interval(row.feasible, row.runs);
    row.p_loop = row.feasible ? static_cast<double>(row.loops) / static_cast<double>(row.feasible) : 0.0;
    std::tie(row.loop_lo, row.loop_hi) = wilson_interval(row.loops, row.feasible);
    res.rows.push_back(row);
  }
  return res;
}

struct TimingOptions {
  std::string graph_spec = "er:40:148";
  std::size_t protocols = 2;
  std::vector<Algorithm> algorithms{Algorithm::Pda, Algorithm::Bfs};
  std::vector<double> p_grid;
  std::size_t runs = 100;
  double budget_seconds = 10.0;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::optional<std::size_t> max_hops;  // bfs / dag-bfs
  double min_bandwidth = 1.0;           // dag-pda / dag-bfs / samcra
};

struct TimingRow {
  Algorithm algorithm = Algorithm::Pda;
  double p = 0.0;
  std::size_t runs = 0;
  std::size_t completed = 0;
  std::size_t censored = 0;
  std::size_t found = 0;
  double mean_seconds = 0.0;  // over completed runs
  double max_seconds = 0.0;
};

struct TimingResult {
  TimingOptions options;
  ExperimentGraph graph;
  std::vector<TimingRow> rows;
};

/// Wall-clock time per algorithm and p. Runs that hit the budget are
/// counted as censored and left out of the mean.
inline TimingResult timing_sweep(const TimingOptions& opt) {
  if (opt.runs < 1) throw std::invalid_argument("runs must be at least 1");
  TimingResult res;
  res.options = opt;
  res.graph = experiment_graph(opt.graph_spec, opt.seed);
  const std::size_t na = opt.algorithms.size();
  const std::size_t np = opt.p_grid.size();
  std::vector<SolveOutcome> outcomes(na * np * opt.runs);

  for (auto algo : opt.algorithms) {
    SolveRequest req;
    req.algorithm = algo;
    if (algo == Algorithm::Bfs || algo == Algorithm::DagBfs) req.max_hops = opt.max_hops;
    if (algo != Algorithm::Pda && algo != Algorithm::Bfs) req.min_bandwidth = opt.min_bandwidth;
    check_request(req);
  }

  parallel_for(outcomes.size(), opt.workers, [&](std::size_t job) {
    const std::size_t a = job / (np * opt.runs);
    const std::size_t i = (job / opt.runs) % np;
    const std::size_t r = job % opt.runs;
    GenParams params;
    params.p = opt.p_grid[i];
    params.protocols = opt.protocols;
    params.seed = run_seed(opt.seed, r);
    const Network net = allocate_functions(res.graph.graph, params);
    SolveRequest req;
    req.algorithm = opt.algorithms[a];
    req.metric = Metric::Hops;
    req.seed = params.seed;
    req.time_limit_seconds = opt.budget_seconds;
    if (req.algorithm == Algorithm::Bfs || req.algorithm == Algorithm::DagBfs) req.max_hops = opt.max_hops;
    if (req.algorithm != Algorithm::Pda && req.algorithm != Algorithm::Bfs) req.min_bandwidth = opt.min_bandwidth;
    outcomes[job] = solve(net, res.graph.source, res.graph.dest, req);
    if (outcomes[job].seconds > opt.budget_seconds) outcomes[job].status = SearchStatus::Censored;
  });

  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t i = 0; i < np; ++i) {
      TimingRow row;
      row.algorithm = opt.algorithms[a];
      row.p = opt.p_grid[i];
      row.runs = opt.runs;
      double total = 0.0;
      for (std::size_t r = 0; r < opt.runs; ++r) {
        const auto& o = outcomes[(a * np + i) * opt.runs + r];
        row.max_seconds = std::max(row.max_seconds, o.seconds);
        if (o.status == SearchStatus::Censored) {
          ++row.censored;
          continue;
        }
        ++row.completed;
        row.found += o.status == SearchStatus::Found;
        total += o.seconds;
      }
      row.mean_seconds = row.completed ? total / static_cast<double>(row.completed) : 0.0;
      res.rows.push_back(row);
    }
  }
  return res;
}

namespace detail {

inline std::string join_grid(const std::vector<double>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) out += (i ? ";" : "") + format_number(grid[i]);
  return out;
}

}  // namespace detail

/// CSV with a leading '#' manifest row holding everything needed to replay.
inline void write_csv(std::ostream& os, const PhaseResult& r) {
  const auto& o = r.options;
  os << "# experiment=phase-transition seed=" << o.seed << " graph=" << o.graph_spec << " protocols=" << o.protocols
     << " runs=" << o.runs << " source=" << r.graph.source << " dest=" << r.graph.dest
     << " grid=" << detail::join_grid(o.p_grid) << "\n";
  os << "p,runs,feasible,p_feasible,feasible_lo,feasible_hi,loops,p_loop,loop_lo,loop_hi\n";
  for (const auto& row : r.rows) {
    os << detail::format_number(row.p) << ',' << row.runs << ',' << row.feasible << ','
       << detail::format_number(row.p_feasible) << ',' << detail::format_number(row.feasible_lo) << ','
       << detail::format_number(row.feasible_hi) << ',' << row.loops << ',' << detail::format_number(row.p_loop) << ','
       << detail::format_number(row.loop_lo) << ',' << detail::format_number(row.loop_hi) << "\n";
  }
}

inline void write_csv(std::ostream& os, const TimingResult& r) {
  const auto& o = r.options;
  std::string algos;
  for (std::size_t i = 0; i < o.algorithms.size(); ++i) algos += (i ? ";" : "") + std::string(algorithm_name(o.algorithms[i]));
  os << "# experiment=timing seed=" << o.seed << " graph=" << o.graph_spec << " protocols=" << o.protocols
     << " runs=" << o.runs << " budget=" << detail::format_number(o.budget_seconds) << " algos=" << algos
     << " max_hops=" << (o.max_hops ? std::to_string(*o.max_hops) : "none")
     << " min_bw=" << detail::format_number(o.min_bandwidth) << " source=" << r.graph.source
     << " dest=" << r.graph.dest << " grid=" << detail::join_grid(o.p_grid) << "\n";
  os << "algo,p,runs,completed,censored,found,mean_seconds,max_seconds\n";
  for (const auto& row : r.rows) {
    os << algorithm_name(row.algorithm) << ',' << detail::format_number(row.p) << ',' << row.runs << ','
       << row.completed << ',' << row.censored << ',' << row.found << ',' << detail::format_number(row.mean_seconds)
       << ',' << detail::format_number(row.max_seconds) << "\n";
  }
}

}  // namespace mlpath
