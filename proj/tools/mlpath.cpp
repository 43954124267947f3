// mlpath command-line tool.
//
// Exit codes: 0 success, 1 no feasible path / validation failure,
// 2 usage or input error, 3 search censored by its time or state budget,
// 4 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlpath.hpp"

namespace {

using namespace mlpath;

enum Exit : int { kOk = 0, kNoPath = 1, kUsage = 2, kCensored = 3, kInternal = 4 };

struct CliError : std::runtime_error {
  const char* code;
  int exit;
  CliError(const char* c, int e, const std::string& msg) : std::runtime_error(msg), code(c), exit(e) {}
};

int report(const char* code, int exit, const std::string& message) {
  std::cerr << "mlpath: error " << code << ": " << message << "\n";
  return exit;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CliError("E_USAGE", kUsage, std::string("bad number in ") + what + ": '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Topology read_topology(const std::string& path) {
  try {
    return load_topology(path);
  } catch (const ParseError& e) {
    throw CliError("E_PARSE", kUsage, path + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("E_PARSE", kUsage, path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw CliError("E_IO", kUsage, e.what());
  }
}

NodeId resolve_node(const Network& net, const std::optional<std::string>& name, std::optional<NodeId> fallback,
                    const char* role) {
  if (name) {
    auto id = net.find_node(*name);
    if (!id) throw CliError("E_USAGE", kUsage, std::string("unknown ") + role + " node '" + *name + "'");
    return *id;
  }
  if (!fallback) throw CliError("E_USAGE", kUsage, std::string("no ") + role + " given and none in the topology file");
  return *fallback;
}

void write_output(const std::optional<std::string>& path, const std::string& text) {
  if (!path || *path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(*path);
  if (!out) throw CliError("E_IO", kUsage, "cannot write '" + *path + "'");
  out << text;
}

std::string format_vector(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + detail::format_number(v[i]);
  return out;
}

struct ComputeArgs {
  std::string topology;
  std::optional<std::string> source;
  std::optional<std::string> dest;
  std::string algo = "pda";
  std::string metric = "custom";
  std::optional<std::size_t> max_hops;
  std::optional<double> min_bw;
  std::string qos_max;
  std::uint64_t seed = 1;
  std::size_t restarts = 1;
  std::optional<double> time_limit;
  std::optional<std::size_t> k;
  bool json = false;
};

int run_compute(const ComputeArgs& a) {
  const Topology topo = read_topology(a.topology);
  const NodeId s = resolve_node(topo.net, a.source, topo.source, "source");
  const NodeId d = resolve_node(topo.net, a.dest, topo.dest, "destination");
  if (s == d) throw CliError("E_USAGE", kUsage, "source and destination must differ");

  SolveRequest req;
  try {
    req.algorithm = parse_algorithm(a.algo);
    req.metric = parse_metric(a.metric);
    req.max_hops = a.max_hops;
    req.min_bandwidth = a.min_bw;
    req.qos_max = parse_list(a.qos_max, "--qos-max");
    req.seed = a.seed;
    req.restarts = a.restarts;
    req.workers = worker_count();
    req.time_limit_seconds = a.time_limit;
    req.samcra_k = a.k;
    if (a.k && req.algorithm != Algorithm::Samcra) throw std::invalid_argument("--k only applies to samcra");
    if (!req.qos_max.empty() && req.qos_max.size() != topo.net.qos_dimension()) {
      throw std::invalid_argument("--qos-max needs " + std::to_string(topo.net.qos_dimension()) + " values");
    }
    check_request(req);
  } catch (const std::invalid_argument& e) {
    throw CliError("E_USAGE", kUsage, e.what());
  }

  const SolveOutcome out = solve(topo.net, s, d, req);
  const auto& net = topo.net;
  if (a.json) {
    nlohmann::json j;
    j["algo"] = algorithm_name(req.algorithm);
    j["status"] = status_name(out.status);
    j["heuristic"] = out.heuristic;
    j["seconds"] = out.seconds;
    if (out.result) j.update(path_to_json(net, *out.result));
    std::cout << j.dump(2) << "\n";
  } else if (out.result) {
    const auto& r = *out.result;
    std::cout << "path: " << to_string(net, r.path) << "\n"
              << "trace: " << to_string(net, r.trace) << "\n"
              << "weight: " << detail::format_number(r.weight) << "\n"
              << "hops: " << r.path.hop_count() << "\n"
              << "bandwidth: " << detail::format_number(path_bandwidth(net, r.path)) << "\n";
    if (net.qos_dimension() > 0) std::cout << "qos: " << format_vector(path_qos(net, r.path)) << "\n";
    if (out.heuristic) std::cout << "note: heuristic result\n";
  }

  if (out.status == SearchStatus::Censored) {
    return report("E_CENSORED", kCensored, "search stopped at its time or state budget before completing");
  }
  if (!out.result) return report("E_NO_PATH", kNoPath, "no feasible path from " + net.node_name(s) + " to " + net.node_name(d));
  return kOk;
}

struct GenerateArgs {
  std::string graph = "er:40:148";
  std::size_t protocols = 2;
  double p = 0.3;
  std::uint64_t seed = 1;
  int bw_min = 1;
  int bw_max = 10;
  std::size_t qos_dim = 0;
  int qos_min = 1;
  int qos_max = 10;
  std::optional<std::string> out;
};

int run_generate(const GenerateArgs& a) {
  Network net;
  Digraph g;
  try {
    Rng rng = Rng(a.seed).split(0);
    g = make_graph(a.graph, rng);
    GenParams params;
    params.p = a.p;
    params.protocols = a.protocols;
    params.seed = Rng(a.seed).split(1).next();
    params.bandwidth_min = a.bw_min;
    params.bandwidth_max = a.bw_max;
    params.qos_dimension = a.qos_dim;
    params.qos_min = a.qos_min;
    params.qos_max = a.qos_max;
    net = allocate_functions(g, params);
  } catch (const ParseError& e) {
    throw CliError("E_PARSE", kUsage, e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("E_USAGE", kUsage, e.what());
  }
  std::optional<NodeId> s, d;
  if (weakly_connected(g) && g.n >= 2) std::tie(s, d) = diameter_endpoints(g);
  write_output(a.out, serialize_topology(net, s, d));
  return kOk;
}

struct ReduceArgs {
  std::string graph_file;
  std::size_t from = 0;
  std::size_t to = 1;
  std::optional<std::string> out;
};

int run_reduce(const ReduceArgs& a) {
  Digraph h;
  try {
    h = load_graph_file(a.graph_file);
  } catch (const ParseError& e) {
    throw CliError("E_PARSE", kUsage, a.graph_file + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw CliError("E_IO", kUsage, e.what());
  }
  HamReduction r;
  try {
    r = sym_ham_reduce(h, static_cast<NodeId>(a.from), static_cast<NodeId>(a.to));
  } catch (const std::invalid_argument& e) {
    throw CliError("E_USAGE", kUsage, e.what());
  }
  write_output(a.out, serialize_topology(r.net, r.source, r.dest));
  return kOk;
}

struct ExperimentArgs {
  std::string graph = "er:40:148";
  std::size_t protocols = 2;
  std::string grid = "0.02:0.5:0.02";
  std::optional<std::size_t> runs;
  std::uint64_t seed = 1;
  std::string algos = "pda,bfs";
  double budget = 10.0;
  std::optional<std::size_t> max_hops;
  double min_bw = 1.0;
  std::optional<std::string> out;
};

int run_phase(const ExperimentArgs& a) {
  PhaseOptions opt;
  try {
    opt.graph_spec = a.graph;
    opt.protocols = a.protocols;
    opt.p_grid = parse_grid(a.grid);
    opt.runs = a.runs.value_or(200);
    opt.seed = a.seed;
    opt.workers = worker_count();
    std::ostringstream os;
    const auto res = phase_transition(opt);
    write_csv(os, res);
    write_output(a.out, os.str());
    const auto p_star = half_crossing(res.rows);
    std::cerr << "p at P(feasible)=0.5: " << (p_star ? detail::format_number(*p_star) : "not reached") << "\n";
  } catch (const ParseError& e) {
    throw CliError("E_PARSE", kUsage, e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("E_USAGE", kUsage, e.what());
  }
  return kOk;
}

int run_timing(const ExperimentArgs& a) {
  TimingOptions opt;
  try {
    opt.graph_spec = a.graph;
    opt.protocols = a.protocols;
    opt.p_grid = parse_grid(a.grid);
    opt.runs = a.runs.value_or(100);
    opt.seed = a.seed;
    opt.budget_seconds = a.budget;
    opt.max_hops = a.max_hops;
    opt.min_bandwidth = a.min_bw;
    opt.workers = worker_count();
    opt.algorithms.clear();
    std::stringstream ss(a.algos);
    std::string item;
    while (std::getline(ss, item, ',')) opt.algorithms.push_back(parse_algorithm(item));
    if (opt.algorithms.empty()) throw std::invalid_argument("--algos is empty");
    std::ostringstream os;
    write_csv(os, timing_sweep(opt));
    write_output(a.out, os.str());
  } catch (const ParseError& e) {
    throw CliError("E_PARSE", kUsage, e.what());
  } catch (const std::invalid_argument& e) {
    throw CliError("E_USAGE", kUsage, e.what());
  }
  return kOk;
}

struct ValidateArgs {
  std::string topology;
  std::string path_file;
  std::optional<double> min_bw;
  std::string qos_max;
};

int run_validate(const ValidateArgs& a) {
  const Topology topo = read_topology(a.topology);
  std::ifstream in(a.path_file);
  if (!in) throw CliError("E_IO", kUsage, "cannot open '" + a.path_file + "'");
  MLPath path;
  try {
    path = path_from_json(topo.net, nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw CliError("E_PARSE", kUsage, a.path_file + ": " + e.what());
  } catch (const PathFormatError& e) {
    throw CliError("E_PARSE", kUsage, a.path_file + ": " + e.what());
  }
  const auto qos_max = parse_list(a.qos_max, "--qos-max");
  if (!qos_max.empty() && qos_max.size() != topo.net.qos_dimension()) {
    throw CliError("E_USAGE", kUsage, "--qos-max needs " + std::to_string(topo.net.qos_dimension()) + " values");
  }

  const auto rep = check_feasibility(topo.net, path);
  if (!rep.feasible) {
    return report("E_INFEASIBLE", kNoPath,
                  std::string(reason_name(rep.failure->reason)) + " at step " + std::to_string(rep.failure->step));
  }
  if (a.min_bw && path_bandwidth(topo.net, path) < *a.min_bw - 1e-9) {
    return report("E_INFEASIBLE", kNoPath,
                  "BandwidthBelowFloor: path bandwidth " + detail::format_number(path_bandwidth(topo.net, path)));
  }
  const auto qos = path_qos(topo.net, path);
  for (std::size_t i = 0; i < qos_max.size(); ++i) {
    if (qos[i] > qos_max[i] + 1e-9) {
      return report("E_INFEASIBLE", kNoPath, "QosAboveCeiling: metric " + std::to_string(i) + " is " + detail::format_number(qos[i]));
    }
  }
  std::cout << "feasible: weight " << detail::format_number(path_weight(topo.net, path)) << ", " << path.hop_count()
            << " hops\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shortest feasible paths in multi-layer networks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every verb");

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Shortest feasible path between two nodes of a topology file");
  c->add_option("topology", compute.topology, "Topology file")->required();
  c->add_option("--source", compute.source, "Source node (default: the file's endpoints section)");
  c->add_option("--dest", compute.dest, "Destination node (default: the file's endpoints section)");
  c->add_option("--algo", compute.algo, "pda | bfs | dag-pda | dag-bfs | samcra")->capture_default_str();
  c->add_option("--metric", compute.metric, "hops | encaps | custom (the file's weights)")->capture_default_str();
  c->add_option("--max-hops", compute.max_hops, "Hop limit for bfs and dag-bfs");
  c->add_option("--min-bw", compute.min_bw, "Bandwidth floor (dag-pda, dag-bfs, samcra, optional for bfs)");
  c->add_option("--qos-max", compute.qos_max, "Comma-separated QoS ceilings (samcra)");
  c->add_option("--seed", compute.seed, "Seed for the DAG orientation")->capture_default_str();
  c->add_option("--restarts", compute.restarts, "DAG orientations tried, best kept")->capture_default_str();
  c->add_option("--time-limit", compute.time_limit, "Seconds before bfs or samcra give up");
  c->add_option("--k", compute.k, "Entries kept per samcra state (makes samcra a heuristic)");
  c->add_flag("--json", compute.json, "Machine-readable output");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Random topology with randomly allocated adaptation functions");
  g->add_option("--graph", gen.graph, "er:N:M | regular:N:K | grid:R:C | file:PATH")->capture_default_str();
  g->add_option("--protocols", gen.protocols, "Alphabet size")->capture_default_str();
  g->add_option("--p", gen.p, "Presence probability of each candidate function")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--bw-min", gen.bw_min)->capture_default_str();
  g->add_option("--bw-max", gen.bw_max)->capture_default_str();
  g->add_option("--qos-dim", gen.qos_dim, "Number of additive QoS metrics")->capture_default_str();
  g->add_option("--qos-min", gen.qos_min)->capture_default_str();
  g->add_option("--qos-max", gen.qos_max)->capture_default_str();
  g->add_option("--out", gen.out, "Output file (default stdout)");

  ReduceArgs red;
  auto* r = app.add_subcommand("reduce-sym-ham", "Hamiltonian-path instance to a bandwidth-constrained network");
  r->add_option("graph", red.graph_file, "Edge list file of a symmetric graph")->required();
  r->add_option("--from", red.from, "Hamiltonian path start")->required();
  r->add_option("--to", red.to, "Hamiltonian path end")->required();
  r->add_option("--out", red.out, "Output file (default stdout)");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Monte Carlo experiments (CSV output)");
  e->require_subcommand(1);
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--graph", exp.graph, "Graph spec")->capture_default_str();
    sub->add_option("--protocols", exp.protocols)->capture_default_str();
    sub->add_option("--grid", exp.grid, "p values: start:stop:step or a,b,c")->capture_default_str();
    sub->add_option("--runs", exp.runs, "Runs per p");
    sub->add_option("--seed", exp.seed)->capture_default_str();
    sub->add_option("--out", exp.out, "CSV file (default stdout)");
  };
  auto* phase = e->add_subcommand("phase-transition", "P(feasible) and loop share against p");
  common(phase);
  auto* timing = e->add_subcommand("timing", "Solver wall-clock time against p");
  common(timing);
  timing->add_option("--algos", exp.algos, "Comma-separated algorithms")->capture_default_str();
  timing->add_option("--budget", exp.budget, "Seconds per run before censoring")->capture_default_str();
  timing->add_option("--max-hops", exp.max_hops, "Hop limit for bfs and dag-bfs");
  timing->add_option("--min-bw", exp.min_bw, "Bandwidth floor for dag-pda, dag-bfs, samcra")->capture_default_str();

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Check a path file (compute --json output) against a topology");
  v->add_option("topology", val.topology, "Topology file")->required();
  v->add_option("path", val.path_file, "Path file")->required();
  v->add_option("--min-bw", val.min_bw, "Also require this bandwidth floor");
  v->add_option("--qos-max", val.qos_max, "Also require these QoS ceilings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    return report("E_USAGE", kUsage, ex.what());
  }

  try {
    if (c->parsed()) return run_compute(compute);
    if (g->parsed()) return run_generate(gen);
    if (r->parsed()) return run_reduce(red);
    if (phase->parsed()) return run_phase(exp);
    if (timing->parsed()) return run_timing(exp);
    if (v->parsed()) return run_validate(val);
  } catch (const CliError& ex) {
    return report(ex.code, ex.exit, ex.what());
  } catch (const std::exception& ex) {
    return report("E_INTERNAL", kInternal, ex.what());
  }
  return report("E_USAGE", kUsage, "no verb given");
}
