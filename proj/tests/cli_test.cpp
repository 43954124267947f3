#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit = -1;
  std::string out;
  std::string err;
};

struct ScratchDir {
  fs::path path = fs::temp_directory_path() / ("mlpath_cli_test_" + std::to_string(::getpid()));
  ScratchDir() { fs::create_directories(path); }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path scratch() {
  static const ScratchDir dir;
  return dir.path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

Run run(const std::string& args, const std::string& env = "") {
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = env + " " + MLPATH_CLI + " " + args + " 2>" + err.string();
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

std::string data(const std::string& name) { return std::string(MLPATH_DATA_DIR) + "/" + name; }

}  // namespace

TEST(Cli, ComputeHumanOutput) {
  const auto r = run("compute " + data("tunnel.topo"));
  EXPECT_EQ(r.exit, 0) << r.err;
  EXPECT_NE(r.out.find("weight: 5"), std::string::npos);
  EXPECT_NE(r.out.find("trace: a^ b^ c_ b_ a a"), std::string::npos);
}

TEST(Cli, ComputeJsonValidates) {
  for (const std::string algo : {"pda", "bfs --max-hops 8", "dag-pda --min-bw 1", "dag-bfs --min-bw 1", "samcra --min-bw 1"}) {
    const auto r = run("compute " + data("tunnel.topo") + " --json --algo " + algo);
    ASSERT_EQ(r.exit, 0) << algo << ": " << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("status"), "found");
    EXPECT_EQ(j.at("weight"), 5.0) << algo;
    const auto file = scratch() / "path.json";
    write(file, r.out);
    const auto v = run("validate " + data("tunnel.topo") + " " + file.string());
    EXPECT_EQ(v.exit, 0) << v.err;
  }
}

TEST(Cli, TamperedPathFailsValidation) {
  const auto r = run("compute " + data("tunnel.topo") + " --json");
  auto j = nlohmann::json::parse(r.out);
  j["steps"][1]["node"] = "U3";
  const auto file = scratch() / "tampered.json";
  write(file, j.dump());
  const auto v = run("validate " + data("tunnel.topo") + " " + file.string());
  EXPECT_EQ(v.exit, 1);
  EXPECT_NE(v.err.find("E_INFEASIBLE"), std::string::npos);

  j = nlohmann::json::parse(r.out);
  j["steps"][0]["function"]["kind"] = "conv";
  write(file, j.dump());
  EXPECT_EQ(run("validate " + data("tunnel.topo") + " " + file.string()).exit, 1);

  // The bandwidth floor and QoS ceilings are checked when asked for.
  write(file, r.out);
  EXPECT_EQ(run("validate " + data("tunnel.topo") + " " + file.string() + " --min-bw 11").exit, 1);
  EXPECT_EQ(run("validate " + data("tunnel.topo") + " " + file.string() + " --qos-max 7").exit, 1);
  EXPECT_EQ(run("validate " + data("tunnel.topo") + " " + file.string() + " --qos-max 8").exit, 0);

  write(file, "{not json");
  EXPECT_EQ(run("validate " + data("tunnel.topo") + " " + file.string()).exit, 2);
}

TEST(Cli, ExitCodes) {
  auto r = run("compute " + data("infeasible.topo"));
  EXPECT_EQ(r.exit, 1);
  EXPECT_NE(r.err.find("mlpath: error E_NO_PATH"), std::string::npos);

  r = run("compute " + data("tunnel.topo") + " --no-such-flag");
  EXPECT_EQ(r.exit, 2);
  EXPECT_NE(r.err.find("E_USAGE"), std::string::npos);

  EXPECT_EQ(run("compute " + data("tunnel.topo") + " --algo pda --min-bw 2").exit, 2);
  EXPECT_EQ(run("compute " + data("tunnel.topo") + " --algo samcra").exit, 2);
  EXPECT_EQ(run("compute " + data("tunnel.topo") + " --algo fastest").exit, 2);
  EXPECT_EQ(run("compute " + data("tunnel.topo") + " --source S --dest S").exit, 2);
  EXPECT_EQ(run("compute " + data("tunnel.topo") + " --source Nowhere").exit, 2);
  EXPECT_EQ(run("").exit, 2);

  r = run("compute /nonexistent.topo");
  EXPECT_EQ(r.exit, 2);
  EXPECT_NE(r.err.find("E_IO"), std::string::npos);

  const auto bad = scratch() / "bad.topo";
  write(bad, "[protocols]\na\n[nodes]\nS D\n[edges]\nS D bandwidth=-1\n");
  r = run("compute " + bad.string());
  EXPECT_EQ(r.exit, 2);
  EXPECT_NE(r.err.find("E_PARSE"), std::string::npos);
  EXPECT_NE(r.err.find("line 6"), std::string::npos);
}

TEST(Cli, CensoredSearchExitsThree) {
  // Stacks grow without bound and D is never reachable with an empty one.
  const auto topo = scratch() / "grow.topo";
  write(topo,
        "[protocols]\na\n[nodes]\nS U V D\n[edges]\nS U\nU V\nV U\nV D\n"
        "[functions]\nS conv a a\nU encap a a\nV encap a a\nD conv a a\n[endpoints]\nsource S\ndest D\n");
  const auto r = run("compute " + topo.string() + " --algo bfs --time-limit 0.5");
  EXPECT_EQ(r.exit, 3);
  EXPECT_NE(r.err.find("E_CENSORED"), std::string::npos);
  // The exact pipeline proves infeasibility.
  EXPECT_EQ(run("compute " + topo.string()).exit, 1);
}

TEST(Cli, GenerateIsReproducible) {
  const std::string args = "generate --graph grid:3:3 --p 0.4 --seed 5 --qos-dim 1";
  const auto a = run(args);
  ASSERT_EQ(a.exit, 0) << a.err;
  EXPECT_EQ(a.out, run(args).out);
  EXPECT_NE(a.out, run("generate --graph grid:3:3 --p 0.4 --seed 6 --qos-dim 1").out);
  const auto file = scratch() / "gen.topo";
  write(file, a.out);
  const auto c = run("compute " + file.string() + " --metric hops");
  EXPECT_TRUE(c.exit == 0 || c.exit == 1) << c.err;
  EXPECT_EQ(run("generate --graph er:3:99").exit, 2);
}

TEST(Cli, ReduceSymHam) {
  const auto file = scratch() / "ham.topo";
  auto r = run("reduce-sym-ham " + data("path3.edges") + " --from 0 --to 2 --out " + file.string());
  ASSERT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(run("compute " + file.string() + " --algo samcra --min-bw 1").exit, 0);
  // The path graph 0-1-2 has no Hamiltonian path from 0 to 1.
  r = run("reduce-sym-ham " + data("path3.edges") + " --from 0 --to 1 --out " + file.string());
  ASSERT_EQ(r.exit, 0) << r.err;
  EXPECT_EQ(run("compute " + file.string() + " --algo samcra --min-bw 1").exit, 1);
  EXPECT_EQ(run("reduce-sym-ham " + data("path3.edges") + " --from 0 --to 0").exit, 2);
}

TEST(Cli, ExperimentCsvAndWorkers) {
  const std::string args = "experiment phase-transition --graph er:10:15 --runs 10 --grid 0.1,0.3,0.5 --seed 3";
  const auto a = run(args, "MLPATH_WORKERS=1");
  ASSERT_EQ(a.exit, 0) << a.err;
  EXPECT_EQ(a.out.rfind("# experiment=phase-transition seed=3", 0), 0u);
  EXPECT_EQ(a.out, run(args, "MLPATH_WORKERS=3").out);
  const auto file = scratch() / "phase.csv";
  EXPECT_EQ(run(args + " --out " + file.string()).exit, 0);
  EXPECT_EQ(slurp(file), a.out);

  const auto t = run("experiment timing --graph grid:3:3 --runs 2 --grid 0.5 --budget 2 --algos pda,dag-pda");
  ASSERT_EQ(t.exit, 0) << t.err;
  EXPECT_NE(t.out.find("dag-pda,0.5,2"), std::string::npos);
  EXPECT_EQ(run("experiment timing --algos pda,quantum").exit, 2);
  EXPECT_EQ(run("experiment phase-transition --grid 0.5:0.1:0.1").exit, 2);
}
