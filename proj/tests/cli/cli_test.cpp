#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>
#include <unistd.h>

#include "ddchain/cli.hpp"
#include "ddchain/snapshot.hpp"
#include "ddchain/solvers.hpp"

namespace ddchain::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / fmt_dir(info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string fmt_dir(const std::string& name) {
    return "ddchain_cli_" + std::to_string(::getpid()) + "_" + name;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ddchain");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str({});
    err_.str({});
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  static std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, GenPoolIsDeterministicAndRoundTrips) {
  write("pool.json", R"({"pairs": 100, "deceased": 4, "wait_list_per_group": 1, "pwl_fraction": 0.3})");
  ASSERT_EQ(run({"gen-pool", "--config", path("pool.json"), "--seed", "7", "--out", path("a.json")}), 0) << err_.str();
  EXPECT_NE(out_.str().find("role"), std::string::npos);
  ASSERT_EQ(run({"gen-pool", "--config", path("pool.json"), "--seed", "7", "--out", path("b.json")}), 0);
  EXPECT_EQ(read(path("a.json")), read(path("b.json")));

  const RegistrySnapshot snap = snapshot_from_json(read(path("a.json")));
  PoolConfig cfg = pool_config_from_json(read(path("pool.json")));
  cfg.seed = 7;
  EXPECT_EQ(snap.nodes, generate_pool(cfg));
  int pairs = 0;
  for (const Node& n : snap.nodes) pairs += n.role() == Role::P || n.role() == Role::PWL;
  EXPECT_EQ(pairs, 100);

  const RunManifest m = manifest_from_json(read(dir_ / "manifest.json"));
  EXPECT_EQ(m.command, "gen-pool");
  EXPECT_EQ(m.seed, 7u);
  EXPECT_EQ(m.status, "complete");
}

TEST_F(CliTest, GenPoolEmptyAndMalformed) {
  write("zero.json", R"({"pairs": 0})");
  ASSERT_EQ(run({"gen-pool", "--config", path("zero.json"), "--out", path("z.json")}), 0);
  EXPECT_TRUE(snapshot_from_json(read(path("z.json"))).nodes.empty());
  write("bad.json", R"({"pairs": "many"})");
  EXPECT_EQ(run({"gen-pool", "--config", path("bad.json"), "--out", path("x.json")}), kExitInput);
  EXPECT_NE(err_.str().find("pairs"), std::string::npos);
  EXPECT_EQ(run({"gen-pool", "--config", path("missing.json"), "--out", path("x.json")}), kExitInput);
}

TEST_F(CliTest, SolveChainInstance) {
  RegistrySnapshot s;
  s.nodes = {Node::deceased(1, BloodGroup::O), Node::pair(2, BloodGroup::O, BloodGroup::A),
             Node::wait_list(3, BloodGroup::A), Node::wait_list(4, BloodGroup::O)};
  write("chain.json", snapshot_to_json(s));
  ASSERT_EQ(oracle_bruteforce(snapshot_graph(s), 2), 2.0);
  for (const char* backend : {"compact", "packing"}) {
    ASSERT_EQ(run({"solve", path("chain.json"), "--k", "2", "--backend", backend, "--out", path("plan.json")}), 0)
        << err_.str();
    const auto plan = nlohmann::json::parse(read(path("plan.json")));
    EXPECT_EQ(plan["objective"].get<double>(), 2.0);
    EXPECT_NE(out_.str().find("DD 1 [O] -> P 2 [O<-A] -> WL 3 [A]"), std::string::npos) << out_.str();
  }
  ASSERT_EQ(run({"solve", path("chain.json"), "--cross-check", "--dump-lp", "--out", path("plan.json")}), 0);
  EXPECT_TRUE(fs::exists(path("plan.lp")));
  EXPECT_NE(read(path("plan.lp")).find("x_"), std::string::npos);
}

TEST_F(CliTest, SolveEmptySnapshot) {
  write("empty.json", R"({"nodes": [], "weight_policy": "unit"})");
  ASSERT_EQ(run({"solve", path("empty.json"), "--out", path("plan.json")}), 0) << err_.str();
  const auto plan = nlohmann::json::parse(read(path("plan.json")));
  EXPECT_EQ(plan["objective"].get<double>(), 0.0);
  EXPECT_TRUE(plan["exchanges"].empty());
}

TEST_F(CliTest, SolveRejectsBadInput) {
  write("bad.json", R"({"nodes": [{"id": 1}]})");
  EXPECT_EQ(run({"solve", path("bad.json")}), kExitInput);
  write("ok.json", R"({"nodes": []})");
  EXPECT_EQ(run({"solve", path("ok.json"), "--backend", "cplex"}), kExitInput);
  EXPECT_EQ(run({"solve", path("ok.json"), "--k", "0"}), kExitInput);
}

TEST_F(CliTest, BackendsAgreeOnRandomSnapshots) {
  write("pool.json", R"({"pairs": 30, "deceased": 3, "wait_list_per_group": 1, "pwl_fraction": 0.2,
                         "compatible_fraction": 0.1})");
  for (int seed = 1; seed <= 50; ++seed) {
    const std::string snap = path("s.json");
    ASSERT_EQ(run({"gen-pool", "--config", path("pool.json"), "--seed", std::to_string(seed), "--out", snap}), 0);
    double objective[2];
    int i = 0;
    for (const char* backend : {"compact", "packing"}) {
      ASSERT_EQ(run({"solve", snap, "--k", seed % 2 ? "2" : "3", "--backend", backend, "--out", path("p.json")}), 0)
          << err_.str();
      objective[i++] = nlohmann::json::parse(read(path("p.json")))["objective"].get<double>();
    }
    EXPECT_EQ(objective[0], objective[1]) << "seed " << seed;
  }
}

TEST_F(CliTest, SimulateAndReport) {
  write("sim.json", R"({"rounds": 3, "replications": 2, "pwl_fraction": 0.1})");
  ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--out", path("res"), "--seed", "3"}), 0) << err_.str();
  int cells = 0;
  for (const auto& e : fs::directory_iterator(path("res"))) {
    if (!e.is_directory()) continue;
    ++cells;
    for (const char* f : {"rounds.csv", "waiting.csv", "dropouts.csv", "summary.json"})
      EXPECT_TRUE(fs::exists(e.path() / f)) << e.path() << f;
    EXPECT_FALSE(fs::exists(e.path() / "manifest.json"));
  }
  // 3 KEP rates x 3 DD rates x 3 dropout levels
  EXPECT_EQ(cells, 27);
  const RunManifest m = manifest_from_json(read(fs::path(path("res")) / "manifest.json"));
  EXPECT_EQ(m.status, "complete");
  EXPECT_EQ(m.seed, 3u);
  EXPECT_EQ(m.completed.size(), 27u);
  EXPECT_EQ(nlohmann::json::parse(read(fs::path(path("res")) / "summary.json"))["cells"].size(), 27u);

  ASSERT_EQ(run({"report", path("res")}), 0) << err_.str();
  const fs::path rep = fs::path(path("res")) / "report";
  std::istringstream waiting(read(rep / "waiting_table.csv"));
  std::string header, line;
  std::getline(waiting, header);
  EXPECT_EQ(header, "scenario,kep_arrival,dd_arrival,dropout_prob,O_DDIC,O_CP,A_DDIC,A_CP,B_DDIC,B_CP");
  int rows = 0;
  while (std::getline(waiting, line)) ++rows;
  EXPECT_EQ(rows, 27);
  std::istringstream dropouts(read(rep / "dropout_table.csv"));
  std::getline(dropouts, header);
  rows = 0;
  while (std::getline(dropouts, line)) {
    ++rows;
    EXPECT_EQ(line.find("_dp0,"), std::string::npos) << line;
  }
  EXPECT_EQ(rows, 18);
  EXPECT_TRUE(fs::exists(rep / "series.csv"));
  EXPECT_TRUE(fs::exists(rep / "transplants_table.csv"));
  EXPECT_EQ(manifest_from_json(read(rep / "manifest.json")).seed, 3u);
}

TEST_F(CliTest, SimulateIsReproducible) {
  write("sim.json", R"({"rounds": 6, "replications": 2, "dropout_prob": 0.1,
                        "grid": {"kep_arrival": [[10, 15]], "dd_arrival": [[1, 5]], "dropout_prob": [0.1]}})");
  ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--out", path("a"), "--seed", "9"}), 0);
  ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--out", path("b"), "--seed", "9"}), 0);
  ASSERT_EQ(run({"simulate", "--config", path("sim.json"), "--out", path("c"), "--seed", "10"}), 0);
  const std::string cell = "kep10-15_dd1-5_dp0.1";
  for (const char* f : {"rounds.csv", "waiting.csv", "dropouts.csv"}) {
    const std::string a = read(fs::path(path("a")) / cell / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read(fs::path(path("b")) / cell / f)) << f;
  }
  EXPECT_NE(read(fs::path(path("a")) / cell / "rounds.csv"), read(fs::path(path("c")) / cell / "rounds.csv"));
}

TEST_F(CliTest, SimulateAndReportErrors) {
  write("bad.json", R"({"rounds": 0})");
  EXPECT_EQ(run({"simulate", "--config", path("bad.json"), "--out", path("res")}), kExitInput);
  write("sim.json", R"({"rounds": 1})");
  EXPECT_EQ(run({"simulate", "--config", path("sim.json")}), kExitInput);
  fs::create_directories(path("empty"));
  EXPECT_EQ(run({"report", path("empty")}), kExitInput);
  EXPECT_EQ(run({"report", path("nowhere")}), kExitInput);
  EXPECT_EQ(run({}), kExitInput);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST(Manifest, RoundTrip) {
  RunManifest m{"simulate", "cfg.json", 42, "/tmp/out", "1.2.3", 4.5, "interrupted", {"a", "b"}, "stopped"};
  const RunManifest back = manifest_from_json(manifest_to_json(m));
  EXPECT_EQ(back.command, m.command);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.status, "interrupted");
  EXPECT_EQ(back.completed, m.completed);
  EXPECT_EQ(back.error, "stopped");
}

TEST(WorkerThreads, EnvironmentOverride) {
  ::setenv("DDCHAIN_THREADS", "3", 1);
  EXPECT_EQ(worker_threads(), 3);
  ::setenv("DDCHAIN_THREADS", "zero", 1);
  EXPECT_THROW(worker_threads(), std::exception);
  ::unsetenv("DDCHAIN_THREADS");
  EXPECT_GE(worker_threads(), 1);
}

}  // namespace
}  // namespace ddchain::cli
