// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>

#include "ddchain/cli.hpp"
#include "ddchain/report.hpp"
#include "ddchain/rng.hpp"
#include "ddchain/simulation.hpp"
#include "ddchain/solvers.hpp"
#include "support/instances.hpp"

namespace {

using namespace ddchain;
using Clock = std::chrono::steady_clock;

// Pinned limits.
constexpr int kOracleInstances = 240;
constexpr int kOracleMaxNodes = 12;
constexpr double kOracleBudgetSeconds = 60.0;
constexpr int kScaleInstances = 100;
constexpr int kScaleMaxPairs = 200;
constexpr int kScaleDeceased = 10;
constexpr double kScaleBudgetSeconds = 600.0;
constexpr int kDominanceSnapshots = 500;
constexpr int kDominanceBatch = 100;
constexpr int kGridRounds = 60;
constexpr int kGridReplications = 30;
constexpr int kGridK = 2;
constexpr double kGridBudgetSeconds = 1800.0;
// One-sided 5% critical value of Student's t with 29 degrees of freedom.
constexpr double kTCritical29 = 1.699;

bool g_all_pass = true;

double seconds(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void fail(std::string why) {
    pass = false;
    if (notes.size() < 8) notes.push_back(std::move(why));
  }
};

void report(int id, const char* name, const Verdict& v, const std::string& detail) {
  g_all_pass = g_all_pass && v.pass;
  std::cout << fmt::format("criterion {} {}: {} ({})\n", id, name, v.pass ? "PASS" : "FAIL", detail);
  for (const std::string& n : v.notes) std::cout << "    " << n << "\n";
  std::cout.flush();
}

// Independent structural audit of a plan, written against the raw graph.
std::vector<std::string> audit(const ExchangeGraph& g, const MatchPlan& plan, int k, bool cn_threshold) {
  std::vector<std::string> out;
  std::vector<int> gives(g.num_nodes(), 0), receives(g.num_nodes(), 0);
  std::vector<double> received_weight(g.num_nodes(), 0.0);
  std::set<NodeIndex> seen;
  std::set<int> copies;
  double total = 0.0;
  for (std::size_t x = 0; x < plan.exchanges.size(); ++x) {
    const Exchange& ex = plan.exchanges[x];
    if (ex.edges.empty()) {
      out.push_back(fmt::format("exchange {} has no edges", x));
      continue;
    }
    if (static_cast<int>(ex.edges.size()) > k) out.push_back(fmt::format("exchange {} longer than k", x));
    if (!ex.copy_index || !copies.insert(*ex.copy_index).second)
      out.push_back(fmt::format("exchange {} lacks a distinct copy index", x));
    std::set<NodeIndex> local;
    for (std::size_t i = 0; i < ex.edges.size(); ++i) {
      const Edge& e = g.edge(ex.edges[i]);
      if (i + 1 < ex.edges.size() && g.edge(ex.edges[i + 1]).from != e.to)
        out.push_back(fmt::format("exchange {} is not a walk", x));
      local.insert(e.from);
      local.insert(e.to);
      gives[e.from]++;
      receives[e.to]++;
      received_weight[e.to] += e.weight;
      total += e.weight;
    }
    const Edge& first = g.edge(ex.edges.front());
    const Edge& last = g.edge(ex.edges.back());
    if (ex.kind == ExchangeKind::Cycle) {
      if (last.to != first.from) out.push_back(fmt::format("cycle {} does not close", x));
      if (local.size() != ex.edges.size()) out.push_back(fmt::format("cycle {} repeats a node", x));
    } else {
      if (g.role(first.from) != Role::DD) out.push_back(fmt::format("chain {} does not start at a DD", x));
      if (local.size() != ex.edges.size() + 1) out.push_back(fmt::format("chain {} repeats a node", x));
    }
    for (NodeIndex v : local)
      if (!seen.insert(v).second) out.push_back(fmt::format("node {} used by two exchanges", g.node(v).id));
  }
  for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
    const NodeId id = g.node(v).id;
    switch (g.role(v)) {
      case Role::P:
      case Role::CN:
        if (gives[v] != receives[v]) out.push_back(fmt::format("node {} gives {} receives {}", id, gives[v], receives[v]));
        break;
      case Role::PWL:
        if (gives[v] > receives[v]) out.push_back(fmt::format("PWL {} gives without receiving", id));
        break;
      case Role::DD:
        if (receives[v] > 0) out.push_back(fmt::format("DD {} receives", id));
        break;
      case Role::WL:
        if (gives[v] > 0) out.push_back(fmt::format("WL {} gives", id));
        break;
    }
    if (gives[v] > 1 || receives[v] > 1) out.push_back(fmt::format("node {} used twice", id));
    if (cn_threshold && receives[v] > 0) {
      if (auto self = g.self_weight(v); self && received_weight[v] + 1e-9 < *self)
        out.push_back(fmt::format("CN {} receives {} below own {}", id, received_weight[v], *self));
    }
  }
  if (std::abs(total - plan.objective) > 1e-6) out.push_back("objective does not equal the edge weight sum");
  return out;
}

struct Solved {
  ExchangeGraph graph;
  SolveOptions options;
  MatchPlan compact;
  MatchPlan packing;
};

std::vector<Solved> g_solved;

void criterion_oracle() {
  const auto start = Clock::now();
  Verdict v;
  int instances = 0;
  for (int i = 0; i < kOracleInstances; ++i) {
    const std::uint64_t seed = 0xACCE55 + static_cast<std::uint64_t>(i);
    const int nodes = 4 + i % (kOracleMaxNodes - 3);
    const testing::InstanceSpec spec{nodes, i % 2 == 1, (i / 2) % 3 == 2 ? 0.3 : 0.0};
    const SolveOptions options{2 + (i / 6) % 2, true, (i / 12) % 5 == 4};
    ExchangeGraph g = testing::random_mixed_graph(seed, spec);
    MatchPlan a = solve_bb(build_compact(g, options));
    MatchPlan b = solve_packing(g, options);
    const double oracle = oracle_bruteforce(g, options);
    if (a.objective != oracle || b.objective != oracle)
      v.fail(fmt::format("seed {} k {}: compact {} packing {} oracle {}", seed, options.k, a.objective, b.objective,
                         oracle));
    g_solved.push_back({std::move(g), options, std::move(a), std::move(b)});
    ++instances;
  }
  const double t = seconds(start);
  if (t >= kOracleBudgetSeconds) v.fail(fmt::format("took {:.1f}s, budget {:.0f}s", t, kOracleBudgetSeconds));
  report(1, "oracle equivalence", v, fmt::format("{} instances up to {} nodes, k in {{2,3}}, {:.1f}s", instances,
                                                  kOracleMaxNodes, t));
}

void criterion_scale() {
  const auto start = Clock::now();
  Verdict v;
  int largest = 0;
  for (int i = 0; i < kScaleInstances; ++i) {
    const std::uint64_t seed = 0x5CA1E + static_cast<std::uint64_t>(i);
    const int pairs = 20 + (kScaleMaxPairs - 20) * i / (kScaleInstances - 1);
    const int deceased = i % 4 == 3 ? i % kScaleDeceased : kScaleDeceased;
    const testing::ScaleSpec spec{pairs, deceased, i % 4 >= 2, 0.3 + 0.1 * (i % 3)};
    const SolveOptions options{i % 2 == 0 ? 2 : 3, true, false};
    ExchangeGraph g = testing::random_registry_graph(seed, spec);
    MatchPlan a = solve_bb(build_compact(g, options));
    MatchPlan b = solve_packing(g, options);
    if (a.objective != b.objective)
      v.fail(fmt::format("seed {} ({} pairs, k {}): compact {} packing {}", seed, pairs, options.k, a.objective,
                         b.objective));
    largest = std::max(largest, pairs);
    g_solved.push_back({std::move(g), options, std::move(a), std::move(b)});
  }
  const double t = seconds(start);
  if (t >= kScaleBudgetSeconds) v.fail(fmt::format("took {:.1f}s, budget {:.0f}s", t, kScaleBudgetSeconds));
  report(2, "backend equivalence at scale", v,
         fmt::format("{} instances, up to {} pairs + {} DD + WL sinks, {:.1f}s", kScaleInstances, largest,
                     kScaleDeceased, t));
}

void criterion_structure() {
  Verdict v;
  int plans = 0;
  for (const Solved& s : g_solved) {
    for (const MatchPlan* plan : {&s.compact, &s.packing}) {
      ++plans;
      for (const std::string& p : audit(s.graph, *plan, s.options.k, s.options.include_cn_constraint))
        v.fail(p);
      for (const std::string& p : validate_plan(s.graph, *plan, s.options)) v.fail("validate_plan: " + p);
    }
  }
  report(3, "model structure", v, fmt::format("{} decoded plans audited", plans));
}

void criterion_dominance() {
  Verdict v;
  int strict = 0, batch_strict = 0, batches = 0;
  for (int i = 0; i < kDominanceSnapshots; ++i) {
    std::mt19937_64 rng(hash_key({0xD0, static_cast<std::uint64_t>(i)}));
    ScenarioConfig cfg;
    cfg.kep_arrival = {2, 40};
    cfg.dd_arrival = {0, 6};
    cfg.pwl_fraction = i % 3 == 0 ? 0.3 : 0.0;
    std::mt19937_64 dd_rng(hash_key({0xDD, static_cast<std::uint64_t>(i)}));
    NodeId next_pair = 1, next_dd = kDeceasedIdBase;
    const RoundArrivals a = generate_arrivals(cfg, 0, rng, dd_rng, next_pair, next_dd);
    const int k = i % 2 == 0 ? 2 : 3;
    const double knockout = i % 4 == 1 ? 0.3 : 0.0;
    const RoundComparison c = compare_single_round(a.pairs, a.deceased, k, i % 5 == 4, knockout, i);
    if (c.ddic < c.cp) v.fail(fmt::format("snapshot {}: DDIC {} < CP {}", i, c.ddic, c.cp));
    if (c.ddic > c.cp) {
      ++strict;
      ++batch_strict;
    }
    if ((i + 1) % kDominanceBatch == 0) {
      ++batches;
      if (batch_strict == 0) v.fail(fmt::format("batch {} has no strict improvement", batches));
      batch_strict = 0;
    }
  }
  report(4, "single-round dominance", v,
         fmt::format("{} snapshots in {} batches, {} strict", kDominanceSnapshots, batches, strict));
}

struct GridRun {
  std::vector<ScenarioCell> cells;
  std::vector<ReportTables> tables;
  double seconds = 0.0;
};

GridRun run_grid() {
  GridRun run;
  ScenarioConfig base;
  base.rounds = kGridRounds;
  base.replications = kGridReplications;
  base.k = kGridK;
  run.cells = expand_grid(base, ScenarioGrid{});
  const auto start = Clock::now();
  const int threads = std::max(1u, std::thread::hardware_concurrency());
  for (const ScenarioCell& cell : run.cells) run.tables.push_back(summarize(run_scenario(cell.config, threads), cell.name));
  run.seconds = seconds(start);
  return run;
}

void criterion_longitudinal(const GridRun& run) {
  Verdict v;
  constexpr std::array<BloodGroup, 3> kPairGroups{BloodGroup::O, BloodGroup::A, BloodGroup::B};
  for (const ReportTables& t : run.tables) {
    const auto ddic = static_cast<std::size_t>(Policy::DDIC), cp = static_cast<std::size_t>(Policy::CP);
    if (!(t.total_transplants[ddic] > t.total_transplants[cp]))
      v.fail(fmt::format("{}: (a) transplants DDIC {:.2f} vs CP {:.2f}", t.scenario, t.total_transplants[ddic],
                         t.total_transplants[cp]));
    for (BloodGroup g : kPairGroups) {
      const double w_ddic = t.group(g, Policy::DDIC).mean_wait, w_cp = t.group(g, Policy::CP).mean_wait;
      if (!(w_ddic < w_cp)) v.fail(fmt::format("{}: (b) {} wait DDIC {:.3f} vs CP {:.3f}", t.scenario, to_string(g), w_ddic, w_cp));
      if (t.config.dropout_prob > 0.0) {
        const double d_ddic = t.group(g, Policy::DDIC).total_dropouts, d_cp = t.group(g, Policy::CP).total_dropouts;
        if (!(d_ddic < d_cp))
          v.fail(fmt::format("{}: (c) {} dropouts DDIC {:.2f} vs CP {:.2f}", t.scenario, to_string(g), d_ddic, d_cp));
      }
    }
    for (Policy p : kPolicies) {
      const double ab = t.group(BloodGroup::AB, p).mean_wait;
      const double o = t.group(BloodGroup::O, p).mean_wait;
      for (BloodGroup g : kPairGroups) {
        const double w = t.group(g, p).mean_wait;
        if (!(ab <= w)) v.fail(fmt::format("{} {}: (d) AB wait {:.3f} above {} {:.3f}", t.scenario, to_string(p), ab, to_string(g), w));
        if (g != BloodGroup::O && !(o > w))
          v.fail(fmt::format("{} {}: (e) O wait {:.3f} not above {} {:.3f}", t.scenario, to_string(p), o, to_string(g), w));
      }
    }
  }
  if (run.seconds >= kGridBudgetSeconds) v.fail(fmt::format("grid took {:.0f}s", run.seconds));
  const ReportTables& first = run.tables.front();
  report(5, "longitudinal direction", v,
         fmt::format("{} cells x {} replications x {} rounds, {:.0f}s; first cell O wait DDIC {:.2f} / CP {:.2f}",
                     run.tables.size(), kGridReplications, kGridRounds, run.seconds,
                     first.group(BloodGroup::O, Policy::DDIC).mean_wait, first.group(BloodGroup::O, Policy::CP).mean_wait));
}

void criterion_monotonicity(const GridRun& run) {
  Verdict v;
  std::map<std::pair<int, double>, std::vector<const ReportTables*>> by_kep_dp;
  for (const ReportTables& t : run.tables) by_kep_dp[{t.config.kep_arrival.lo, t.config.dropout_prob}].push_back(&t);
  int comparisons = 0;
  double min_t = 1e300;
  for (auto& [key, series] : by_kep_dp) {
    std::sort(series.begin(), series.end(),
              [](const ReportTables* a, const ReportTables* b) { return a->config.dd_arrival.lo < b->config.dd_arrival.lo; });
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
      const auto& lo = series[i]->transplant_gap;
      const auto& hi = series[i + 1]->transplant_gap;
      const std::size_t n = lo.size();
      double mean = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += (hi[r] - lo[r]) / static_cast<double>(n);
      double var = 0.0;
      for (std::size_t r = 0; r < n; ++r) var += std::pow(hi[r] - lo[r] - mean, 2) / static_cast<double>(n - 1);
      const double se = std::sqrt(var / static_cast<double>(n));
      const double t = se > 0.0 ? mean / se : (mean < 0.0 ? -1e300 : 0.0);
      min_t = std::min(min_t, t);
      ++comparisons;
      if (t < -kTCritical29)
        v.fail(fmt::format("{} -> {}: gap falls by {:.2f} (t = {:.2f})", series[i]->scenario, series[i + 1]->scenario,
                           -mean, t));
    }
  }
  report(6, "DD-rate monotonicity", v,
         fmt::format("{} paired comparisons over {} replications, smallest t {:.2f}, critical -{:.3f}", comparisons,
                     kGridReplications, min_t, kTCritical29));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion_reproducibility() {
  namespace fs = std::filesystem;
  Verdict v;
  const fs::path root = fs::temp_directory_path() / fmt::format("ddchain_repro_{}", ::getpid());
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "config.json");
    cfg << R"({"rounds": 12, "replications": 3, "pwl_fraction": 0.2,
              "grid": {"kep_arrival": [[10, 15]], "dd_arrival": [[1, 5], [10, 15]], "dropout_prob": [0.0, 0.3]}})";
  }
  std::ostringstream sink;
  int files = 0;
  for (const char* out : {"a", "b"}) {
    const std::string out_dir = (root / out).string(), config = (root / "config.json").string();
    const char* argv[] = {"ddchain", "simulate", "--config", config.c_str(), "--out", out_dir.c_str(), "--seed", "42"};
    if (cli::run_cli(8, argv, sink, sink) != 0) v.fail(fmt::format("simulate run {} failed: {}", out, sink.str()));
  }
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    const fs::path twin = root / "b" / fs::relative(entry.path(), root / "a");
    if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin))
      v.fail(fmt::format("{} differs", fs::relative(entry.path(), root / "a").string()));
  }
  if (files == 0) v.fail("no CSV output");
  fs::remove_all(root);
  report(7, "reproducibility", v, fmt::format("{} CSV files compared byte for byte", files));
}

}  // namespace

int main() {
  criterion_oracle();
  criterion_scale();
  criterion_structure();
  criterion_dominance();
  const GridRun grid = run_grid();
  criterion_longitudinal(grid);
  criterion_monotonicity(grid);
  criterion_reproducibility();
  return g_all_pass ? 0 : 1;
}
