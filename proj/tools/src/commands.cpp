#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "ddchain/cli.hpp"
#include "ddchain/errors.hpp"
#include "ddchain/formulation.hpp"
#include "ddchain/report.hpp"
#include "ddchain/snapshot.hpp"
#include "ddchain/solvers.hpp"

namespace ddchain::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

constexpr double kObjectiveTol = 1e-6;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError(fmt::format("cannot read {}", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InputError(fmt::format("cannot write {}", path.string()));
    f << text;
  }
  fs::rename(tmp, path);
}

std::string parent_dir(const std::string& path) {
  const fs::path p = fs::absolute(path).parent_path();
  return p.string();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string describe(const Node& n) {
  std::string donors;
  for (const Donor& d : n.donors()) donors += fmt::format("{}{}", donors.empty() ? "" : "/", to_string(d.blood_group));
  switch (n.role()) {
    case Role::DD: return fmt::format("DD {} [{}]", n.id, donors);
    case Role::WL: return fmt::format("WL {} [{}]", n.id, to_string(*n.recipient()));
    default: return fmt::format("{} {} [{}<-{}]", to_string(n.role()), n.id, to_string(*n.recipient()), donors);
  }
}

void print_plan(const ExchangeGraph& g, const MatchPlan& plan, std::ostream& out) {
  out << fmt::format("objective {:.6g}, {} transplants, {} exchanges\n", plan.objective, plan.num_transplants(),
                     plan.exchanges.size());
  for (const Exchange& x : plan.exchanges) {
    std::string walk;
    for (NodeIndex i : x.nodes) walk += (walk.empty() ? "" : " -> ") + describe(g.node(i));
    if (x.kind == ExchangeKind::Cycle) walk += " -> " + describe(g.node(x.nodes.front()));
    out << fmt::format("  {:<5} len {} w {:.6g}: {}\n", to_string(x.kind), x.length(), x.total_weight, walk);
  }
}

MatchPlan checked(const ExchangeGraph& g, MatchPlan plan, const SolveOptions& options, const char* backend) {
  const auto problems = validate_plan(g, plan, options);
  if (!problems.empty()) throw InvariantError(fmt::format("{} backend returned an invalid plan: {}", backend, problems.front()));
  return plan;
}

}  // namespace

void request_stop() { g_stop.store(true); }

int worker_threads() {
  if (const char* env = std::getenv("DDCHAIN_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw InputError(fmt::format("DDCHAIN_THREADS must be a positive integer, got \"{}\"", env));
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void cmd_gen_pool(const GenPoolArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (args.out_path.empty()) throw InputError("gen-pool needs --out");
  PoolConfig cfg = args.config_path.empty() ? PoolConfig{} : pool_config_from_json(read_file(args.config_path));
  if (args.seed) cfg.seed = *args.seed;

  RegistrySnapshot snap;
  snap.nodes = generate_pool(cfg);
  write_file(args.out_path, snapshot_to_json(snap));

  std::map<Role, std::array<int, 4>> tally;
  for (const Node& n : snap.nodes) {
    const BloodGroup g = n.role() == Role::DD ? n.donors().front().blood_group : *n.recipient();
    tally[n.role()][index_of(g)]++;
  }
  out << fmt::format("wrote {} nodes to {}\n", snap.nodes.size(), args.out_path);
  out << "role      O      A      B     AB\n";
  for (const auto& [role, counts] : tally)
    out << fmt::format("{:<4} {:>6} {:>6} {:>6} {:>6}\n", to_string(role), counts[0], counts[1], counts[2], counts[3]);

  RunManifest m{"gen-pool", args.config_path, cfg.seed, parent_dir(args.out_path), tool_version(),
                seconds_since(start), "complete", {}, {}};
  write_manifest(m, m.output_dir);
}

void cmd_solve(const SolveArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (args.backend != "compact" && args.backend != "packing")
    throw InputError(fmt::format("unknown backend \"{}\" (compact or packing)", args.backend));
  if (args.k < 1) throw InputError("k must be at least 1");
  const RegistrySnapshot snap = snapshot_from_json(read_file(args.snapshot_path));
  const ExchangeGraph g = snapshot_graph(snap);
  const SolveOptions options{args.k, true, args.require_wl_terminus};

  std::optional<MatchPlan> compact, packing;
  const bool need_compact = args.backend == "compact" || args.cross_check || args.dump_lp;
  std::optional<CompactFormulation> formulation;
  if (need_compact) formulation = build_compact(g, options);
  if (args.backend == "compact" || args.cross_check) compact = checked(g, solve_bb(*formulation), options, "compact");
  if (args.backend == "packing" || args.cross_check) packing = checked(g, solve_packing(g, options), options, "packing");
  if (compact && packing && std::abs(compact->objective - packing->objective) > kObjectiveTol)
    throw InvariantError(fmt::format("backends disagree: compact {:.9g} vs packing {:.9g}", compact->objective,
                                     packing->objective));
  const MatchPlan& plan = args.backend == "compact" ? *compact : *packing;

  print_plan(g, plan, out);
  if (args.cross_check) out << "cross-check: compact and packing objectives agree\n";
  std::string out_dir;
  if (!args.out_path.empty()) {
    write_file(args.out_path, plan_to_json(g, plan));
    out_dir = parent_dir(args.out_path);
  }
  if (args.dump_lp) {
    const fs::path lp_path =
        args.out_path.empty() ? fs::path("formulation.lp") : fs::path(args.out_path).replace_extension(".lp");
    std::ostringstream lp;
    write_lp(*formulation, lp);
    write_file(lp_path, lp.str());
    out << fmt::format("formulation written to {}\n", lp_path.string());
  }
  if (!out_dir.empty()) {
    RunManifest m{"solve", args.snapshot_path, args.seed.value_or(0), out_dir, tool_version(),
                  seconds_since(start), "complete", {}, {}};
    write_manifest(m, out_dir);
  }
}

void cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (args.config_path.empty()) throw InputError("simulate needs --config");
  if (args.out_dir.empty()) throw InputError("simulate needs --out");
  BatchConfig batch = batch_from_json(read_file(args.config_path));
  if (args.seed) batch.base.rng_seed = *args.seed;
  if (args.k) batch.base.k = *args.k;
  if (args.require_wl_terminus) batch.base.require_wl_terminus = true;
  validate(batch.base);
  const std::vector<ScenarioCell> cells = expand_grid(batch.base, batch.grid.value_or(ScenarioGrid{}));
  for (const ScenarioCell& c : cells) validate(c.config);

  g_stop.store(false);
  const fs::path root(args.out_dir);
  fs::create_directories(root);
  RunManifest manifest{"simulate", args.config_path, batch.base.rng_seed, fs::absolute(root).string(),
                       tool_version(), 0.0, "running", {}, {}};
  write_manifest(manifest, root.string());

  const int threads = args.threads > 0 ? args.threads : worker_threads();
  const int cell_workers = std::clamp<int>(threads, 1, static_cast<int>(cells.size()));
  const int rep_workers = std::max(1, threads / cell_workers);
  std::vector<std::string> summaries(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size() || g_stop.load()) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        const ScenarioCell& cell = cells[i];
        const ReportTables tables = summarize(run_scenario(cell.config, rep_workers), cell.name);
        const fs::path staging = root / (".tmp-" + cell.name);
        const fs::path target = root / cell.name;
        fs::remove_all(staging);
        write_report(tables, staging.string());
        fs::remove_all(target);
        fs::rename(staging, target);
        std::lock_guard lock(mu);
        summaries[i] = summary_json(tables);
        manifest.completed.push_back(cell.name);
        manifest.duration_seconds = seconds_since(start);
        write_manifest(manifest, root.string());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < cell_workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::sort(manifest.completed.begin(), manifest.completed.end());
  manifest.duration_seconds = seconds_since(start);
  if (failure || g_stop.load()) {
    manifest.status = failure ? "failed" : "interrupted";
    if (failure) {
      try {
        std::rethrow_exception(failure);
      } catch (const std::exception& e) {
        manifest.error = e.what();
      }
    }
    write_manifest(manifest, root.string());
    if (failure) std::rethrow_exception(failure);
    throw Interrupted(fmt::format("interrupted after {} of {} cells", manifest.completed.size(), cells.size()));
  }

  nlohmann::ordered_json combined;
  combined["cells"] = nlohmann::ordered_json::array();
  for (const std::string& s : summaries) combined["cells"].push_back(nlohmann::ordered_json::parse(s));
  write_file(root / "summary.json", combined.dump(2) + "\n");
  manifest.status = "complete";
  write_manifest(manifest, root.string());
  out << fmt::format("simulated {} scenario cells into {} ({:.1f}s)\n", cells.size(), root.string(),
                     manifest.duration_seconds);
}

namespace {

struct CellResult {
  std::string name;
  ScenarioConfig config;
  nlohmann::json summary;
  std::string rounds_csv;
};

std::string range_text(const UniformRange& r) { return fmt::format("{}-{}", r.lo, r.hi); }

std::vector<CellResult> load_cells(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError(fmt::format("{} is not a directory", dir.string()));
  std::vector<CellResult> cells;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.starts_with(".") || !fs::exists(entry.path() / "summary.json")) continue;
    CellResult c;
    c.name = name;
    try {
      c.summary = nlohmann::json::parse(read_file((entry.path() / "summary.json").string()));
      c.config = scenario_from_json(c.summary.at("config").dump());
    } catch (const nlohmann::json::exception& e) {
      throw InputError(fmt::format("{}: malformed summary.json: {}", name, e.what()));
    }
    c.rounds_csv = read_file((entry.path() / "rounds.csv").string());
    cells.push_back(std::move(c));
  }
  if (cells.empty()) throw InputError(fmt::format("no scenario results found in {}", dir.string()));
  std::sort(cells.begin(), cells.end(), [](const CellResult& a, const CellResult& b) {
    const auto key = [](const ScenarioConfig& c) {
      return std::tuple(c.kep_arrival.lo, c.kep_arrival.hi, c.dd_arrival.lo, c.dd_arrival.hi, c.dropout_prob);
    };
    return key(a.config) < key(b.config) || (key(a.config) == key(b.config) && a.name < b.name);
  });
  return cells;
}

double group_value(const CellResult& c, const char* policy, const char* group, const char* field) {
  try {
    return c.summary.at("policies").at(policy).at("groups").at(group).at(field).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("{}: summary.json lacks {}/{}/{}", c.name, policy, group, field));
  }
}

std::string group_table(const std::vector<CellResult>& cells, const char* field, bool skip_zero_dropout) {
  std::string text = "scenario,kep_arrival,dd_arrival,dropout_prob";
  for (const char* g : {"O", "A", "B"}) text += fmt::format(",{0}_DDIC,{0}_CP", g);
  text += "\n";
  for (const CellResult& c : cells) {
    if (skip_zero_dropout && c.config.dropout_prob == 0.0) continue;
    text += fmt::format("{},{},{},{}", c.name, range_text(c.config.kep_arrival), range_text(c.config.dd_arrival),
                        c.config.dropout_prob);
    for (const char* g : {"O", "A", "B"})
      text += fmt::format(",{:.3f},{:.3f}", group_value(c, "DDIC", g, field), group_value(c, "CP", g, field));
    text += "\n";
  }
  return text;
}

}  // namespace

void cmd_report(const ReportArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(args.result_dir);
  const std::vector<CellResult> cells = load_cells(dir);
  const fs::path out_dir = args.out_dir.empty() ? dir / "report" : fs::path(args.out_dir);

  write_file(out_dir / "waiting_table.csv", group_table(cells, "mean_wait_months", false));
  write_file(out_dir / "dropout_table.csv", group_table(cells, "total_dropouts", true));

  std::string totals = "scenario,kep_arrival,dd_arrival,dropout_prob,transplants_DDIC,transplants_CP,dropouts_DDIC,"
                       "dropouts_CP\n";
  std::string series = "scenario,";
  bool header_done = false;
  for (const CellResult& c : cells) {
    const auto& p = c.summary.at("policies");
    totals += fmt::format("{},{},{},{},{:.3f},{:.3f},{:.3f},{:.3f}\n", c.name, range_text(c.config.kep_arrival),
                          range_text(c.config.dd_arrival), c.config.dropout_prob,
                          p.at("DDIC").at("total_transplants").get<double>(),
                          p.at("CP").at("total_transplants").get<double>(),
                          p.at("DDIC").at("total_dropouts").get<double>(), p.at("CP").at("total_dropouts").get<double>());
    std::istringstream lines(c.rounds_csv);
    std::string line;
    if (!std::getline(lines, line)) throw InputError(fmt::format("{}: empty rounds.csv", c.name));
    if (!header_done) {
      series += line + "\n";
      header_done = true;
    }
    while (std::getline(lines, line))
      if (!line.empty()) series += c.name + "," + line + "\n";
  }
  write_file(out_dir / "transplants_table.csv", totals);
  write_file(out_dir / "series.csv", series);

  std::uint64_t seed = 0;
  if (fs::exists(dir / "manifest.json")) seed = manifest_from_json(read_file((dir / "manifest.json").string())).seed;
  RunManifest m{"report", args.result_dir, seed, fs::absolute(out_dir).string(), tool_version(),
                seconds_since(start), "complete", {}, {}};
  for (const CellResult& c : cells) m.completed.push_back(c.name);
  write_manifest(m, out_dir.string());
  out << fmt::format("report for {} scenario cells written to {}\n", cells.size(), out_dir.string());
}

}  // namespace ddchain::cli
