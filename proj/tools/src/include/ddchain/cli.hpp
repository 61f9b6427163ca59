#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddchain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInvariant = 2;
inline constexpr int kExitInterrupted = 130;

// A simulate run stopped by request_stop() before all cells finished.
class Interrupted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Written as manifest.json into every output directory.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string version;
  double duration_seconds = 0.0;
  std::string status = "running";  // running | complete | failed | interrupted
  std::vector<std::string> completed;  // finished scenario cells
  std::string error;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
// Writes through a temporary file and a rename.
void write_manifest(const RunManifest& m, const std::string& dir);

std::string tool_version();

struct GenPoolArgs {
  std::string config_path;  // empty: built-in defaults
  std::optional<std::uint64_t> seed;
  std::string out_path;
};

struct SolveArgs {
  std::string snapshot_path;
  int k = 2;
  std::string backend = "compact";  // compact | packing
  bool cross_check = false;
  bool require_wl_terminus = false;
  bool dump_lp = false;
  std::string out_path;  // plan JSON; empty prints to the summary stream only
  std::optional<std::uint64_t> seed;
};

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  bool require_wl_terminus = false;
  int threads = 0;  // 0: DDCHAIN_THREADS or hardware concurrency
};

struct ReportArgs {
  std::string result_dir;
  std::string out_dir;  // empty: <result_dir>/report
};

// Each command throws InputError / InvariantError; run_cli maps them to
// exit codes.
void cmd_gen_pool(const GenPoolArgs& args, std::ostream& out);
void cmd_solve(const SolveArgs& args, std::ostream& out);
void cmd_simulate(const SimulateArgs& args, std::ostream& out);
void cmd_report(const ReportArgs& args, std::ostream& out);

// Worker count: DDCHAIN_THREADS when set, else hardware concurrency.
int worker_threads();

// Requests a graceful stop of a running simulate command.
void request_stop();

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ddchain::cli
