#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ddchain/cli.hpp"
#include "ddchain/errors.hpp"

#ifndef DDCHAIN_VERSION
#define DDCHAIN_VERSION "0.0.0"
#endif

namespace ddchain::cli {

std::string tool_version() { return DDCHAIN_VERSION; }

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["seed"] = m.seed;
  j["output_dir"] = m.output_dir;
  j["version"] = m.version;
  j["duration_seconds"] = m.duration_seconds;
  j["status"] = m.status;
  j["completed"] = m.completed;
  if (!m.error.empty()) j["error"] = m.error;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.output_dir = j.at("output_dir").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
    m.status = j.at("status").get<std::string>();
    m.completed = j.at("completed").get<std::vector<std::string>>();
    if (j.contains("error")) m.error = j["error"].get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(fmt::format("malformed manifest: {}", e.what()));
  }
}

void write_manifest(const RunManifest& m, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path tmp = fs::path(dir) / ".manifest.json.tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw InputError(fmt::format("cannot write manifest in {}", dir));
    f << manifest_to_json(m);
  }
  fs::rename(tmp, fs::path(dir) / "manifest.json");
}

}  // namespace ddchain::cli
