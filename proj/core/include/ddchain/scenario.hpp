#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddchain/blood_group.hpp"

namespace ddchain {

// Inclusive integer range for Uniform{lo..hi} draws.
struct UniformRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const UniformRange&, const UniformRange&) = default;
};

// Probabilities in O, A, B, AB order.
using GroupDistribution = std::array<double, 4>;

// Approximate blood-group shares of the Indian population.
inline constexpr GroupDistribution kIndianPopulation = {0.37, 0.22, 0.32, 0.09};

enum class PairModelKind : std::uint8_t {
  // donor and recipient drawn i.i.d. from `population`, ABO-compatible draws
  // rejected
  Rejection,
  // explicit joint table over (recipient, donor)
  Table,
};

struct PairBloodGroupModel {
  PairModelKind kind = PairModelKind::Rejection;
  GroupDistribution population = kIndianPopulation;
  // table[recipient][donor], used by PairModelKind::Table
  std::array<GroupDistribution, 4> table{};
  friend bool operator==(const PairBloodGroupModel&, const PairBloodGroupModel&) = default;
};

struct ScenarioConfig {
  UniformRange kep_arrival{10, 15};
  UniformRange dd_arrival{1, 5};
  double dropout_prob = 0.0;
  int rounds = 60;
  int replications = 30;
  int k = 2;
  double pwl_fraction = 0.0;
  PairBloodGroupModel pair_bg_model;
  GroupDistribution dd_bg_distribution = kIndianPopulation;
  double tissue_knockout_prob = 0.0;
  bool require_wl_terminus = false;
  std::uint64_t rng_seed = 1;
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Throws InputError on empty ranges, probabilities outside [0, 1],
// distributions not summing to 1 within 1e-9, or non-positive counts.
void validate(const ScenarioConfig& cfg);

// Axes of a scenario batch; every combination becomes one cell.
struct ScenarioGrid {
  std::vector<UniformRange> kep_arrival{{10, 15}, {15, 20}, {20, 25}};
  std::vector<UniformRange> dd_arrival{{1, 5}, {5, 10}, {10, 15}};
  std::vector<double> dropout_prob{0.0, 0.1, 0.3};
};

struct ScenarioCell {
  std::string name;  // e.g. "kep10-15_dd1-5_dp0.1"
  ScenarioConfig config;
};

// Cells in kep, dd, dropout order. The base config supplies every other field.
std::vector<ScenarioCell> expand_grid(const ScenarioConfig& base, const ScenarioGrid& grid);

std::string cell_name(const ScenarioConfig& cfg);

// JSON text <-> config. Missing fields keep their defaults; unknown fields
// and malformed values raise InputError.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);

// A config file may carry an optional "grid" object next to the scenario
// fields.
struct BatchConfig {
  ScenarioConfig base;
  std::optional<ScenarioGrid> grid;
};
BatchConfig batch_from_json(const std::string& text);

}  // namespace ddchain
