#include "ddchain/scenario.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "ddchain/errors.hpp"
#include "json_fields.hpp"

namespace ddchain {

using nlohmann::json;
using namespace json_fields;

namespace {

ScenarioConfig parse_scenario(const json& j, const std::set<std::string>& extra_keys) {
  if (!j.is_object()) throw InputError("scenario config must be a JSON object");
  ScenarioConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "kep_arrival") c.kep_arrival = parse_range(v, "kep_arrival");
    else if (key == "dd_arrival") c.dd_arrival = parse_range(v, "dd_arrival");
    else if (key == "dropout_prob") c.dropout_prob = number(v, "dropout_prob");
    else if (key == "rounds") c.rounds = integer(v, "rounds");
    else if (key == "replications") c.replications = integer(v, "replications");
    else if (key == "k") c.k = integer(v, "k");
    else if (key == "pwl_fraction") c.pwl_fraction = number(v, "pwl_fraction");
    else if (key == "pair_bg_model") c.pair_bg_model = parse_pair_model(v);
    else if (key == "dd_bg_distribution") c.dd_bg_distribution = parse_distribution(v, "dd_bg_distribution");
    else if (key == "tissue_knockout_prob") c.tissue_knockout_prob = number(v, "tissue_knockout_prob");
    else if (key == "require_wl_terminus") {
      if (!v.is_boolean()) throw InputError("require_wl_terminus must be true or false");
      c.require_wl_terminus = v.get<bool>();
    } else if (key == "rng_seed") {
      if (!v.is_number_unsigned()) throw InputError("rng_seed must be a non-negative integer");
      c.rng_seed = v.get<std::uint64_t>();
    } else if (!extra_keys.count(key)) {
      throw InputError(fmt::format("unknown config field \"{}\"", key));
    }
  }
  return c;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  check_range(c.kep_arrival, "kep_arrival");
  check_range(c.dd_arrival, "dd_arrival");
  check_probability(c.dropout_prob, "dropout_prob");
  check_probability(c.pwl_fraction, "pwl_fraction");
  check_probability(c.tissue_knockout_prob, "tissue_knockout_prob");
  if (c.rounds < 1) throw InputError("rounds must be positive");
  if (c.replications < 1) throw InputError("replications must be positive");
  if (c.k < 2) throw InputError("k must be at least 2 (cycles need two pairs)");
  check_distribution(c.dd_bg_distribution, "dd_bg_distribution");
  if (c.pair_bg_model.kind == PairModelKind::Rejection) {
    check_distribution(c.pair_bg_model.population, "pair_bg_model.population");
    // rejection needs at least one incompatible combination with positive mass
    bool possible = false;
    for (BloodGroup r : kBloodGroups)
      for (BloodGroup d : kBloodGroups)
        possible = possible || (!abo_compatible(d, r) && c.pair_bg_model.population[index_of(r)] > 0.0 &&
                                c.pair_bg_model.population[index_of(d)] > 0.0);
    if (!possible) throw InputError("pair_bg_model.population admits no ABO-incompatible pair");
  } else {
    double sum = 0.0;
    for (const auto& row : c.pair_bg_model.table)
      for (double p : row) {
        if (!(p >= 0.0)) throw InputError("pair_bg_model.table: negative probability");
        sum += p;
      }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("pair_bg_model.table must sum to 1");
  }
}

std::string cell_name(const ScenarioConfig& c) {
  return fmt::format("kep{}_dd{}_dp{}", range_token(c.kep_arrival), range_token(c.dd_arrival), c.dropout_prob);
}

std::vector<ScenarioCell> expand_grid(const ScenarioConfig& base, const ScenarioGrid& grid) {
  std::vector<ScenarioCell> cells;
  for (const UniformRange& kep : grid.kep_arrival)
    for (const UniformRange& dd : grid.dd_arrival)
      for (double dp : grid.dropout_prob) {
        ScenarioConfig c = base;
        c.kep_arrival = kep;
        c.dd_arrival = dd;
        c.dropout_prob = dp;
        cells.push_back({cell_name(c), c});
      }
  return cells;
}

ScenarioConfig scenario_from_json(const std::string& text) {
  ScenarioConfig c = parse_scenario(parse_text(text), {});
  validate(c);
  return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["kep_arrival"] = range_json(c.kep_arrival);
  j["dd_arrival"] = range_json(c.dd_arrival);
  j["dropout_prob"] = c.dropout_prob;
  j["rounds"] = c.rounds;
  j["replications"] = c.replications;
  j["k"] = c.k;
  j["pwl_fraction"] = c.pwl_fraction;
  j["pair_bg_model"] = pair_model_json(c.pair_bg_model);
  j["dd_bg_distribution"] = distribution_json(c.dd_bg_distribution);
  j["tissue_knockout_prob"] = c.tissue_knockout_prob;
  j["require_wl_terminus"] = c.require_wl_terminus;
  j["rng_seed"] = c.rng_seed;
  return j.dump(2);
}

BatchConfig batch_from_json(const std::string& text) {
  const json j = parse_text(text);
  BatchConfig b;
  b.base = parse_scenario(j, {"grid"});
  validate(b.base);
  if (j.contains("grid")) {
    const json& g = j["grid"];
    if (!g.is_object()) throw InputError("grid must be an object");
    ScenarioGrid grid;
    for (const auto& [key, v] : g.items()) {
      if (!v.is_array() || v.empty()) throw InputError(fmt::format("grid.{} must be a non-empty array", key));
      if (key == "kep_arrival" || key == "dd_arrival") {
        std::vector<UniformRange> ranges;
        for (const json& r : v) ranges.push_back(parse_range(r, "grid range"));
        (key == "kep_arrival" ? grid.kep_arrival : grid.dd_arrival) = std::move(ranges);
      } else if (key == "dropout_prob") {
        grid.dropout_prob.clear();
        for (const json& p : v) grid.dropout_prob.push_back(number(p, "grid.dropout_prob"));
      } else {
        throw InputError(fmt::format("unknown grid field \"{}\"", key));
      }
    }
    for (const ScenarioCell& cell : expand_grid(b.base, grid)) validate(cell.config);
    b.grid = std::move(grid);
  }
  return b;
}

}  // namespace ddchain
