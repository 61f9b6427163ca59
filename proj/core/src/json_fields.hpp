#pragma once

// JSON field readers shared by the config and snapshot parsers.

#include <cmath>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "ddchain/errors.hpp"
#include "ddchain/scenario.hpp"

namespace ddchain::json_fields {

using nlohmann::json;


inline void check_distribution(const GroupDistribution& d, const char* what) {
  double sum = 0.0;
  for (double p : d) {
    if (!(p >= 0.0) || p > 1.0) throw InputError(fmt::format("{}: probability outside [0, 1]", what));
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InputError(fmt::format("{}: probabilities sum to {}, not 1", what, sum));
}

inline void check_range(const UniformRange& r, const char* what) {
  if (r.lo < 0 || r.hi < r.lo) throw InputError(fmt::format("{}: empty or negative range [{}, {}]", what, r.lo, r.hi));
}

inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0) || p > 1.0) throw InputError(fmt::format("{} must lie in [0, 1]", what));
}

inline std::string range_token(const UniformRange& r) { return fmt::format("{}-{}", r.lo, r.hi); }

inline json range_json(const UniformRange& r) { return json::array({r.lo, r.hi}); }

inline UniformRange parse_range(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw InputError(fmt::format("{} must be [lo, hi] integers", what));
  return {j[0].get<int>(), j[1].get<int>()};
}

inline json distribution_json(const GroupDistribution& d) {
  json j = json::object();
  for (BloodGroup b : kBloodGroups) j[std::string(to_string(b))] = d[index_of(b)];
  return j;
}

inline GroupDistribution parse_distribution(const json& j, const char* what) {
  if (!j.is_object()) throw InputError(fmt::format("{} must map blood groups to probabilities", what));
  GroupDistribution d{};
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw InputError(fmt::format("{}: {} is not a number", what, key));
    d[index_of(parse_blood_group(key))] = value.get<double>();
  }
  return d;
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(fmt::format("{} must be a number", what));
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(fmt::format("{} must be an integer", what));
  return j.get<int>();
}

inline json pair_model_json(const PairBloodGroupModel& m) {
  if (m.kind == PairModelKind::Rejection) return {{"kind", "rejection"}, {"population", distribution_json(m.population)}};
  json table = json::object();
  for (BloodGroup r : kBloodGroups) table[std::string(to_string(r))] = distribution_json(m.table[index_of(r)]);
  return {{"kind", "table"}, {"table", table}};
}

inline PairBloodGroupModel parse_pair_model(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw InputError("pair_bg_model needs a \"kind\"");
  PairBloodGroupModel m;
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "rejection") {
    m.kind = PairModelKind::Rejection;
    if (j.contains("population")) m.population = parse_distribution(j["population"], "pair_bg_model.population");
  } else if (kind == "table") {
    m.kind = PairModelKind::Table;
    if (!j.contains("table") || !j["table"].is_object()) throw InputError("pair_bg_model.table missing");
    for (const auto& [recipient, row] : j["table"].items())
      m.table[index_of(parse_blood_group(recipient))] = parse_distribution(row, "pair_bg_model.table row");
  } else {
    throw InputError("pair_bg_model.kind must be \"rejection\" or \"table\"");
  }
  return m;
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("malformed JSON: {}", e.what()));
  }
}

}  // namespace ddchain::json_fields
