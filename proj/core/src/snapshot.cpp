#include "ddchain/snapshot.hpp"

#include <map>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "ddchain/errors.hpp"
#include "ddchain/rng.hpp"
#include "ddchain/simulation.hpp"
#include "json_fields.hpp"

namespace ddchain {

using nlohmann::json;
using namespace json_fields;

namespace {

std::string registry_label(const Node& n) {
  switch (n.role()) {
    case Role::DD: return "deceased";
    case Role::PWL: return "kep+wl";
    case Role::WL: return "wl";
    default: return "kep";
  }
}

bool positional(const std::vector<Donor>& donors) {
  for (std::size_t i = 0; i < donors.size(); ++i)
    if (donors[i].id != static_cast<int>(i)) return false;
  return true;
}

using ojson = nlohmann::ordered_json;

ojson donors_json(const std::vector<Donor>& donors) {
  ojson out = ojson::array();
  const bool plain = positional(donors);
  for (const Donor& d : donors) {
    if (plain) out.push_back(std::string(to_string(d.blood_group)));
    else out.push_back({{"id", d.id}, {"blood_group", std::string(to_string(d.blood_group))}});
  }
  return out;
}

BloodGroup group_field(const json& j, const char* what) {
  if (!j.is_string()) throw InputError(fmt::format("{} must be a blood group string", what));
  return parse_blood_group(j.get<std::string>());
}

std::vector<Donor> parse_donors(const json& j, NodeId id) {
  if (!j.is_array()) throw InputError(fmt::format("node {}: blood_groups.donors must be an array", id));
  std::vector<Donor> donors;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& d = j[i];
    if (d.is_object()) {
      if (!d.contains("id") || !d.contains("blood_group"))
        throw InputError(fmt::format("node {}: donor objects need id and blood_group", id));
      donors.push_back({integer(d["id"], "donor id"), group_field(d["blood_group"], "donor blood_group")});
    } else {
      donors.push_back({static_cast<int>(i), group_field(d, "donor blood group")});
    }
  }
  return donors;
}

ojson node_json(const Node& n) {
  ojson j;
  j["id"] = n.id;
  j["kind"] = std::string(to_string(n.role()));
  ojson bg;
  if (auto r = n.recipient()) bg["recipient"] = std::string(to_string(*r));
  bg["donors"] = n.role() == Role::WL ? ojson::array() : donors_json(n.donors());
  j["blood_groups"] = bg;
  j["registry"] = registry_label(n);
  if (auto a = n.arrival_round()) j["arrival_round"] = *a;
  if (const auto* cp = std::get_if<CompatiblePair>(&n.kind)) j["self_weight"] = cp->self_weight;
  return j;
}

Node parse_node(const json& j) {
  if (!j.is_object()) throw InputError("each node must be a JSON object");
  for (const char* key : {"id", "kind", "blood_groups"})
    if (!j.contains(key)) throw InputError(fmt::format("node is missing \"{}\"", key));
  for (const auto& [key, v] : j.items())
    if (key != "id" && key != "kind" && key != "blood_groups" && key != "registry" && key != "arrival_round" &&
        key != "self_weight")
      throw InputError(fmt::format("unknown node field \"{}\"", key));
  if (!j["id"].is_number_integer()) throw InputError("node id must be an integer");
  const NodeId id = j["id"].get<NodeId>();
  if (!j["kind"].is_string()) throw InputError(fmt::format("node {}: kind must be a string", id));
  const Role role = parse_role(j["kind"].get<std::string>());
  const json& bg = j["blood_groups"];
  if (!bg.is_object()) throw InputError(fmt::format("node {}: blood_groups must be an object", id));
  const int arrival = j.contains("arrival_round") ? integer(j["arrival_round"], "arrival_round") : 0;
  auto recipient = [&] {
    if (!bg.contains("recipient")) throw InputError(fmt::format("node {}: recipient blood group missing", id));
    return group_field(bg["recipient"], "recipient blood group");
  };
  auto donors = [&] {
    return parse_donors(bg.contains("donors") ? bg["donors"] : json::array(), id);
  };

  Node n;
  n.id = id;
  switch (role) {
    case Role::DD: {
      const auto d = donors();
      if (d.size() != 1) throw InputError(fmt::format("node {}: a deceased donor has exactly one blood group", id));
      n = Node::deceased(id, d.front().blood_group);
      break;
    }
    case Role::P:
    case Role::PWL:
      n = Node::pair(id, recipient(), donors(), role == Role::PWL ? Registry::PWL : Registry::P, arrival);
      break;
    case Role::CN: {
      CompatiblePair cp;
      cp.recipient = recipient();
      cp.donors = donors();
      cp.self_weight = j.contains("self_weight") ? number(j["self_weight"], "self_weight") : 1.0;
      cp.arrival_round = arrival;
      n.kind = std::move(cp);
      break;
    }
    case Role::WL:
      if (bg.contains("donors") && !bg["donors"].empty())
        throw InputError(fmt::format("node {}: wait-list patients have no donors", id));
      n = Node::wait_list(id, recipient());
      break;
  }
  if (j.contains("registry")) {
    if (!j["registry"].is_string() || j["registry"].get<std::string>() != registry_label(n))
      throw InputError(fmt::format("node {}: registry does not match kind {}", id, to_string(role)));
  }
  if (j.contains("self_weight") && role != Role::CN)
    throw InputError(fmt::format("node {}: self_weight is only valid for CN nodes", id));
  validate_node(n);
  return n;
}

}  // namespace

RegistrySnapshot snapshot_from_json(const std::string& text) {
  const json j = parse_text(text);
  if (!j.is_object()) throw InputError("snapshot must be a JSON object");
  for (const auto& [key, v] : j.items())
    if (key != "nodes" && key != "weight_policy" && key != "weights" && key != "default_weight")
      throw InputError(fmt::format("unknown snapshot field \"{}\"", key));
  RegistrySnapshot s;
  if (j.contains("nodes")) {
    if (!j["nodes"].is_array()) throw InputError("nodes must be an array");
    for (const json& n : j["nodes"]) s.nodes.push_back(parse_node(n));
  }
  if (j.contains("weight_policy")) {
    if (!j["weight_policy"].is_string()) throw InputError("weight_policy must be a string");
    s.weight_policy = j["weight_policy"].get<std::string>();
  }
  if (s.weight_policy != "unit" && s.weight_policy != "custom")
    throw InputError(fmt::format("weight_policy must be \"unit\" or \"custom\", got \"{}\"", s.weight_policy));
  if (j.contains("default_weight")) s.default_weight = number(j["default_weight"], "default_weight");
  if (j.contains("weights")) {
    if (!j["weights"].is_array()) throw InputError("weights must be an array");
    for (const json& w : j["weights"]) {
      if (!w.is_object() || !w.contains("from") || !w.contains("to") || !w.contains("weight"))
        throw InputError("weight entries need from, to and weight");
      WeightEntry e;
      if (!w["from"].is_number_integer() || !w["to"].is_number_integer())
        throw InputError("weight entry endpoints must be node ids");
      e.from = w["from"].get<NodeId>();
      e.to = w["to"].get<NodeId>();
      e.donor = w.contains("donor") ? integer(w["donor"], "weight donor") : 0;
      e.weight = number(w["weight"], "weight");
      s.weights.push_back(e);
    }
  }
  if (s.weight_policy == "unit" && (!s.weights.empty() || s.default_weight != 1.0))
    throw InputError("weights are only allowed with weight_policy \"custom\"");
  if (!(s.default_weight >= 0.0)) throw InputError("default_weight must be non-negative");
  for (const WeightEntry& e : s.weights)
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw InputError("weights must be finite and non-negative");
  return s;
}

std::string snapshot_to_json(const RegistrySnapshot& s) {
  ojson j;
  j["nodes"] = ojson::array();
  for (const Node& n : s.nodes) j["nodes"].push_back(node_json(n));
  j["weight_policy"] = s.weight_policy;
  if (s.weight_policy == "custom") {
    j["default_weight"] = s.default_weight;
    j["weights"] = ojson::array();
    for (const WeightEntry& e : s.weights)
      j["weights"].push_back({{"from", e.from}, {"donor", e.donor}, {"to", e.to}, {"weight", e.weight}});
  }
  return j.dump(2) + "\n";
}

WeightPolicy snapshot_policy(const RegistrySnapshot& s) {
  if (s.weight_policy == "unit") return WeightPolicy::unit();
  std::map<std::tuple<NodeId, int, NodeId>, double> table;
  for (const WeightEntry& e : s.weights) table[{e.from, e.donor, e.to}] = e.weight;
  const double fallback = s.default_weight;
  return WeightPolicy::custom("custom", [table = std::move(table), fallback](const DonorProfile& d,
                                                                              const RecipientProfile& r) {
    auto it = table.find({d.node, d.donor, r.node});
    return it == table.end() ? fallback : it->second;
  });
}

ExchangeGraph snapshot_graph(const RegistrySnapshot& s, const GraphOptions& options) {
  return build_graph(s.nodes, snapshot_policy(s), options);
}

std::string plan_to_json(const ExchangeGraph& g, const MatchPlan& plan) {
  ojson j;
  j["objective"] = plan.objective;
  j["transplants"] = plan.num_transplants();
  j["exchanges"] = ojson::array();
  for (const Exchange& x : plan.exchanges) {
    ojson xj;
    xj["kind"] = std::string(to_string(x.kind));
    if (x.copy_index) xj["copy_index"] = *x.copy_index;
    xj["node_ids"] = ojson::array();
    for (NodeIndex i : x.nodes) xj["node_ids"].push_back(g.node(i).id);
    xj["edge_list"] = ojson::array();
    for (EdgeIndex e : x.edges) {
      const Edge& edge = g.edge(e);
      xj["edge_list"].push_back(
          {{"from", g.node(edge.from).id}, {"donor", edge.donor}, {"to", g.node(edge.to).id}, {"weight", edge.weight}});
    }
    xj["weight"] = x.total_weight;
    j["exchanges"].push_back(std::move(xj));
  }
  return j.dump(2) + "\n";
}

void validate(const PoolConfig& cfg) {
  if (cfg.pairs < 0 || cfg.deceased < 0 || cfg.wait_list_per_group < 0)
    throw InputError("pool counts must be non-negative");
  check_probability(cfg.pwl_fraction, "pwl_fraction");
  check_probability(cfg.compatible_fraction, "compatible_fraction");
  if (!(cfg.compatible_self_weight >= 0.0) || !std::isfinite(cfg.compatible_self_weight))
    throw InputError("compatible_self_weight must be finite and non-negative");
  check_distribution(cfg.dd_bg_distribution, "dd_bg_distribution");
  ScenarioConfig probe;
  probe.pair_bg_model = cfg.pair_bg_model;
  probe.dd_bg_distribution = cfg.dd_bg_distribution;
  validate(probe);
}

PoolConfig pool_config_from_json(const std::string& text) {
  const json j = parse_text(text);
  if (!j.is_object()) throw InputError("pool config must be a JSON object");
  PoolConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "pairs") c.pairs = integer(v, "pairs");
    else if (key == "deceased") c.deceased = integer(v, "deceased");
    else if (key == "wait_list_per_group") c.wait_list_per_group = integer(v, "wait_list_per_group");
    else if (key == "pwl_fraction") c.pwl_fraction = number(v, "pwl_fraction");
    else if (key == "compatible_fraction") c.compatible_fraction = number(v, "compatible_fraction");
    else if (key == "compatible_self_weight") c.compatible_self_weight = number(v, "compatible_self_weight");
    else if (key == "pair_bg_model") c.pair_bg_model = parse_pair_model(v);
    else if (key == "dd_bg_distribution") c.dd_bg_distribution = parse_distribution(v, "dd_bg_distribution");
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw InputError("seed must be a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else {
      throw InputError(fmt::format("unknown pool config field \"{}\"", key));
    }
  }
  validate(c);
  return c;
}

std::vector<Node> generate_pool(const PoolConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(hash_key({cfg.seed, 3}));
  std::bernoulli_distribution compatible(cfg.compatible_fraction);
  std::bernoulli_distribution pwl(cfg.pwl_fraction);
  std::vector<Node> nodes;
  NodeId id = 1;
  for (int i = 0; i < cfg.deceased; ++i) nodes.push_back(Node::deceased(id++, draw_group(cfg.dd_bg_distribution, rng)));
  for (int i = 0; i < cfg.pairs; ++i) {
    if (compatible(rng)) {
      // compatible pairs draw both groups from the population marginal
      BloodGroup recipient, donor;
      do {
        recipient = draw_group(cfg.pair_bg_model.population, rng);
        donor = draw_group(cfg.pair_bg_model.population, rng);
      } while (!abo_compatible(donor, recipient));
      nodes.push_back(Node::compatible_pair(id++, recipient, donor, cfg.compatible_self_weight));
      continue;
    }
    const auto [recipient, donor] = draw_pair_groups(cfg.pair_bg_model, rng);
    nodes.push_back(Node::pair(id++, recipient, donor, pwl(rng) ? Registry::PWL : Registry::P));
  }
  for (BloodGroup g : kBloodGroups)
    for (int i = 0; i < cfg.wait_list_per_group; ++i) nodes.push_back(Node::wait_list(id++, g));
  return nodes;
}

}  // namespace ddchain
