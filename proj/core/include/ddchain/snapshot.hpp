#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ddchain/graph.hpp"
#include "ddchain/plan.hpp"
#include "ddchain/scenario.hpp"

namespace ddchain {

// Explicit weight for one (from, donor, to) arc of a "custom" snapshot.
struct WeightEntry {
  NodeId from = 0;
  int donor = 0;
  NodeId to = 0;
  double weight = 1.0;
  friend bool operator==(const WeightEntry&, const WeightEntry&) = default;
};

// On-disk registry: nodes plus the weight policy. Custom snapshots list
// weights per arc; arcs missing from the table weigh `default_weight`.
struct RegistrySnapshot {
  std::vector<Node> nodes;
  std::string weight_policy = "unit";
  std::vector<WeightEntry> weights;
  double default_weight = 1.0;
  friend bool operator==(const RegistrySnapshot&, const RegistrySnapshot&) = default;
};

// Throws InputError on malformed JSON or invalid nodes. Donor ids are the
// positions in each node's donor list.
RegistrySnapshot snapshot_from_json(const std::string& text);
std::string snapshot_to_json(const RegistrySnapshot& s);

WeightPolicy snapshot_policy(const RegistrySnapshot& s);
ExchangeGraph snapshot_graph(const RegistrySnapshot& s, const GraphOptions& options = {});

// {objective, exchanges: [{kind, copy_index, node_ids, edge_list}]}
std::string plan_to_json(const ExchangeGraph& g, const MatchPlan& plan);

struct PoolConfig {
  int pairs = 100;
  int deceased = 0;
  int wait_list_per_group = 0;
  double pwl_fraction = 0.0;
  double compatible_fraction = 0.0;
  double compatible_self_weight = 1.0;
  PairBloodGroupModel pair_bg_model;
  GroupDistribution dd_bg_distribution = kIndianPopulation;
  std::uint64_t seed = 1;
};

// Throws InputError on negative counts or invalid probabilities.
void validate(const PoolConfig& cfg);
PoolConfig pool_config_from_json(const std::string& text);

// Ids: DDs first, then pairs, then wait-list nodes, counting from 1.
std::vector<Node> generate_pool(const PoolConfig& cfg);

}  // namespace ddchain
