#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ddchain/node.hpp"

namespace ddchain {

// What a scoring hook sees of the giving side of an edge.
struct DonorProfile {
  NodeId node = 0;
  Role role = Role::DD;
  int donor = 0;
  BloodGroup blood_group = BloodGroup::O;
};

// What a scoring hook sees of the receiving side of an edge.
struct RecipientProfile {
  NodeId node = 0;
  Role role = Role::WL;
  BloodGroup blood_group = BloodGroup::O;
  std::optional<int> arrival_round;
};

using ScoringHook = std::function<double(const DonorProfile&, const RecipientProfile&)>;

// Assigns w_(i,j) to every generated edge. Self-edges of compatible pairs
// always carry the pair's own self_weight and bypass the policy.
class WeightPolicy {
 public:
  static WeightPolicy unit();
  static WeightPolicy custom(std::string name, ScoringHook hook);

  double operator()(const DonorProfile& donor, const RecipientProfile& recipient) const;

  bool is_unit() const { return !hook_; }
  const std::string& name() const { return name_; }

 private:
  WeightPolicy(std::string name, ScoringHook hook);

  std::string name_;
  ScoringHook hook_;
};

WeightPolicy weight_policy_unit();

struct GraphOptions {
  // Per-edge probability that a tissue-type (crossmatch) incompatibility
  // removes an ABO-compatible arc. Self-edges are never knocked out.
  double knockout_prob = 0.0;
  std::uint64_t knockout_seed = 0;
};

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;

// Endpoints are positions in ExchangeGraph::nodes(), which is sorted by id.
struct Edge {
  NodeIndex from = 0;
  NodeIndex to = 0;
  int donor = 0;
  double weight = 1.0;

  bool is_self_loop() const { return from == to; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed compatibility graph. Immutable once built.
class ExchangeGraph {
 public:
  ExchangeGraph() = default;

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const Node& node(NodeIndex i) const { return nodes_[i]; }
  const Edge& edge(EdgeIndex e) const { return edges_[e]; }
  Role role(NodeIndex i) const { return roles_[i]; }

  std::span<const EdgeIndex> out_edges(NodeIndex i) const { return out_[i]; }
  std::span<const EdgeIndex> in_edges(NodeIndex i) const { return in_[i]; }

  std::optional<NodeIndex> index_of(NodeId id) const;

  // w_(i,i) of a compatible pair, absent for every other role.
  std::optional<double> self_weight(NodeIndex i) const;

  std::size_t count(Role r) const;

  // Number of P, PWL and CN nodes.
  std::size_t pair_count() const;

  bool all_weights_integral() const;

 private:
  friend ExchangeGraph build_graph(std::vector<Node>, const WeightPolicy&, const GraphOptions&);

  std::vector<Node> nodes_;
  std::vector<Role> roles_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeIndex>> out_;
  std::vector<std::vector<EdgeIndex>> in_;
  std::unordered_map<NodeId, NodeIndex> by_id_;
};

// Generates every ABO-compatible arc allowed by the node kinds: nothing into
// a DD, nothing out of a WL, self-edges only on compatible pairs. Nodes are
// sorted by id; edges are ordered by (from, to, donor). Throws InputError on
// duplicate ids or invalid nodes.
ExchangeGraph build_graph(std::vector<Node> nodes, const WeightPolicy& policy = WeightPolicy::unit(),
                          const GraphOptions& options = {});

}  // namespace ddchain
