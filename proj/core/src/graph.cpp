#include "ddchain/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddchain/errors.hpp"
#include "ddchain/rng.hpp"

namespace ddchain {

WeightPolicy::WeightPolicy(std::string name, ScoringHook hook)
    : name_(std::move(name)), hook_(std::move(hook)) {}

WeightPolicy WeightPolicy::unit() { return WeightPolicy("unit", nullptr); }

WeightPolicy WeightPolicy::custom(std::string name, ScoringHook hook) {
  if (!hook) throw InputError("custom weight policy needs a scoring hook");
  return WeightPolicy(std::move(name), std::move(hook));
}

double WeightPolicy::operator()(const DonorProfile& donor, const RecipientProfile& recipient) const {
  if (!hook_) return 1.0;
  const double w = hook_(donor, recipient);
  if (!std::isfinite(w) || w < 0.0)
    throw InputError("weight policy '" + name_ + "' produced an invalid weight");
  return w;
}

WeightPolicy weight_policy_unit() { return WeightPolicy::unit(); }

std::optional<NodeIndex> ExchangeGraph::index_of(NodeId id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ExchangeGraph::self_weight(NodeIndex i) const {
  if (const auto* c = std::get_if<CompatiblePair>(&nodes_[i].kind)) return c->self_weight;
  return std::nullopt;
}

std::size_t ExchangeGraph::count(Role r) const {
  return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), r));
}

std::size_t ExchangeGraph::pair_count() const {
  return count(Role::P) + count(Role::PWL) + count(Role::CN);
}

bool ExchangeGraph::all_weights_integral() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.weight == std::floor(e.weight); });
}

ExchangeGraph build_graph(std::vector<Node> nodes, const WeightPolicy& policy,
                          const GraphOptions& options) {
  if (options.knockout_prob < 0.0 || options.knockout_prob > 1.0)
    throw InputError("knockout probability outside [0, 1]");
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0 && nodes[i].id == nodes[i - 1].id)
      throw InputError("duplicate node id " + std::to_string(nodes[i].id));
    validate_node(nodes[i]);
  }

  ExchangeGraph g;
  g.nodes_ = std::move(nodes);
  const std::size_t n = g.nodes_.size();
  g.roles_.reserve(n);
  g.by_id_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.roles_.push_back(g.nodes_[i].role());
    g.by_id_.emplace(g.nodes_[i].id, static_cast<NodeIndex>(i));
  }

  std::vector<std::vector<Donor>> donors(n);
  std::vector<std::optional<BloodGroup>> recipients(n);
  for (std::size_t i = 0; i < n; ++i) {
    donors[i] = g.nodes_[i].donors();
    std::sort(donors[i].begin(), donors[i].end(),
              [](const Donor& a, const Donor& b) { return a.id < b.id; });
    recipients[i] = g.nodes_[i].recipient();
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Role from_role = g.roles_[i];
    if (from_role == Role::WL) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const Role to_role = g.roles_[j];
      if (to_role == Role::DD) continue;
      if (i == j) {
        if (from_role != Role::CN) continue;
        const auto& c = std::get<CompatiblePair>(g.nodes_[i].kind);
        for (const Donor& d : donors[i]) {
          if (abo_compatible(d.blood_group, c.recipient)) {
            g.edges_.push_back(Edge{static_cast<NodeIndex>(i), static_cast<NodeIndex>(i), d.id,
                                    c.self_weight});
            break;
          }
        }
        continue;
      }
      const RecipientProfile recipient{g.nodes_[j].id, to_role, *recipients[j],
                                       g.nodes_[j].arrival_round()};
      for (const Donor& d : donors[i]) {
        if (!abo_compatible(d.blood_group, recipient.blood_group)) continue;
        if (options.knockout_prob > 0.0) {
          const double u = hash_uniform({options.knockout_seed,
                                         static_cast<std::uint64_t>(g.nodes_[i].id),
                                         static_cast<std::uint64_t>(d.id),
                                         static_cast<std::uint64_t>(g.nodes_[j].id)});
          if (u < options.knockout_prob) continue;
        }
        const DonorProfile donor{g.nodes_[i].id, from_role, d.id, d.blood_group};
        g.edges_.push_back(Edge{static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), d.id,
                                policy(donor, recipient)});
      }
    }
  }

  g.out_.assign(n, {});
  g.in_.assign(n, {});
  for (std::size_t e = 0; e < g.edges_.size(); ++e) {
    g.out_[g.edges_[e].from].push_back(static_cast<EdgeIndex>(e));
    g.in_[g.edges_[e].to].push_back(static_cast<EdgeIndex>(e));
  }
  return g;
}

}  // namespace ddchain
