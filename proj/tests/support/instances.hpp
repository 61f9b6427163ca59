#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ddchain/graph.hpp"
#include "ddchain/rng.hpp"

namespace ddchain::testing {

struct InstanceSpec {
  int nodes = 10;
  bool integer_weights = false;  // weights in {1, 2, 3} instead of 1
  double knockout = 0.0;
};

// Weights derived from (giving node, donor, receiving node) so the policy is
// a pure function of the edge.
inline WeightPolicy small_integer_weights(std::uint64_t salt) {
  return WeightPolicy::custom("small-int", [salt](const DonorProfile& d, const RecipientProfile& r) {
    const auto h = hash_key({salt, static_cast<std::uint64_t>(d.node), static_cast<std::uint64_t>(d.donor),
                             static_cast<std::uint64_t>(r.node)});
    return static_cast<double>(1 + h % 3);
  });
}

inline BloodGroup draw_group(std::mt19937_64& rng) {
  // skewed towards O recipients and donors of rarer groups
  std::discrete_distribution<int> d({0.4, 0.25, 0.25, 0.1});
  return kBloodGroups[d(rng)];
}

// Mixed DD/P/PWL/CN/WL node list with ids 1..n.
inline std::vector<Node> random_mixed_nodes(std::mt19937_64& rng, int n, bool integer_weights) {
  std::discrete_distribution<int> kind({0.15, 0.35, 0.15, 0.12, 0.23});
  std::bernoulli_distribution two_donors(0.2);
  std::uniform_int_distribution<int> self(1, integer_weights ? 3 : 1);
  std::vector<Node> nodes;
  for (NodeId id = 1; id <= n; ++id) {
    const int k = kind(rng);
    if (k == 0) {
      nodes.push_back(Node::deceased(id, draw_group(rng)));
    } else if (k == 1 || k == 2) {
      std::vector<Donor> donors{{0, draw_group(rng)}};
      if (two_donors(rng)) donors.push_back({1, draw_group(rng)});
      nodes.push_back(Node::pair(id, draw_group(rng), std::move(donors), k == 1 ? Registry::P : Registry::PWL));
    } else if (k == 3) {
      // recipient AB keeps the own donor compatible
      nodes.push_back(Node::compatible_pair(id, BloodGroup::AB, draw_group(rng), self(rng)));
    } else {
      nodes.push_back(Node::wait_list(id, draw_group(rng)));
    }
  }
  return nodes;
}

inline ExchangeGraph random_mixed_graph(std::uint64_t seed, const InstanceSpec& spec) {
  std::mt19937_64 rng(seed);
  auto nodes = random_mixed_nodes(rng, spec.nodes, spec.integer_weights);
  const WeightPolicy policy = spec.integer_weights ? small_integer_weights(seed) : WeightPolicy::unit();
  return build_graph(std::move(nodes), policy, GraphOptions{spec.knockout, seed});
}

}  // namespace ddchain::testing

namespace ddchain::testing {

struct ScaleSpec {
  int pairs = 200;
  int deceased = 10;
  bool integer_weights = false;
  double knockout = 0.0;
};

// Registry-like pool: mostly ABO-incompatible pairs, some crossmatch-failed
// pairs of any groups, a few PWL/CN/two-donor pairs, plus one WL sink of
// every blood group per DD.
inline ExchangeGraph random_registry_graph(std::uint64_t seed, const ScaleSpec& spec) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> population({0.37, 0.22, 0.32, 0.09});
  auto group = [&] { return kBloodGroups[population(rng)]; };
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Node> nodes;
  NodeId id = 1;
  for (int i = 0; i < spec.deceased; ++i) nodes.push_back(Node::deceased(id++, group()));
  for (int i = 0; i < spec.pairs; ++i) {
    BloodGroup r = group(), d = group();
    const double kind = u(rng);
    if (kind < 0.05) {
      while (!abo_compatible(d, r)) d = group();
      nodes.push_back(Node::compatible_pair(id++, r, d, spec.integer_weights ? 2.0 : 1.0));
      continue;
    }
    if (kind < 0.75) {
      while (abo_compatible(d, r)) {
        r = group();
        d = group();
      }
    }
    std::vector<Donor> donors{{0, d}};
    if (u(rng) < 0.05) donors.push_back({1, group()});
    nodes.push_back(Node::pair(id++, r, std::move(donors), u(rng) < 0.2 ? Registry::PWL : Registry::P));
  }
  for (int i = 0; i < spec.deceased; ++i)
    for (BloodGroup b : kBloodGroups) nodes.push_back(Node::wait_list(id++, b));
  const WeightPolicy policy = spec.integer_weights ? small_integer_weights(seed) : WeightPolicy::unit();
  return build_graph(std::move(nodes), policy, GraphOptions{spec.knockout, seed});
}

}  // namespace ddchain::testing
