#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "ddchain/enumeration.hpp"
#include "ddchain/errors.hpp"
#include "ddchain/solvers.hpp"
#include "support/instances.hpp"
#include "support/small_graphs.hpp"

namespace ddchain {
namespace {

using BG = BloodGroup;
using testing::pure_three_cycle;

std::set<std::vector<EdgeIndex>> edge_sets(const std::vector<Exchange>& xs, ExchangeKind kind) {
  std::set<std::vector<EdgeIndex>> out;
  for (const Exchange& x : xs)
    if (x.kind == kind) out.insert(x.edges);
  return out;
}

TEST(EnumerateCycles, MutualPair) {
  auto g = build_graph({Node::pair(1, BG::B, BG::A), Node::pair(2, BG::A, BG::B)});
  auto cycles = enumerate_cycles(g, 2);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0].length(), 2u);
  EXPECT_EQ(cycles[0].kind, ExchangeKind::Cycle);
  EXPECT_EQ(cycles[0].nodes.front(), 0u);
}

TEST(EnumerateCycles, ThreeCycleInstance) {
  // Pair 2's O donor also suits pair 1, so ABO alone adds a 2-cycle.
  auto g = build_graph({Node::pair(1, BG::A, BG::B), Node::pair(2, BG::B, BG::O), Node::pair(3, BG::O, BG::A)});
  auto cycles = enumerate_cycles(g, 3);
  ASSERT_EQ(cycles.size(), 2u);
  EXPECT_EQ(cycles[0].length() + cycles[1].length(), 5u);
  EXPECT_EQ(enumerate_cycles(g, 2).size(), 1u);
}

TEST(EnumerateCycles, PureThreeCycle) {
  auto g = pure_three_cycle();
  ASSERT_EQ(enumerate_cycles(g, 3).size(), 1u);
  EXPECT_EQ(enumerate_cycles(g, 3)[0].length(), 3u);
  EXPECT_TRUE(enumerate_cycles(g, 2).empty());
}

TEST(EnumerateCycles, NoMutualPairs) {
  auto g = build_graph({Node::pair(1, BG::O, BG::A), Node::pair(2, BG::O, BG::A), Node::deceased(3, BG::O),
                        Node::wait_list(4, BG::A)});
  EXPECT_TRUE(enumerate_cycles(g, 2).empty());
}

TEST(EnumerateCycles, RejectsSmallK) {
  auto g = build_graph({});
  EXPECT_THROW(enumerate_cycles(g, 1), InputError);
}

TEST(EnumerateChains, ThroughPairToWaitList) {
  auto g = build_graph({Node::deceased(1, BG::O), Node::pair(2, BG::O, BG::A), Node::wait_list(3, BG::A),
                        Node::wait_list(4, BG::O)});
  auto chains = enumerate_chains(g, 2);
  // DD->pair->WL(A), DD->WL(A), DD->WL(O)
  ASSERT_EQ(chains.size(), 3u);
  std::size_t long_chains = 0;
  for (const Exchange& c : chains) {
    EXPECT_EQ(g.role(c.nodes.front()), Role::DD);
    EXPECT_EQ(g.role(c.nodes.back()), Role::WL);
    if (c.length() == 2) {
      ++long_chains;
      EXPECT_EQ(g.node(c.nodes[1]).id, 2);
      EXPECT_EQ(g.node(c.nodes[2]).id, 3);
    }
  }
  EXPECT_EQ(long_chains, 1u);
}

TEST(EnumerateChains, PairCannotTerminate) {
  auto g = build_graph({Node::deceased(1, BG::O), Node::pair(2, BG::O, BG::A)});
  EXPECT_TRUE(enumerate_chains(g, 2).empty());
}

TEST(EnumerateChains, PwlTerminates) {
  auto g = build_graph({Node::deceased(1, BG::O), Node::pair(2, BG::O, BG::A, Registry::PWL)});
  auto chains = enumerate_chains(g, 2);
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_EQ(chains[0].length(), 1u);
  EXPECT_TRUE(enumerate_chains(g, 2, ChainOptions{true}).empty());
}

TEST(EnumerateChains, RejectsZeroK) {
  auto g = build_graph({});
  EXPECT_THROW(enumerate_chains(g, 0), InputError);
}

TEST(CompatiblePairFilter, Threshold) {
  auto scored = [](double w) {
    return WeightPolicy::custom("w", [w](const DonorProfile&, const RecipientProfile&) { return w; });
  };
  auto build = [&](double self, double in) {
    return build_graph({Node::pair(1, BG::AB, BG::O), Node::compatible_pair(2, BG::AB, BG::AB, self)}, scored(in));
  };
  auto keep = build(1.0, 1.0);
  EXPECT_EQ(filter_compatible_pair_exchanges(enumerate_cycles(keep, 2), keep).size(), 1u);
  auto drop = build(2.0, 1.0);
  ASSERT_EQ(enumerate_cycles(drop, 2).size(), 1u);
  EXPECT_TRUE(filter_compatible_pair_exchanges(enumerate_cycles(drop, 2), drop).empty());
  auto plain = build_graph({Node::pair(1, BG::B, BG::A), Node::pair(2, BG::A, BG::B)}, scored(0.5));
  EXPECT_EQ(filter_compatible_pair_exchanges(enumerate_cycles(plain, 2), plain).size(), 1u);
}

TEST(Enumeration, MultiDonorGivesDistinctCycles) {
  auto g = build_graph({Node::pair(1, BG::O, {Donor{0, BG::O}, Donor{1, BG::O}}), Node::pair(2, BG::O, BG::O)});
  auto cycles = enumerate_cycles(g, 2);
  EXPECT_EQ(cycles.size(), 2u);
  for (const Exchange& c : cycles) {
    std::set<NodeIndex> givers;
    for (EdgeIndex e : c.edges) EXPECT_TRUE(givers.insert(g.edge(e).from).second);
  }
}

class EnumerationVsBruteForce : public ::testing::TestWithParam<int> {};

TEST_P(EnumerationVsBruteForce, SameExchangeSets) {
  const int k = GetParam();
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto g = testing::random_mixed_graph(seed, {12, false, 0.2});
    for (bool wl_only : {false, true}) {
      const SolveOptions opts{k, false, wl_only};
      auto brute = bruteforce_exchanges(g, opts);
      auto chains = enumerate_chains(g, k, ChainOptions{wl_only});
      std::vector<Exchange> cycles = k >= 2 ? enumerate_cycles(g, k) : std::vector<Exchange>{};
      EXPECT_EQ(edge_sets(chains, ExchangeKind::Chain), edge_sets(brute, ExchangeKind::Chain)) << seed;
      EXPECT_EQ(edge_sets(cycles, ExchangeKind::Cycle), edge_sets(brute, ExchangeKind::Cycle)) << seed;
      EXPECT_EQ(edge_sets(chains, ExchangeKind::Chain).size(), chains.size());
      EXPECT_EQ(edge_sets(cycles, ExchangeKind::Cycle).size(), cycles.size());
      const StructureRules rules{k, wl_only, false};
      for (const Exchange& x : chains) EXPECT_FALSE(check_exchange(g, x, rules)) << seed;
      for (const Exchange& x : cycles) EXPECT_FALSE(check_exchange(g, x, rules)) << seed;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Lengths, EnumerationVsBruteForce, ::testing::Values(1, 2, 3, 4));

TEST(Enumeration, IsolatedNodeChangesNothing) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    std::mt19937_64 rng(seed);
    auto nodes = testing::random_mixed_nodes(rng, 6, false);
    auto base = build_graph(nodes);
    nodes.push_back(Node::pair(1000, BG::O, BG::AB));
    auto grown = build_graph(nodes);
    const NodeIndex added = *grown.index_of(1000);
    if (!grown.out_edges(added).empty() || !grown.in_edges(added).empty()) continue;
    EXPECT_EQ(enumerate_cycles(base, 3).size(), enumerate_cycles(grown, 3).size());
    EXPECT_EQ(enumerate_chains(base, 3).size(), enumerate_chains(grown, 3).size());
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

}  // namespace
}  // namespace ddchain
