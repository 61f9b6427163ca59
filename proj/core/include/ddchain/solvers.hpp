#pragma once

#include <cstddef>
#include <vector>

#include "ddchain/formulation.hpp"
#include "ddchain/plan.hpp"

namespace ddchain {

struct SolverStats {
  std::size_t branch_nodes = 0;
  std::size_t lp_solves = 0;
  std::size_t columns = 0;
};

// Exact solve of the compact formulation by branch-and-price: columns are
// per-copy structures priced from the formulation rows, branching fixes the
// aggregated value of the most fractional edge (1-branch first).
MatchPlan solve_bb(const CompactFormulation& f, SolverStats* stats = nullptr);

// Exact solve by enumerating exchanges and branch-and-bound over their
// node-disjoint packings. Interchangeable wait-list sinks are pooled into
// one capacity row.
MatchPlan solve_packing(const ExchangeGraph& g, const SolveOptions& options, SolverStats* stats = nullptr);

inline MatchPlan solve_packing(const ExchangeGraph& g, int k) {
  return solve_packing(g, SolveOptions{k, true, false});
}

inline constexpr std::size_t kOracleNodeLimit = 14;

// Every feasible exchange, found by trying every ordered tuple of distinct
// nodes of size <= k + 1 against the edge list.
std::vector<Exchange> bruteforce_exchanges(const ExchangeGraph& g, const SolveOptions& options);

// Exact optimum by exhaustive search over node-disjoint sets of feasible
// exchanges. Throws InputError above kOracleNodeLimit nodes.
double oracle_bruteforce(const ExchangeGraph& g, const SolveOptions& options);

inline double oracle_bruteforce(const ExchangeGraph& g, int k) {
  return oracle_bruteforce(g, SolveOptions{k, true, false});
}

}  // namespace ddchain
