#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddchain/exchange.hpp"

namespace ddchain {

struct SolveOptions {
  int k = 2;
  bool include_cn_constraint = true;
  bool require_wl_terminus = false;
};

// A node-disjoint selection of exchanges, one per active graph copy.
struct MatchPlan {
  std::vector<Exchange> exchanges;
  double objective = 0.0;
  // node index -> position in `exchanges`, or nothing when unmatched
  std::vector<std::optional<std::size_t>> assignment;

  std::size_t num_transplants() const;
};

// L = |DD| + floor(|P u PWL u CN| / 2).
int copy_count(const ExchangeGraph& g);

// Orders exchanges by their smallest edge index, numbers the copies in that
// order and fills objective and assignment. Throws InvariantError if two
// exchanges share a node.
MatchPlan make_plan(const ExchangeGraph& g, std::vector<Exchange> exchanges);

// Structural audit of a decoded plan: exchange shape and length, copy
// numbering, node-disjointness, role rules (P gives iff it receives, PWL gives
// only if it receives, DD never receives, WL never gives), the compatible-pair
// threshold when enabled, and objective bookkeeping. Empty when clean.
std::vector<std::string> validate_plan(const ExchangeGraph& g, const MatchPlan& plan,
                                       const SolveOptions& options);

}  // namespace ddchain
