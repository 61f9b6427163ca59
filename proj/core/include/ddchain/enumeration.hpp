#pragma once

#include <vector>

#include "ddchain/exchange.hpp"

namespace ddchain {

struct ChainOptions {
  // Forbid chains that end at a PWL node instead of a WL node.
  bool require_wl_terminus = false;
};

// All simple cycles with 2..k edges over P, PWL and CN nodes. Each cycle is
// reported once, rotated to start at its lowest node index. Parallel edges
// (multi-donor pairs) yield distinct cycles. Throws InputError if k < 2.
std::vector<Exchange> enumerate_cycles(const ExchangeGraph& g, int k);

// All simple paths of 1..k edges that start at a DD, pass through P, PWL or
// CN nodes and end at a WL node, or at a PWL node that receives without
// donating. Throws InputError if k < 1.
std::vector<Exchange> enumerate_chains(const ExchangeGraph& g, int k, const ChainOptions& options = {});

// Drops every exchange in which a CN node i receives over an edge (j, i)
// whose weight is below w_(i,i).
std::vector<Exchange> filter_compatible_pair_exchanges(std::vector<Exchange> exchanges,
                                                       const ExchangeGraph& g);

}  // namespace ddchain
