#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddchain/graph.hpp"

namespace ddchain {

enum class ExchangeKind : std::uint8_t { Cycle, Chain };

std::string_view to_string(ExchangeKind k);

// One cycle or one DD-initiated chain: the content of a single graph copy.
struct Exchange {
  ExchangeKind kind = ExchangeKind::Cycle;
  std::vector<EdgeIndex> edges;  // in traversal order
  std::vector<NodeIndex> nodes;  // traversal order; chains list the DD first
  double total_weight = 0.0;
  std::optional<int> copy_index;

  std::size_t length() const { return edges.size(); }

  friend bool operator==(const Exchange& a, const Exchange& b) {
    return a.kind == b.kind && a.edges == b.edges;
  }
};

// Builds an exchange from an edge walk; nodes and weight are derived.
Exchange make_exchange(const ExchangeGraph& g, ExchangeKind kind, std::vector<EdgeIndex> edges);

struct StructureRules {
  int max_length = 2;
  bool require_wl_terminus = false;
  // Reject any exchange in which a CN node receives below its self weight.
  bool enforce_cn_threshold = false;
};

// Returns a description of the first violated invariant, or nothing.
std::optional<std::string> check_exchange(const ExchangeGraph& g, const Exchange& x,
                                          const StructureRules& rules);

}  // namespace ddchain
