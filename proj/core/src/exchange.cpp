#include "ddchain/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ddchain {

std::string_view to_string(ExchangeKind k) { return k == ExchangeKind::Cycle ? "cycle" : "chain"; }

Exchange make_exchange(const ExchangeGraph& g, ExchangeKind kind, std::vector<EdgeIndex> edges) {
  Exchange x;
  x.kind = kind;
  x.edges = std::move(edges);
  x.nodes.reserve(x.edges.size() + 1);
  for (EdgeIndex e : x.edges) {
    x.nodes.push_back(g.edge(e).from);
    x.total_weight += g.edge(e).weight;
  }
  if (kind == ExchangeKind::Chain && !x.edges.empty()) x.nodes.push_back(g.edge(x.edges.back()).to);
  return x;
}

namespace {

bool passes_kidney_on(Role r) { return r == Role::P || r == Role::PWL || r == Role::CN; }

}  // namespace

std::optional<std::string> check_exchange(const ExchangeGraph& g, const Exchange& x,
                                          const StructureRules& rules) {
  if (x.edges.empty()) return "empty exchange";
  if (static_cast<int>(x.edges.size()) > rules.max_length) return "longer than k";
  for (std::size_t i = 0; i < x.edges.size(); ++i) {
    if (x.edges[i] >= g.num_edges()) return "unknown edge";
    const Edge& e = g.edge(x.edges[i]);
    if (e.is_self_loop()) return "self-edge inside an exchange";
    if (i + 1 < x.edges.size() && e.to != g.edge(x.edges[i + 1]).from) return "edges do not connect";
  }
  const Edge& first = g.edge(x.edges.front());
  const Edge& last = g.edge(x.edges.back());

  std::vector<NodeIndex> walk;
  for (EdgeIndex e : x.edges) walk.push_back(g.edge(e).from);
  if (x.kind == ExchangeKind::Cycle) {
    if (last.to != first.from) return "cycle does not close";
    if (x.edges.size() < 2) return "cycle shorter than 2";
    for (NodeIndex v : walk)
      if (!passes_kidney_on(g.role(v))) return "cycle through a DD or WL node";
  } else {
    walk.push_back(last.to);
    if (g.role(walk.front()) != Role::DD) return "chain does not start at a DD";
    for (std::size_t i = 1; i + 1 < walk.size(); ++i)
      if (!passes_kidney_on(g.role(walk[i]))) return "chain interior is not a pair";
    const Role end = g.role(walk.back());
    const bool ends_ok = end == Role::WL || (end == Role::PWL && !rules.require_wl_terminus);
    if (!ends_ok) return "chain ends at a node that must donate";
  }
  if (std::set<NodeIndex>(walk.begin(), walk.end()).size() != walk.size()) return "node repeats";
  if (walk != x.nodes) return "node list does not match edges";

  double sum = 0.0;
  for (EdgeIndex e : x.edges) sum += g.edge(e).weight;
  if (std::abs(sum - x.total_weight) > 1e-9 * (1.0 + std::abs(sum))) return "weight mismatch";

  if (rules.enforce_cn_threshold) {
    for (EdgeIndex e : x.edges) {
      const auto self = g.self_weight(g.edge(e).to);
      if (self && g.edge(e).weight < *self) return "compatible pair receives below its own match";
    }
  }
  return std::nullopt;
}

}  // namespace ddchain
