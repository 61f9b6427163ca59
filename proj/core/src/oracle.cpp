#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ddchain/errors.hpp"
#include "ddchain/solvers.hpp"

namespace ddchain {

namespace {

bool is_pair(Role r) { return r == Role::P || r == Role::PWL || r == Role::CN; }

// Tries every ordered tuple of distinct nodes against a pairwise edge table
// built straight from the edge list; no adjacency walks.
class TupleSearch {
 public:
  TupleSearch(const ExchangeGraph& g, const SolveOptions& o) : g_(g), o_(o), n_(g.num_nodes()) {
    between_.assign(n_ * n_, {});
    for (EdgeIndex e = 0; e < g.num_edges(); ++e) {
      const Edge& edge = g.edge(e);
      if (!edge.is_self_loop()) between_[edge.from * n_ + edge.to].push_back(e);
    }
  }

  std::vector<Exchange> run() {
    std::vector<NodeIndex> tuple;
    std::vector<char> used(n_, 0);
    grow(tuple, used);
    return std::move(found_);
  }

 private:
  void grow(std::vector<NodeIndex>& tuple, std::vector<char>& used) {
    if (tuple.size() >= 2) consider(tuple);
    if (static_cast<int>(tuple.size()) == o_.k + 1) return;
    for (NodeIndex v = 0; v < n_; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      tuple.push_back(v);
      grow(tuple, used);
      tuple.pop_back();
      used[v] = 0;
    }
  }

  void consider(const std::vector<NodeIndex>& t) {
    const std::size_t hops = t.size() - 1;
    // Chain reading: DD, pairs..., terminus.
    if (g_.role(t.front()) == Role::DD && static_cast<int>(hops) <= o_.k) {
      bool ok = true;
      for (std::size_t i = 1; i + 1 < t.size(); ++i) ok = ok && is_pair(g_.role(t[i]));
      const Role end = g_.role(t.back());
      ok = ok && (end == Role::WL || (end == Role::PWL && !o_.require_wl_terminus));
      if (ok) emit(ExchangeKind::Chain, t, false);
    }
    // Cycle reading: all pairs, lowest index first, closing arc back.
    if (static_cast<int>(t.size()) <= o_.k &&
        std::all_of(t.begin(), t.end(), [&](NodeIndex v) { return is_pair(g_.role(v)); }) &&
        t.front() == *std::min_element(t.begin(), t.end())) {
      emit(ExchangeKind::Cycle, t, true);
    }
  }

  void emit(ExchangeKind kind, const std::vector<NodeIndex>& t, bool close) {
    const std::size_t arcs = close ? t.size() : t.size() - 1;
    std::vector<EdgeIndex> chosen(arcs);
    expand(kind, t, close, 0, chosen);
  }

  void expand(ExchangeKind kind, const std::vector<NodeIndex>& t, bool close, std::size_t i,
              std::vector<EdgeIndex>& chosen) {
    if (i == chosen.size()) {
      found_.push_back(make_exchange(g_, kind, chosen));
      return;
    }
    const NodeIndex a = t[i];
    const NodeIndex b = (close && i + 1 == t.size()) ? t.front() : t[i + 1];
    for (EdgeIndex e : between_[a * n_ + b]) {
      chosen[i] = e;
      expand(kind, t, close, i + 1, chosen);
    }
  }

  const ExchangeGraph& g_;
  SolveOptions o_;
  std::size_t n_;
  std::vector<std::vector<EdgeIndex>> between_;
  std::vector<Exchange> found_;
};

}  // namespace

std::vector<Exchange> bruteforce_exchanges(const ExchangeGraph& g, const SolveOptions& options) {
  if (options.k < 1) throw InputError("k must be at least 1");
  std::vector<Exchange> all = TupleSearch(g, options).run();
  if (options.include_cn_constraint) {
    std::erase_if(all, [&](const Exchange& x) {
      return std::any_of(x.edges.begin(), x.edges.end(), [&](EdgeIndex e) {
        const auto self = g.self_weight(g.edge(e).to);
        return self && g.edge(e).weight < *self;
      });
    });
  }
  return all;
}

double oracle_bruteforce(const ExchangeGraph& g, const SolveOptions& options) {
  const std::size_t n = g.num_nodes();
  if (n > kOracleNodeLimit)
    throw InputError("oracle limited to " + std::to_string(kOracleNodeLimit) + " nodes");
  const std::vector<Exchange> all = bruteforce_exchanges(g, options);

  // Exchanges grouped by their lowest node; masks of the nodes they use.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> by_low(n);
  for (const Exchange& x : all) {
    std::uint32_t mask = 0;
    for (NodeIndex v : x.nodes) mask |= 1u << v;
    const NodeIndex low = *std::min_element(x.nodes.begin(), x.nodes.end());
    by_low[low].emplace_back(mask, x.total_weight);
  }

  // best[mask] = optimum over nodes not in mask.
  const std::uint32_t full = n == 0 ? 0u : (1u << n) - 1u;
  std::vector<double> best(std::size_t{1} << n, 0.0);
  for (std::uint32_t mask = full; mask-- > 0;) {
    NodeIndex low = 0;
    while (mask & (1u << low)) ++low;
    double value = best[mask | (1u << low)];
    for (const auto& [used, w] : by_low[low])
      if ((used & mask) == 0) value = std::max(value, w + best[mask | used]);
    best[mask] = value;
  }
  return best[0];
}

}  // namespace ddchain
