#include "ddchain/enumeration.hpp"

#include <algorithm>

#include "ddchain/errors.hpp"

namespace ddchain {

namespace {

bool passes_kidney_on(Role r) { return r == Role::P || r == Role::PWL || r == Role::CN; }

class CycleSearch {
 public:
  CycleSearch(const ExchangeGraph& g, int k) : g_(g), k_(k), on_path_(g.num_nodes(), 0) {}

  std::vector<Exchange> run() {
    for (NodeIndex s = 0; s < g_.num_nodes(); ++s) {
      if (!passes_kidney_on(g_.role(s))) continue;
      start_ = s;
      on_path_[s] = 1;
      extend(s);
      on_path_[s] = 0;
    }
    return std::move(out_);
  }

 private:
  void extend(NodeIndex v) {
    for (EdgeIndex e : g_.out_edges(v)) {
      const NodeIndex w = g_.edge(e).to;
      if (w == v) continue;
      if (w == start_) {
        if (!path_.empty()) {
          path_.push_back(e);
          out_.push_back(make_exchange(g_, ExchangeKind::Cycle, path_));
          path_.pop_back();
        }
        continue;
      }
      // Canonical rotation: every other node has a larger index than start.
      if (w < start_ || on_path_[w] || !passes_kidney_on(g_.role(w))) continue;
      if (static_cast<int>(path_.size()) + 2 > k_) continue;
      on_path_[w] = 1;
      path_.push_back(e);
      extend(w);
      path_.pop_back();
      on_path_[w] = 0;
    }
  }

  const ExchangeGraph& g_;
  int k_;
  NodeIndex start_ = 0;
  std::vector<char> on_path_;
  std::vector<EdgeIndex> path_;
  std::vector<Exchange> out_;
};

class ChainSearch {
 public:
  ChainSearch(const ExchangeGraph& g, int k, const ChainOptions& opts)
      : g_(g), k_(k), opts_(opts), on_path_(g.num_nodes(), 0) {}

  std::vector<Exchange> run() {
    for (NodeIndex s = 0; s < g_.num_nodes(); ++s) {
      if (g_.role(s) != Role::DD) continue;
      on_path_[s] = 1;
      extend(s);
      on_path_[s] = 0;
    }
    return std::move(out_);
  }

 private:
  void extend(NodeIndex v) {
    for (EdgeIndex e : g_.out_edges(v)) {
      const NodeIndex w = g_.edge(e).to;
      if (on_path_[w]) continue;
      const Role r = g_.role(w);
      path_.push_back(e);
      if (r == Role::WL || (r == Role::PWL && !opts_.require_wl_terminus))
        out_.push_back(make_exchange(g_, ExchangeKind::Chain, path_));
      if (passes_kidney_on(r) && static_cast<int>(path_.size()) < k_) {
        on_path_[w] = 1;
        extend(w);
        on_path_[w] = 0;
      }
      path_.pop_back();
    }
  }

  const ExchangeGraph& g_;
  int k_;
  ChainOptions opts_;
  std::vector<char> on_path_;
  std::vector<EdgeIndex> path_;
  std::vector<Exchange> out_;
};

}  // namespace

std::vector<Exchange> enumerate_cycles(const ExchangeGraph& g, int k) {
  if (k < 2) throw InputError("cycle length bound must be at least 2");
  return CycleSearch(g, k).run();
}

std::vector<Exchange> enumerate_chains(const ExchangeGraph& g, int k, const ChainOptions& options) {
  if (k < 1) throw InputError("chain length bound must be at least 1");
  return ChainSearch(g, k, options).run();
}

std::vector<Exchange> filter_compatible_pair_exchanges(std::vector<Exchange> exchanges,
                                                       const ExchangeGraph& g) {
  auto violates = [&](const Exchange& x) {
    return std::any_of(x.edges.begin(), x.edges.end(), [&](EdgeIndex e) {
      const auto self = g.self_weight(g.edge(e).to);
      return self && g.edge(e).weight < *self;
    });
  };
  std::erase_if(exchanges, violates);
  return exchanges;
}

}  // namespace ddchain
