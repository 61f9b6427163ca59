#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "ddchain/enumeration.hpp"
#include "ddchain/errors.hpp"
#include "ddchain/lp.hpp"
#include "ddchain/solvers.hpp"

namespace ddchain {

namespace {

constexpr double kFracTol = 1e-6;
constexpr double kPriceTol = 1e-9;
constexpr std::size_t kColumnsPerRound = 2000;

class PackingSolver {
 public:
  PackingSolver(const ExchangeGraph& g, const SolveOptions& o) : g_(g), o_(o) {
    integral_ = g.all_weights_integral();
    build_resources();
    build_candidates();
  }

  MatchPlan run(SolverStats* stats) {
    State root;
    root.alive.assign(cands_.size(), 1);
    root.cap = capacity_;
    std::vector<int> seed_columns;
    branch(root, {}, 0.0, seed_columns);
    if (stats) {
      stats->branch_nodes += nodes_;
      stats->lp_solves += lp_solves_;
      stats->columns += cands_.size();
    }
    return decode();
  }

 private:
  struct Candidate {
    Exchange exchange;
    std::vector<int> resources;
  };
  struct State {
    std::vector<char> alive;
    std::vector<int> cap;
  };

  void build_resources() {
    resource_of_.assign(g_.num_nodes(), -1);
    // Wait-list sinks with identical in-arcs are interchangeable.
    std::map<std::vector<std::tuple<NodeIndex, int, double>>, int> classes;
    for (NodeIndex v = 0; v < g_.num_nodes(); ++v) {
      if (g_.role(v) != Role::WL) {
        resource_of_[v] = static_cast<int>(capacity_.size());
        capacity_.push_back(1);
        continue;
      }
      std::vector<std::tuple<NodeIndex, int, double>> sig;
      for (EdgeIndex e : g_.in_edges(v)) sig.emplace_back(g_.edge(e).from, g_.edge(e).donor, g_.edge(e).weight);
      std::sort(sig.begin(), sig.end());
      auto [it, fresh] = classes.emplace(std::move(sig), static_cast<int>(capacity_.size()));
      if (fresh) {
        capacity_.push_back(0);
        members_.emplace_back();
        sink_slot_.push_back(it->second);
      }
      resource_of_[v] = it->second;
      capacity_[it->second]++;
      const auto slot = std::find(sink_slot_.begin(), sink_slot_.end(), it->second) - sink_slot_.begin();
      members_[slot].push_back(v);
    }
  }

  void build_candidates() {
    std::vector<Exchange> all;
    if (o_.k >= 2) all = enumerate_cycles(g_, o_.k);
    auto chains = enumerate_chains(g_, o_.k, ChainOptions{o_.require_wl_terminus});
    all.insert(all.end(), std::make_move_iterator(chains.begin()), std::make_move_iterator(chains.end()));
    if (o_.include_cn_constraint) all = filter_compatible_pair_exchanges(std::move(all), g_);

    std::map<std::vector<std::int64_t>, bool> seen;
    for (Exchange& x : all) {
      std::vector<std::int64_t> key;
      key.push_back(static_cast<std::int64_t>(x.kind));
      const NodeIndex last = x.nodes.back();
      const bool pooled_sink = x.kind == ExchangeKind::Chain && g_.role(last) == Role::WL;
      for (std::size_t i = 0; i + (pooled_sink ? 1 : 0) < x.edges.size(); ++i) key.push_back(x.edges[i]);
      if (pooled_sink) {
        const Edge& e = g_.edge(x.edges.back());
        key.insert(key.end(), {-1, e.from, e.donor, resource_of_[last]});
      }
      if (!seen.emplace(std::move(key), true).second) continue;
      Candidate c;
      for (NodeIndex v : x.nodes) c.resources.push_back(resource_of_[v]);
      c.exchange = std::move(x);
      cands_.push_back(std::move(c));
    }
  }

  bool usable(const State& s, int c) const {
    if (!s.alive[c]) return false;
    for (int r : cands_[c].resources)
      if (s.cap[r] <= 0) return false;
    return true;
  }

  bool prunable(double bound) const {
    if (integral_) return bound < best_ + 1.0 - 1e-6;
    return bound <= best_ + 1e-9 * (1.0 + std::abs(best_));
  }

  void consider(const std::vector<int>& chosen, double value) {
    if (value > best_ + 1e-9 || (!have_best_ && value >= best_)) {
      best_ = value;
      best_set_ = chosen;
      have_best_ = true;
    }
  }

  // LP over usable candidates with partial pricing. Returns x per candidate
  // (zero for those never priced in) and the LP value.
  std::pair<double, std::vector<double>> relax(const State& s, const std::vector<int>& seed) {
    std::vector<int> usable_ids;
    for (int c = 0; c < static_cast<int>(cands_.size()); ++c)
      if (usable(s, c)) usable_ids.push_back(c);

    std::vector<int> row_of(capacity_.size(), -1);
    double penalty = 1.0;
    lp::LinearProgram lp(penalty);
    for (int c : usable_ids)
      for (int r : cands_[c].resources)
        if (row_of[r] < 0) row_of[r] = lp.add_row(lp::RowSense::LessEqual, s.cap[r]);

    std::vector<char> in_lp(cands_.size(), 0);
    std::vector<int> columns;
    auto add = [&](int c) {
      std::vector<lp::Entry> entries;
      for (int r : cands_[c].resources) entries.push_back({row_of[r], 1.0});
      lp.add_column(cands_[c].exchange.total_weight, entries);
      columns.push_back(c);
      in_lp[c] = 1;
    };
    for (int c : seed)
      if (usable(s, c) && !in_lp[c]) add(c);

    lp::Solution sol;
    for (;;) {
      sol = lp.solve();
      ++lp_solves_;
      std::vector<std::pair<double, int>> priced;
      for (int c : usable_ids) {
        if (in_lp[c]) continue;
        double d = cands_[c].exchange.total_weight;
        for (int r : cands_[c].resources) d -= sol.duals.empty() ? 0.0 : sol.duals[row_of[r]];
        if (d > kPriceTol) priced.emplace_back(-d, c);
      }
      if (priced.empty()) break;
      if (priced.size() > kColumnsPerRound) {
        std::nth_element(priced.begin(), priced.begin() + kColumnsPerRound, priced.end());
        priced.resize(kColumnsPerRound);
      }
      std::sort(priced.begin(), priced.end());
      for (const auto& p : priced) add(p.second);
    }
    std::vector<double> x(cands_.size(), 0.0);
    for (std::size_t j = 0; j < columns.size(); ++j) x[columns[j]] = sol.primal[j];
    return {sol.objective, std::move(x)};
  }

  void round_heuristic(const State& s, const std::vector<int>& fixed, double fixed_value,
                       const std::vector<double>& x) {
    std::vector<int> order;
    for (int c = 0; c < static_cast<int>(cands_.size()); ++c)
      if (x[c] > kFracTol) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] > x[b]; });
    std::vector<int> cap = s.cap;
    std::vector<int> chosen = fixed;
    double value = fixed_value;
    for (int c : order) {
      bool fits = true;
      for (int r : cands_[c].resources) fits = fits && cap[r] > 0;
      if (!fits) continue;
      for (int r : cands_[c].resources) cap[r]--;
      chosen.push_back(c);
      value += cands_[c].exchange.total_weight;
    }
    consider(chosen, value);
  }

  void branch(State& s, std::vector<int> fixed, double fixed_value, const std::vector<int>& seed) {
    ++nodes_;
    consider(fixed, fixed_value);
    auto [lp_value, x] = relax(s, seed);
    if (prunable(fixed_value + lp_value)) return;

    int pick = -1;
    for (int c = 0; c < static_cast<int>(cands_.size()); ++c) {
      if (x[c] > kFracTol && x[c] < 1.0 - kFracTol) {
        pick = c;
        break;
      }
    }
    if (pick < 0) {
      std::vector<int> chosen = fixed;
      double value = fixed_value;
      for (int c = 0; c < static_cast<int>(cands_.size()); ++c) {
        if (x[c] > 0.5) {
          chosen.push_back(c);
          value += cands_[c].exchange.total_weight;
        }
      }
      consider(chosen, value);
      return;
    }
    round_heuristic(s, fixed, fixed_value, x);
    if (prunable(fixed_value + lp_value)) return;

    std::vector<int> next_seed;
    for (int c = 0; c < static_cast<int>(cands_.size()); ++c)
      if (x[c] > kFracTol) next_seed.push_back(c);

    {
      State child = s;
      child.alive[pick] = 0;
      for (int r : cands_[pick].resources) child.cap[r]--;
      std::vector<int> f = fixed;
      f.push_back(pick);
      branch(child, std::move(f), fixed_value + cands_[pick].exchange.total_weight, next_seed);
    }
    s.alive[pick] = 0;
    branch(s, std::move(fixed), fixed_value, next_seed);
  }

  MatchPlan decode() const {
    std::vector<int> chosen = best_set_;
    std::sort(chosen.begin(), chosen.end());
    std::vector<std::size_t> next(members_.size(), 0);
    std::vector<Exchange> out;
    for (int c : chosen) {
      Exchange x = cands_[c].exchange;
      const NodeIndex last = x.nodes.back();
      if (x.kind == ExchangeKind::Chain && g_.role(last) == Role::WL) {
        const int res = resource_of_[last];
        const auto slot = std::find(sink_slot_.begin(), sink_slot_.end(), res) - sink_slot_.begin();
        const NodeIndex member = members_[slot].at(next[slot]++);
        const Edge& tail = g_.edge(x.edges.back());
        EdgeIndex replacement = x.edges.back();
        for (EdgeIndex e : g_.in_edges(member))
          if (g_.edge(e).from == tail.from && g_.edge(e).donor == tail.donor) replacement = e;
        x.edges.back() = replacement;
        x = make_exchange(g_, ExchangeKind::Chain, std::move(x.edges));
      }
      out.push_back(std::move(x));
    }
    return make_plan(g_, std::move(out));
  }

  const ExchangeGraph& g_;
  SolveOptions o_;
  bool integral_ = true;
  std::vector<int> resource_of_;
  std::vector<int> capacity_;
  std::vector<int> sink_slot_;                  // sink class index -> resource
  std::vector<std::vector<NodeIndex>> members_;  // sink class index -> WL nodes
  std::vector<Candidate> cands_;

  double best_ = 0.0;
  bool have_best_ = false;
  std::vector<int> best_set_;
  std::size_t nodes_ = 0;
  std::size_t lp_solves_ = 0;
};

}  // namespace

MatchPlan solve_packing(const ExchangeGraph& g, const SolveOptions& options, SolverStats* stats) {
  if (options.k < 1) throw InputError("k must be at least 1");
  return PackingSolver(g, options).run(stats);
}

}  // namespace ddchain
