#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "ddchain/errors.hpp"
#include "ddchain/lp.hpp"
#include "ddchain/solvers.hpp"

namespace ddchain {

namespace {

constexpr double kFracTol = 1e-6;
constexpr double kPriceTol = 1e-9;
constexpr std::size_t kColumnsPerRound = 500;
constexpr std::size_t kStrongCandidates = 4;

// A per-copy structure: a path or a cycle allowed by the per-copy rows.
struct Pattern {
  std::vector<EdgeIndex> edges;
  bool closed = false;
  double weight = 0.0;
};

class BranchAndPrice {
 public:
  explicit BranchAndPrice(const CompactFormulation& f) : f_(f), g_(f.graph()) {
    const std::size_t n = g_.num_nodes();
    usable_edge_.assign(g_.num_edges(), 0);
    for (EdgeIndex e : f_.variable_edges()) usable_edge_[e] = 1;
    // A threshold row with a negative coefficient pins x_e^l to zero.
    for (const ThresholdRow& t : f_.thresholds())
      if (t.coefficient < 0.0) usable_edge_[t.edge] = 0;

    pool_sinks();

    can_start_.assign(n, 0);
    can_end_.assign(n, 0);
    for (NodeIndex i = 0; i < n; ++i) {
      const NodeRules& r = f_.rules(i);
      // f = 1, g = 0 inside a copy is allowed only without a balance row
      // and without f <= g; f = 0, g = 1 only without a balance row.
      can_start_[i] = !r.balance && !r.outflow_at_most_inflow;
      can_end_[i] = !r.balance;
    }
    integral_ = true;
    weight_sum_ = 0.0;
    for (EdgeIndex e : f_.variable_edges()) {
      const double w = g_.edge(e).weight;
      integral_ = integral_ && w == std::floor(w);
      weight_sum_ += std::max(0.0, w);
    }
  }

  // Wait-list nodes with identical in-arcs are interchangeable: only the
  // lowest member of each class keeps its edges and the class shares one
  // receive row with capacity equal to its size.
  void pool_sinks() {
    const std::size_t n = g_.num_nodes();
    capacity_.assign(n, 1);
    members_.assign(n, {});
    std::map<std::vector<std::tuple<NodeIndex, int, double>>, NodeIndex> classes;
    for (NodeIndex v = 0; v < n; ++v) {
      if (g_.role(v) != Role::WL) continue;
      std::vector<std::tuple<NodeIndex, int, double>> sig;
      for (EdgeIndex e : g_.in_edges(v))
        if (usable_edge_[e]) sig.emplace_back(g_.edge(e).from, g_.edge(e).donor, g_.edge(e).weight);
      std::sort(sig.begin(), sig.end());
      auto [it, fresh] = classes.emplace(std::move(sig), v);
      const NodeIndex rep = it->second;
      members_[rep].push_back(v);
      if (fresh) continue;
      capacity_[rep]++;
      capacity_[v] = 0;
      for (EdgeIndex e : g_.in_edges(v)) usable_edge_[e] = 0;
    }
  }

  MatchPlan run(SolverStats* stats) {
    if (f_.num_copies() > 0 && f_.num_edge_slots() > 0) {
      Branch root;
      root.banned.assign(g_.num_edges(), 0);
      for (EdgeIndex e = 0; e < g_.num_edges(); ++e) root.banned[e] = !usable_edge_[e];
      explore(root);
    }
    if (stats) {
      stats->branch_nodes += nodes_;
      stats->lp_solves += lp_solves_;
      stats->columns += pool_.size();
    }
    std::vector<Exchange> out;
    std::vector<std::size_t> next(g_.num_nodes(), 0);
    for (Pattern p : best_) {
      if (!p.closed) {
        // hand the pooled sink slot to a concrete class member
        const Edge& last = g_.edge(p.edges.back());
        const NodeIndex member = members_[last.to].empty() ? last.to : members_[last.to].at(next[last.to]++);
        for (EdgeIndex e : g_.in_edges(member))
          if (g_.edge(e).from == last.from && g_.edge(e).donor == last.donor) p.edges.back() = e;
      }
      out.push_back(to_exchange(p));
    }
    return make_plan(g_, std::move(out));
  }

 private:
  struct Branch {
    std::vector<char> banned;
    std::vector<EdgeIndex> forced;
    std::vector<NodeIndex> must_give;  // nodes whose donor gives in some column
    std::vector<int> taken;  // receive units already used by fixed columns
  };

  struct Master {
    double objective = 0.0;
    bool feasible = true;
    std::vector<int> columns;  // pool index per LP column
    std::vector<double> values;
  };

  Exchange to_exchange(const Pattern& p) const {
    std::vector<EdgeIndex> edges = p.edges;
    if (p.closed) {
      auto low = std::min_element(edges.begin(), edges.end(), [&](EdgeIndex a, EdgeIndex b) {
        return g_.edge(a).from < g_.edge(b).from;
      });
      std::rotate(edges.begin(), low, edges.end());
    }
    return make_exchange(g_, p.closed ? ExchangeKind::Cycle : ExchangeKind::Chain, std::move(edges));
  }

  bool allowed(const Branch& b, const Pattern& p) const {
    return std::none_of(p.edges.begin(), p.edges.end(), [&](EdgeIndex e) { return b.banned[e]; });
  }

  bool prunable(double bound) const {
    if (integral_) return bound < best_value_ + 1.0 - 1e-6;
    return bound <= best_value_ + 1e-9 * (1.0 + std::abs(best_value_));
  }

  void consider(const std::vector<int>& chosen) {
    double value = 0.0;
    for (int c : chosen) value += pool_[c].weight;
    if (value > best_value_ + 1e-9) {
      best_value_ = value;
      best_.clear();
      for (int c : chosen) best_.push_back(pool_[c]);
    }
  }

  int add_to_pool(Pattern p) {
    auto [it, fresh] = pool_index_.emplace(p.edges, static_cast<int>(pool_.size()));
    if (fresh) pool_.push_back(std::move(p));
    return it->second;
  }

  // Column generation on the master of one branch node.
  Master solve_master(const Branch& b) {
    const std::size_t n = g_.num_nodes();
    lp::LinearProgram lp(1.0 + weight_sum_);
    std::vector<int> give_row(n, -1), recv_row(n, -1);
    for (NodeIndex i = 0; i < n; ++i) {
      bool out = false, in = false;
      for (EdgeIndex e : g_.out_edges(i)) out = out || !b.banned[e];
      for (EdgeIndex e : g_.in_edges(i)) in = in || !b.banned[e];
      if (out) give_row[i] = lp.add_row(lp::RowSense::LessEqual, 1.0);
      if (in) recv_row[i] = lp.add_row(lp::RowSense::LessEqual, capacity_[i] - (b.taken.empty() ? 0 : b.taken[i]));
    }
    const int convexity = lp.add_row(lp::RowSense::LessEqual, f_.num_copies());
    std::vector<int> force_row(g_.num_edges(), -1);
    for (EdgeIndex e : b.forced) force_row[e] = lp.add_row(lp::RowSense::GreaterEqual, 1.0);
    std::vector<int> must_give_row(n, -1);
    for (NodeIndex v : b.must_give) must_give_row[v] = lp.add_row(lp::RowSense::GreaterEqual, 1.0);

    Master m;
    std::vector<char> in_lp(pool_.size(), 0);
    auto add_column = [&](int c) {
      std::vector<lp::Entry> entries;
      for (EdgeIndex e : pool_[c].edges) {
        entries.push_back({give_row[g_.edge(e).from], 1.0});
        entries.push_back({recv_row[g_.edge(e).to], 1.0});
        if (force_row[e] >= 0) entries.push_back({force_row[e], 1.0});
        if (must_give_row[g_.edge(e).from] >= 0) entries.push_back({must_give_row[g_.edge(e).from], 1.0});
      }
      entries.push_back({convexity, 1.0});
      lp.add_column(pool_[c].weight, entries);
      m.columns.push_back(c);
      if (static_cast<std::size_t>(c) >= in_lp.size()) in_lp.resize(c + 1, 0);
      in_lp[c] = 1;
    };
    for (int c = 0; c < static_cast<int>(pool_.size()); ++c)
      if (allowed(b, pool_[c])) add_column(c);

    lp::Solution sol;
    for (;;) {
      sol = lp.solve();
      ++lp_solves_;
      std::vector<double> reduced(g_.num_edges(), 0.0);
      for (EdgeIndex e = 0; e < g_.num_edges(); ++e) {
        if (b.banned[e]) continue;
        const Edge& edge = g_.edge(e);
        double r = edge.weight - sol.duals[give_row[edge.from]] - sol.duals[recv_row[edge.to]];
        if (force_row[e] >= 0) r -= sol.duals[force_row[e]];
        if (must_give_row[edge.from] >= 0) r -= sol.duals[must_give_row[edge.from]];
        reduced[e] = r;
      }
      auto priced = price(b, reduced, sol.duals[convexity]);
      bool added = false;
      for (Pattern& p : priced) {
        const int c = add_to_pool(std::move(p));
        if (static_cast<std::size_t>(c) < in_lp.size() && in_lp[c]) continue;
        add_column(c);
        added = true;
      }
      if (!added) break;
    }
    m.feasible = sol.status == lp::Status::Optimal;
    m.objective = sol.objective;
    m.values = sol.primal;
    return m;
  }

  // Best per-copy structures by reduced cost: paths from a start-capable node
  // to an end-capable node, and cycles rooted at their lowest node.
  std::vector<Pattern> price(const Branch& b, const std::vector<double>& reduced, double convexity_dual) {
    const int k = f_.chain_bound();
    double best_edge = 0.0;
    for (EdgeIndex e = 0; e < g_.num_edges(); ++e)
      if (!b.banned[e]) best_edge = std::max(best_edge, reduced[e]);

    using Entry = std::pair<double, std::vector<EdgeIndex>>;
    auto worse = [](const Entry& a, const Entry& c) {
      if (a.first != c.first) return a.first > c.first;
      return a.second < c.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
    std::set<std::vector<EdgeIndex>> cycles;
    auto threshold = [&] { return heap.size() < kColumnsPerRound ? kPriceTol : heap.top().first; };
    auto offer = [&](double rc, const std::vector<EdgeIndex>& path, bool closed) {
      if (rc <= threshold()) return;
      if (closed) cycles.insert(path);
      heap.emplace(rc, path);
      if (heap.size() > kColumnsPerRound) heap.pop();
    };

    std::vector<char> on_path(g_.num_nodes(), 0);
    std::vector<EdgeIndex> path;

    // Paths.
    std::function<void(NodeIndex, double)> walk = [&](NodeIndex v, double acc) {
      for (EdgeIndex e : g_.out_edges(v)) {
        if (b.banned[e]) continue;
        const NodeIndex w = g_.edge(e).to;
        if (on_path[w]) continue;
        const double next = acc + reduced[e];
        path.push_back(e);
        if (can_end_[w]) offer(next - convexity_dual, path, false);
        const int depth = static_cast<int>(path.size());
        if (depth < k && next + (k - depth) * best_edge - convexity_dual > threshold()) {
          on_path[w] = 1;
          walk(w, next);
          on_path[w] = 0;
        }
        path.pop_back();
      }
    };
    for (NodeIndex s = 0; s < g_.num_nodes(); ++s) {
      if (!can_start_[s]) continue;
      on_path[s] = 1;
      walk(s, 0.0);
      on_path[s] = 0;
    }

    // Cycles.
    NodeIndex root = 0;
    std::function<void(NodeIndex, double)> loop = [&](NodeIndex v, double acc) {
      for (EdgeIndex e : g_.out_edges(v)) {
        if (b.banned[e]) continue;
        const NodeIndex w = g_.edge(e).to;
        const double next = acc + reduced[e];
        if (w == root) {
          if (!path.empty()) {
            path.push_back(e);
            offer(next - convexity_dual, path, true);
            path.pop_back();
          }
          continue;
        }
        if (w < root || on_path[w]) continue;
        const int depth = static_cast<int>(path.size()) + 1;
        if (depth + 1 > k) continue;
        if (next + (k - depth) * best_edge - convexity_dual <= threshold()) continue;
        on_path[w] = 1;
        path.push_back(e);
        loop(w, next);
        path.pop_back();
        on_path[w] = 0;
      }
    };
    if (k >= 2) {
      for (root = 0; root < g_.num_nodes(); ++root) {
        on_path[root] = 1;
        loop(root, 0.0);
        on_path[root] = 0;
      }
    }

    std::vector<Entry> ranked;
    while (!heap.empty()) {
      ranked.push_back(heap.top());
      heap.pop();
    }
    std::reverse(ranked.begin(), ranked.end());
    std::vector<Pattern> out;
    for (auto& [rc, edges] : ranked) {
      Pattern p;
      p.closed = cycles.count(edges) > 0;
      for (EdgeIndex e : edges) p.weight += g_.edge(e).weight;
      p.edges = std::move(edges);
      out.push_back(std::move(p));
    }
    return out;
  }

  // Repeatedly fixes the heaviest fractional column and re-prices until the
  // master is integral; the result seeds the incumbent.
  void dive(Branch b) {
    b.taken.assign(g_.num_nodes(), 0);
    std::vector<int> fixed;
    double fixed_value = 0.0;
    for (;;) {
      Master m = solve_master(b);
      if (!m.feasible || prunable(fixed_value + m.objective)) return;
      int heaviest = -1;
      double heaviest_value = kFracTol;
      bool integral = true;
      std::vector<int> ones;
      for (std::size_t j = 0; j < m.columns.size(); ++j) {
        const double v = m.values[j];
        if (v > 1.0 - kFracTol) ones.push_back(m.columns[j]);
        else if (v > kFracTol) integral = false;
        if (v > kFracTol && v < 1.0 - kFracTol && v > heaviest_value) {
          heaviest_value = v;
          heaviest = m.columns[j];
        }
      }
      if (integral) {
        ones.insert(ones.end(), fixed.begin(), fixed.end());
        consider(ones);
        return;
      }
      ones.push_back(heaviest);
      for (int c : ones) {
        fixed.push_back(c);
        fixed_value += pool_[c].weight;
        for (EdgeIndex e : pool_[c].edges) {
          const Edge& edge = g_.edge(e);
          for (EdgeIndex o : g_.out_edges(edge.from)) b.banned[o] = 1;
          if (++b.taken[edge.to] >= capacity_[edge.to])
            for (EdgeIndex o : g_.in_edges(edge.to)) b.banned[o] = 1;
        }
      }
    }
  }

  void explore(Branch& b) {
    ++nodes_;
    Master m = solve_master(b);
    if (!m.feasible || prunable(m.objective)) return;
    if (nodes_ == 1) {
      dive(b);
      if (prunable(m.objective)) return;
    }

    std::vector<double> y(g_.num_edges(), 0.0);
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      if (m.values[j] <= 0.0) continue;
      for (EdgeIndex e : pool_[m.columns[j]].edges) y[e] += m.values[j];
    }
    // Most fractional aggregated edge, lowest index on ties.
    int pick = -1;
    double best_score = kFracTol;
    for (EdgeIndex e = 0; e < g_.num_edges(); ++e) {
      const double score = 0.5 - std::abs(y[e] - 0.5);
      if (score > best_score + 1e-9) {
        best_score = score;
        pick = static_cast<int>(e);
      }
    }

    std::vector<std::pair<double, int>> support;
    for (std::size_t j = 0; j < m.columns.size(); ++j)
      if (m.values[j] > kFracTol) support.emplace_back(-m.values[j], m.columns[j]);
    std::sort(support.begin(), support.end());

    if (pick < 0) {
      // Integral edge values: every supported pattern is a whole component.
      std::vector<int> chosen;
      for (const auto& [neg, c] : support)
        if (-neg > 0.5) chosen.push_back(c);
      consider(chosen);
      return;
    }

    // Greedy rounding of the fractional master for an incumbent.
    {
      std::vector<char> gives(g_.num_nodes(), 0);
      std::vector<int> gets(g_.num_nodes(), 0);
      std::vector<int> chosen;
      for (const auto& [neg, c] : support) {
        bool ok = true;
        for (EdgeIndex e : pool_[c].edges)
          ok = ok && !gives[g_.edge(e).from] && gets[g_.edge(e).to] < capacity_[g_.edge(e).to];
        if (!ok) continue;
        for (EdgeIndex e : pool_[c].edges) {
          gives[g_.edge(e).from] = 1;
          gets[g_.edge(e).to]++;
        }
        chosen.push_back(c);
      }
      consider(chosen);
    }
    if (prunable(m.objective)) return;

    // Branch on a fractional column that is not yet pinned. When an integral
    // objective is within reach of the incumbent, score the most fractional
    // few by how well their children prune; one whose children all prune
    // closes the node.
    std::vector<std::pair<double, int>> candidates;
    for (std::size_t j = 0; j < m.columns.size(); ++j) {
      const int c = m.columns[j];
      if (m.values[j] <= kFracTol || m.values[j] >= 1.0 - kFracTol || pinned(b, pool_[c])) continue;
      candidates.emplace_back(std::abs(m.values[j] - 0.5), c);
    }
    std::sort(candidates.begin(), candidates.end());
    if (!candidates.empty()) {
      int column = candidates.front().second;
      if (integral_ && m.objective < best_value_ + 2.0 - 1e-6) {
        double top_score = -1.0;
        for (std::size_t i = 0; i < std::min(candidates.size(), kStrongCandidates); ++i) {
          const auto kids = children(b, pool_[candidates[i].second]);
          int pruned = 0;
          double drop = 0.0;
          for (const Branch& kid : kids) {
            const Master km = solve_master(kid);
            if (!km.feasible || prunable(km.objective)) ++pruned;
            else drop += (m.objective - km.objective) / (1.0 + m.objective);
          }
          if (pruned == static_cast<int>(kids.size())) return;
          const double score = (pruned + drop) / static_cast<double>(kids.size());
          if (score > top_score + 1e-9) {
            top_score = score;
            column = candidates[i].second;
          }
        }
      }
      for (Branch& child : children(b, pool_[column])) {
        if (prunable(m.objective)) return;
        explore(child);
      }
      return;
    }

    const EdgeIndex e = static_cast<EdgeIndex>(pick);
    {
      Branch child = b;
      force(child, e);
      explore(child);
    }
    b.banned[e] = 1;
    explore(b);
  }

  // Partition for one column: it is used as is, or its chain continues past
  // the end node, or its i-th edge is banned with the earlier ones forced.
  std::vector<Branch> children(const Branch& b, const Pattern& p) const {
    std::vector<Branch> out;
    const NodeIndex end = g_.edge(p.edges.back()).to;
    Branch used = b;
    for (EdgeIndex e : p.edges) force(used, e);
    if (!p.closed && !gives_banned(b, end)) {
      Branch longer = used;
      longer.must_give.push_back(end);
      for (EdgeIndex o : g_.out_edges(end)) used.banned[o] = 1;
      out.push_back(std::move(used));
      out.push_back(std::move(longer));
    } else {
      out.push_back(std::move(used));
    }
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
      Branch child = b;
      for (std::size_t j = 0; j < i; ++j) force(child, p.edges[j]);
      child.banned[p.edges[i]] = 1;
      out.push_back(std::move(child));
    }
    return out;
  }

  void force(Branch& b, EdgeIndex e) const {
    if (std::find(b.forced.begin(), b.forced.end(), e) != b.forced.end()) return;
    b.forced.push_back(e);
    const Edge& edge = g_.edge(e);
    for (EdgeIndex o : g_.out_edges(edge.from))
      if (o != e) b.banned[o] = 1;
    if (capacity_[edge.to] == 1)
      for (EdgeIndex o : g_.in_edges(edge.to))
        if (o != e) b.banned[o] = 1;
  }

  bool gives_banned(const Branch& b, NodeIndex v) const {
    return std::all_of(g_.out_edges(v).begin(), g_.out_edges(v).end(), [&](EdgeIndex o) { return b.banned[o]; });
  }

  // Every edge forced and, for a chain, the end node barred from giving.
  bool pinned(const Branch& b, const Pattern& p) const {
    for (EdgeIndex e : p.edges)
      if (std::find(b.forced.begin(), b.forced.end(), e) == b.forced.end()) return false;
    return p.closed || gives_banned(b, g_.edge(p.edges.back()).to);
  }

  const CompactFormulation& f_;
  const ExchangeGraph& g_;
  std::vector<char> usable_edge_;
  std::vector<int> capacity_;                   // receive capacity per node
  std::vector<std::vector<NodeIndex>> members_;  // sink class members by representative
  std::vector<char> can_start_;
  std::vector<char> can_end_;
  bool integral_ = true;
  double weight_sum_ = 0.0;

  std::vector<Pattern> pool_;
  std::map<std::vector<EdgeIndex>, int> pool_index_;
  std::vector<Pattern> best_;
  double best_value_ = 0.0;
  std::size_t nodes_ = 0;
  std::size_t lp_solves_ = 0;
};

}  // namespace

MatchPlan solve_bb(const CompactFormulation& f, SolverStats* stats) {
  return BranchAndPrice(f).run(stats);
}

}  // namespace ddchain
