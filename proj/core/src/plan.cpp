#include "ddchain/plan.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ddchain/errors.hpp"

namespace ddchain {

std::size_t MatchPlan::num_transplants() const {
  std::size_t n = 0;
  for (const Exchange& x : exchanges) n += x.edges.size();
  return n;
}

int copy_count(const ExchangeGraph& g) {
  return static_cast<int>(g.count(Role::DD) + g.pair_count() / 2);
}

MatchPlan make_plan(const ExchangeGraph& g, std::vector<Exchange> exchanges) {
  auto min_edge = [](const Exchange& x) { return *std::min_element(x.edges.begin(), x.edges.end()); };
  std::sort(exchanges.begin(), exchanges.end(),
            [&](const Exchange& a, const Exchange& b) { return min_edge(a) < min_edge(b); });
  MatchPlan plan;
  plan.assignment.assign(g.num_nodes(), std::nullopt);
  for (std::size_t i = 0; i < exchanges.size(); ++i) {
    exchanges[i].copy_index = static_cast<int>(i);
    plan.objective += exchanges[i].total_weight;
    for (NodeIndex v : exchanges[i].nodes) {
      if (plan.assignment[v]) throw InvariantError("exchanges share a node");
      plan.assignment[v] = i;
    }
  }
  plan.exchanges = std::move(exchanges);
  return plan;
}

std::vector<std::string> validate_plan(const ExchangeGraph& g, const MatchPlan& plan,
                                       const SolveOptions& options) {
  std::vector<std::string> issues;
  const StructureRules rules{options.k, options.require_wl_terminus, options.include_cn_constraint};
  const int copies = copy_count(g);

  std::vector<int> gives(g.num_nodes(), 0), receives(g.num_nodes(), 0), seen(g.num_nodes(), 0);
  std::set<int> copies_used;
  double objective = 0.0;
  for (std::size_t i = 0; i < plan.exchanges.size(); ++i) {
    const Exchange& x = plan.exchanges[i];
    const std::string tag = "exchange " + std::to_string(i) + ": ";
    if (auto err = check_exchange(g, x, rules)) issues.push_back(tag + *err);
    if (!x.copy_index) {
      issues.push_back(tag + "no copy index");
    } else {
      if (*x.copy_index < 0 || *x.copy_index >= copies) issues.push_back(tag + "copy index out of range");
      if (!copies_used.insert(*x.copy_index).second) issues.push_back(tag + "two exchanges in one copy");
    }
    objective += x.total_weight;
    for (EdgeIndex e : x.edges) {
      if (e >= g.num_edges()) continue;
      gives[g.edge(e).from]++;
      receives[g.edge(e).to]++;
    }
    for (NodeIndex v : x.nodes) {
      if (v >= g.num_nodes()) continue;
      if (seen[v]++) issues.push_back(tag + "node " + std::to_string(g.node(v).id) + " used twice");
      if (plan.assignment.size() == g.num_nodes() && plan.assignment[v] != i)
        issues.push_back(tag + "assignment map disagrees");
    }
  }
  for (NodeIndex v = 0; v < g.num_nodes(); ++v) {
    const std::string tag = "node " + std::to_string(g.node(v).id) + ": ";
    if (gives[v] > 1 || receives[v] > 1) issues.push_back(tag + "gives or receives more than once");
    switch (g.role(v)) {
      case Role::P:
      case Role::CN:
        if (gives[v] != receives[v]) issues.push_back(tag + "pair gives without receiving or vice versa");
        break;
      case Role::PWL:
        if (gives[v] > receives[v]) issues.push_back(tag + "PWL gives without receiving");
        if (options.require_wl_terminus && gives[v] != receives[v])
          issues.push_back(tag + "PWL terminates a chain");
        break;
      case Role::DD:
        if (receives[v] != 0) issues.push_back(tag + "DD receives");
        break;
      case Role::WL:
        if (gives[v] != 0) issues.push_back(tag + "WL gives");
        break;
    }
    if (plan.assignment.size() == g.num_nodes() && plan.assignment[v] && !seen[v])
      issues.push_back(tag + "assigned but not in any exchange");
  }
  if (plan.assignment.size() != g.num_nodes()) issues.emplace_back("assignment map has wrong size");
  if (std::abs(objective - plan.objective) > 1e-9 * (1.0 + std::abs(objective)))
    issues.emplace_back("objective does not equal the sum of exchange weights");
  return issues;
}

}  // namespace ddchain
