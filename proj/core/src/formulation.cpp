#include "ddchain/formulation.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

#include "ddchain/errors.hpp"

namespace ddchain {

namespace {

std::string id_token(NodeId id) { return id < 0 ? fmt::format("n{}", -id) : fmt::format("{}", id); }

NodeRules rules_for(Role r, bool require_wl_terminus) {
  NodeRules n;
  switch (r) {
    case Role::P:
    case Role::CN:
      n.balance = true;
      n.inflow_at_most_one = true;
      break;
    case Role::PWL:
      n.inflow_at_most_one = true;
      n.outflow_at_most_one = true;
      if (require_wl_terminus) {
        n.balance = true;
      } else {
        n.outflow_at_most_inflow = true;
      }
      break;
    case Role::DD:
      n.outflow_at_most_one = true;
      break;
    case Role::WL:
      n.inflow_at_most_one = true;
      break;
  }
  return n;
}

}  // namespace

std::string CompactFormulation::variable_name(std::size_t variable) const {
  return fmt::format("x_{}_{}", edge_of(variable), copy_of(variable));
}

double CompactFormulation::objective_coefficient(std::size_t variable) const {
  return graph_->edge(edge_of(variable)).weight;
}

CompactFormulation build_compact(const ExchangeGraph& g, int k, bool include_cn_constraint,
                                 bool require_wl_terminus) {
  if (k < 1) throw InputError("chain bound k must be at least 1");
  CompactFormulation f;
  f.graph_ = &g;
  f.k_ = k;
  f.include_cn_ = include_cn_constraint;
  f.require_wl_terminus_ = require_wl_terminus;
  f.copies_ = copy_count(g);
  for (EdgeIndex e = 0; e < g.num_edges(); ++e)
    if (!g.edge(e).is_self_loop()) f.slots_.push_back(e);
  f.rules_.reserve(g.num_nodes());
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) f.rules_.push_back(rules_for(g.role(i), require_wl_terminus));
  if (include_cn_constraint) {
    for (EdgeIndex e : f.slots_) {
      const auto self = g.self_weight(g.edge(e).to);
      if (self) f.thresholds_.push_back(ThresholdRow{e, g.edge(e).weight - *self});
    }
  }
  return f;
}

std::vector<LinearRow> CompactFormulation::materialize_rows() const {
  const ExchangeGraph& g = *graph_;
  std::vector<std::size_t> slot_of(g.num_edges(), SIZE_MAX);
  for (std::size_t s = 0; s < slots_.size(); ++s) slot_of[slots_[s]] = s;

  auto flow = [&](NodeIndex i, int copy, double out_coef, double in_coef) {
    std::vector<LinearTerm> terms;
    if (out_coef != 0.0)
      for (EdgeIndex e : g.out_edges(i))
        if (slot_of[e] != SIZE_MAX) terms.push_back({variable(slot_of[e], copy), out_coef});
    if (in_coef != 0.0)
      for (EdgeIndex e : g.in_edges(i))
        if (slot_of[e] != SIZE_MAX) terms.push_back({variable(slot_of[e], copy), in_coef});
    return terms;
  };

  std::vector<LinearRow> rows;
  auto emit = [&](std::string name, std::vector<LinearTerm> terms, RowSense sense, double rhs) {
    if (!terms.empty()) rows.push_back(LinearRow{std::move(name), std::move(terms), sense, rhs});
  };

  for (int l = 0; l < copies_; ++l) {
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
      const NodeRules& r = rules_[i];
      const std::string id = id_token(g.node(i).id);
      if (r.balance) emit(fmt::format("bal_{}_{}", id, l), flow(i, l, 1.0, -1.0), RowSense::Equal, 0.0);
      if (r.inflow_at_most_one) emit(fmt::format("in_{}_{}", id, l), flow(i, l, 0.0, 1.0), RowSense::LessEqual, 1.0);
      if (r.outflow_at_most_one) emit(fmt::format("out_{}_{}", id, l), flow(i, l, 1.0, 0.0), RowSense::LessEqual, 1.0);
      if (r.outflow_at_most_inflow)
        emit(fmt::format("pwl_{}_{}", id, l), flow(i, l, 1.0, -1.0), RowSense::LessEqual, 0.0);
    }
    std::vector<LinearTerm> budget;
    for (std::size_t s = 0; s < slots_.size(); ++s) budget.push_back({variable(s, l), 1.0});
    emit(fmt::format("len_{}", l), std::move(budget), RowSense::LessEqual, static_cast<double>(k_));
  }
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    const std::string id = id_token(g.node(i).id);
    std::vector<LinearTerm> give, recv;
    for (int l = 0; l < copies_; ++l) {
      auto f = flow(i, l, 1.0, 0.0);
      auto r = flow(i, l, 0.0, 1.0);
      give.insert(give.end(), f.begin(), f.end());
      recv.insert(recv.end(), r.begin(), r.end());
    }
    emit(fmt::format("give_{}", id), std::move(give), RowSense::LessEqual, 1.0);
    emit(fmt::format("recv_{}", id), std::move(recv), RowSense::LessEqual, 1.0);
  }
  for (int l = 0; l < copies_; ++l)
    for (const ThresholdRow& t : thresholds_)
      emit(fmt::format("cn_{}_{}", t.edge, l), {{variable(slot_of[t.edge], l), t.coefficient}},
           RowSense::GreaterEqual, 0.0);
  return rows;
}

std::vector<std::string> CompactFormulation::violated_rows(const MatchPlan& plan) const {
  const ExchangeGraph& g = *graph_;
  std::vector<std::string> bad;
  // (node, copy) -> (f, g)
  std::map<std::pair<NodeIndex, int>, std::pair<int, int>> flow;
  std::vector<int> give(g.num_nodes(), 0), recv(g.num_nodes(), 0);
  std::map<int, int> per_copy;
  std::unordered_map<EdgeIndex, double> threshold;
  for (const ThresholdRow& t : thresholds_) threshold[t.edge] = t.coefficient;

  for (const Exchange& x : plan.exchanges) {
    if (!x.copy_index || *x.copy_index < 0 || *x.copy_index >= copies_) {
      bad.emplace_back("copy index outside 0..L-1");
      continue;
    }
    const int l = *x.copy_index;
    for (EdgeIndex e : x.edges) {
      const Edge& edge = g.edge(e);
      if (edge.is_self_loop()) {
        bad.push_back(fmt::format("x_{}_{} is not a variable", e, l));
        continue;
      }
      flow[{edge.from, l}].first++;
      flow[{edge.to, l}].second++;
      give[edge.from]++;
      recv[edge.to]++;
      per_copy[l]++;
      if (auto it = threshold.find(e); it != threshold.end() && it->second < 0.0)
        bad.push_back(fmt::format("cn_{}_{}", e, l));
    }
  }
  for (const auto& [key, fg] : flow) {
    const auto [i, l] = key;
    const NodeRules& r = rules_[i];
    const std::string id = id_token(g.node(i).id);
    if (r.balance && fg.first != fg.second) bad.push_back(fmt::format("bal_{}_{}", id, l));
    if (r.inflow_at_most_one && fg.second > 1) bad.push_back(fmt::format("in_{}_{}", id, l));
    if (r.outflow_at_most_one && fg.first > 1) bad.push_back(fmt::format("out_{}_{}", id, l));
    if (r.outflow_at_most_inflow && fg.first > fg.second) bad.push_back(fmt::format("pwl_{}_{}", id, l));
  }
  for (const auto& [l, count] : per_copy)
    if (count > k_) bad.push_back(fmt::format("len_{}", l));
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    if (give[i] > 1) bad.push_back(fmt::format("give_{}", id_token(g.node(i).id)));
    if (recv[i] > 1) bad.push_back(fmt::format("recv_{}", id_token(g.node(i).id)));
  }
  return bad;
}

void write_lp(const CompactFormulation& f, std::ostream& out) {
  auto coef = [](double c) { return fmt::format("{:g}", c); };
  out << fmt::format("\\ compact formulation: L = {} copies, k = {}, {} variables\n", f.num_copies(),
                     f.chain_bound(), f.num_variables());
  out << "Maximize\n obj:";
  bool first = true;
  for (std::size_t v = 0; v < f.num_variables(); ++v) {
    const double c = f.objective_coefficient(v);
    out << (first ? " " : " + ") << coef(c) << ' ' << f.variable_name(v);
    first = false;
  }
  if (first) out << " 0";
  out << "\nSubject To\n";
  for (const LinearRow& row : f.materialize_rows()) {
    out << ' ' << row.name << ':';
    bool lead = true;
    for (const LinearTerm& t : row.terms) {
      const double c = t.coefficient;
      if (lead) {
        out << ' ' << (c < 0 ? "- " : "") << coef(std::abs(c));
      } else {
        out << (c < 0 ? " - " : " + ") << coef(std::abs(c));
      }
      out << ' ' << f.variable_name(t.variable);
      lead = false;
    }
    const char* sense = row.sense == RowSense::LessEqual ? "<=" : row.sense == RowSense::GreaterEqual ? ">=" : "=";
    out << ' ' << sense << ' ' << coef(row.rhs) << '\n';
  }
  out << "Binary\n";
  for (std::size_t v = 0; v < f.num_variables(); ++v) out << ' ' << f.variable_name(v) << '\n';
  out << "End\n";
}

}  // namespace ddchain
