#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ddchain/plan.hpp"

namespace ddchain {

// Per-copy rows attached to one node. f and g are the out- and in-flow of the
// node inside a single copy.
struct NodeRules {
  bool balance = false;                 // f == g         (P, CN)
  bool inflow_at_most_one = false;      // g <= 1         (P, PWL, WL, CN)
  bool outflow_at_most_one = false;     // f <= 1         (DD, PWL)
  bool outflow_at_most_inflow = false;  // f <= g         (PWL)
};

// (w_(j,i) - w_(i,i)) x_(j,i)^l >= 0 for an edge into compatible pair i.
struct ThresholdRow {
  EdgeIndex edge = 0;
  double coefficient = 0.0;
};

enum class RowSense { LessEqual, GreaterEqual, Equal };

struct LinearTerm {
  std::size_t variable = 0;
  double coefficient = 0.0;
};

struct LinearRow {
  std::string name;
  std::vector<LinearTerm> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

// The L-copy 0-1 program. Variables x_e^l exist for every non-loop edge e
// and copy l; variable index = l * num_edge_slots() + slot. Copies are
// identical, so rows are stored once as node rules and expanded on demand.
// Holds a reference to the graph, which must outlive it.
class CompactFormulation {
 public:
  const ExchangeGraph& graph() const { return *graph_; }
  int num_copies() const { return copies_; }
  int chain_bound() const { return k_; }
  bool include_cn_constraint() const { return include_cn_; }
  bool require_wl_terminus() const { return require_wl_terminus_; }

  std::span<const EdgeIndex> variable_edges() const { return slots_; }
  std::size_t num_edge_slots() const { return slots_.size(); }
  std::size_t num_variables() const { return slots_.size() * static_cast<std::size_t>(copies_); }
  std::size_t variable(std::size_t slot, int copy) const {
    return static_cast<std::size_t>(copy) * slots_.size() + slot;
  }
  EdgeIndex edge_of(std::size_t variable) const { return slots_[variable % slots_.size()]; }
  int copy_of(std::size_t variable) const { return static_cast<int>(variable / slots_.size()); }
  std::string variable_name(std::size_t variable) const;
  double objective_coefficient(std::size_t variable) const;

  const NodeRules& rules(NodeIndex i) const { return rules_[i]; }
  std::span<const ThresholdRow> thresholds() const { return thresholds_; }

  // Expands every constraint row; size grows with L, meant for dumps and
  // small-instance checks.
  std::vector<LinearRow> materialize_rows() const;

  // Row-by-row audit of a plan read as an x assignment (each exchange in
  // its copy_index). Returns the names of violated rows; empty when feasible.
  std::vector<std::string> violated_rows(const MatchPlan& plan) const;

  SolveOptions options() const { return SolveOptions{k_, include_cn_, require_wl_terminus_}; }

 private:
  friend CompactFormulation build_compact(const ExchangeGraph&, int, bool, bool);

  const ExchangeGraph* graph_ = nullptr;
  int copies_ = 0;
  int k_ = 0;
  bool include_cn_ = false;
  bool require_wl_terminus_ = false;
  std::vector<EdgeIndex> slots_;
  std::vector<NodeRules> rules_;
  std::vector<ThresholdRow> thresholds_;
};

// Throws InputError if k < 1.
CompactFormulation build_compact(const ExchangeGraph& g, int k, bool include_cn_constraint,
                                 bool require_wl_terminus = false);

inline CompactFormulation build_compact(const ExchangeGraph& g, const SolveOptions& o) {
  return build_compact(g, o.k, o.include_cn_constraint, o.require_wl_terminus);
}

// CPLEX-LP style text: objective, one constraint per line, binaries.
void write_lp(const CompactFormulation& f, std::ostream& out);

}  // namespace ddchain
