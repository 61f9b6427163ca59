#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ddchain::lp {

enum class RowSense { LessEqual, GreaterEqual };

enum class Status { Optimal, Infeasible, Unbounded };

struct Entry {
  int row = 0;
  double value = 0.0;
};

struct Solution {
  Status status = Status::Optimal;
  double objective = 0.0;
  std::vector<double> primal;  // one value per structural column
  std::vector<double> duals;   // one value per row; reduced cost = c_j - duals . a_j
  int iterations = 0;
};

// Maximizes c'x subject to row constraints and x >= 0 with a dense revised
// simplex. Right-hand sides must be non-negative. Greater-or-equal rows carry
// an artificial variable priced at -artificial_penalty; a solve that ends
// with an artificial above tolerance reports Infeasible.
//
// Columns may be added between solves; the previous basis stays primal
// feasible, so re-optimization continues from it. Rows must all be added
// before the first solve.
class LinearProgram {
 public:
  explicit LinearProgram(double artificial_penalty = 1e6);

  int add_row(RowSense sense, double rhs);
  int add_column(double cost, std::span<const Entry> entries);

  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_columns() const { return structural_.size(); }

  Solution solve();

 private:
  struct Column {
    double cost = 0.0;
    std::vector<Entry> entries;
    bool artificial = false;
  };
  struct RowSpec {
    RowSense sense;
    double rhs;
  };

  void initialize();
  void reinvert();
  void recompute_primal();
  double reduced_cost(int var, const std::vector<double>& y) const;

  double penalty_;
  std::vector<RowSpec> rows_;
  std::vector<Column> columns_;  // logical columns first, then structurals in add order
  std::vector<int> structural_;  // structural column -> variable index
  bool initialized_ = false;

  std::vector<int> basis_;         // row position -> variable
  std::vector<int> position_;      // variable -> row position or -1
  std::vector<double> binv_;       // dense m x m, row-major
  std::vector<double> xb_;
  int pivots_since_reinvert_ = 0;
};

}  // namespace ddchain::lp
