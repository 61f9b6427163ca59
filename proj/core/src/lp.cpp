#include "ddchain/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddchain::lp {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kArtificialTol = 1e-7;
// Consecutive degenerate pivots tolerated before switching to Bland's rule.
constexpr int kStallLimit = 50;

}  // namespace

LinearProgram::LinearProgram(double artificial_penalty) : penalty_(artificial_penalty) {}

int LinearProgram::add_row(RowSense sense, double rhs) {
  if (initialized_) throw std::logic_error("rows must be added before the first solve");
  if (!(rhs >= 0.0)) throw std::invalid_argument("right-hand side must be non-negative");
  rows_.push_back(RowSpec{sense, rhs});
  return static_cast<int>(rows_.size()) - 1;
}

int LinearProgram::add_column(double cost, std::span<const Entry> entries) {
  Column c;
  c.cost = cost;
  c.entries.assign(entries.begin(), entries.end());
  for (const Entry& e : c.entries)
    if (e.row < 0 || e.row >= static_cast<int>(rows_.size()))
      throw std::out_of_range("column references an undeclared row");
  columns_.push_back(std::move(c));
  structural_.push_back(static_cast<int>(columns_.size()) - 1);
  if (initialized_) position_.push_back(-1);
  return static_cast<int>(structural_.size()) - 1;
}

void LinearProgram::initialize() {
  const int m = static_cast<int>(rows_.size());
  basis_.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    if (rows_[i].sense == RowSense::LessEqual) {
      columns_.push_back(Column{0.0, {Entry{i, 1.0}}, false});
      basis_[i] = static_cast<int>(columns_.size()) - 1;
    } else {
      columns_.push_back(Column{0.0, {Entry{i, -1.0}}, false});
      columns_.push_back(Column{-penalty_, {Entry{i, 1.0}}, true});
      basis_[i] = static_cast<int>(columns_.size()) - 1;
    }
  }
  position_.assign(columns_.size(), -1);
  for (int i = 0; i < m; ++i) position_[basis_[i]] = i;
  binv_.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) binv_[static_cast<std::size_t>(i) * m + i] = 1.0;
  xb_.resize(m);
  for (int i = 0; i < m; ++i) xb_[i] = rows_[i].rhs;
  initialized_ = true;
}

void LinearProgram::reinvert() {
  const int m = static_cast<int>(rows_.size());
  // Gauss-Jordan on [B | I].
  std::vector<double> b(static_cast<std::size_t>(m) * m, 0.0);
  for (int r = 0; r < m; ++r)
    for (const Entry& e : columns_[basis_[r]].entries) b[static_cast<std::size_t>(e.row) * m + r] = e.value;
  std::vector<double> inv(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i) * m + i] = 1.0;
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(b[static_cast<std::size_t>(r) * m + col]) > std::abs(b[static_cast<std::size_t>(piv) * m + col]))
        piv = r;
    const double p = b[static_cast<std::size_t>(piv) * m + col];
    if (std::abs(p) < 1e-12) throw std::runtime_error("singular basis during reinversion");
    if (piv != col) {
      std::swap_ranges(b.begin() + static_cast<std::ptrdiff_t>(piv) * m,
                       b.begin() + static_cast<std::ptrdiff_t>(piv + 1) * m,
                       b.begin() + static_cast<std::ptrdiff_t>(col) * m);
      std::swap_ranges(inv.begin() + static_cast<std::ptrdiff_t>(piv) * m,
                       inv.begin() + static_cast<std::ptrdiff_t>(piv + 1) * m,
                       inv.begin() + static_cast<std::ptrdiff_t>(col) * m);
    }
    double* brow = &b[static_cast<std::size_t>(col) * m];
    double* irow = &inv[static_cast<std::size_t>(col) * m];
    for (int j = 0; j < m; ++j) {
      brow[j] /= p;
      irow[j] /= p;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = b[static_cast<std::size_t>(r) * m + col];
      if (f == 0.0) continue;
      double* br = &b[static_cast<std::size_t>(r) * m];
      double* ir = &inv[static_cast<std::size_t>(r) * m];
      for (int j = 0; j < m; ++j) {
        br[j] -= f * brow[j];
        ir[j] -= f * irow[j];
      }
    }
  }
  binv_ = std::move(inv);
  recompute_primal();
  pivots_since_reinvert_ = 0;
}

void LinearProgram::recompute_primal() {
  const int m = static_cast<int>(rows_.size());
  for (int r = 0; r < m; ++r) {
    double s = 0.0;
    const double* row = &binv_[static_cast<std::size_t>(r) * m];
    for (int i = 0; i < m; ++i) s += row[i] * rows_[i].rhs;
    xb_[r] = std::max(0.0, s);
  }
}

double LinearProgram::reduced_cost(int var, const std::vector<double>& y) const {
  double d = columns_[var].cost;
  for (const Entry& e : columns_[var].entries) d -= y[e.row] * e.value;
  return d;
}

Solution LinearProgram::solve() {
  if (!initialized_) initialize();
  const int m = static_cast<int>(rows_.size());
  const int reinvert_every = std::max(100, m / 2);
  std::vector<double> y(m), alpha(m);
  int stall = 0;
  Solution out;

  for (;;) {
    if (pivots_since_reinvert_ >= reinvert_every) reinvert();

    std::fill(y.begin(), y.end(), 0.0);
    for (int r = 0; r < m; ++r) {
      const double cb = columns_[basis_[r]].cost;
      if (cb == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(r) * m];
      for (int i = 0; i < m; ++i) y[i] += cb * row[i];
    }

    const bool bland = stall >= kStallLimit;
    int entering = -1;
    double best = kReducedCostTol;
    for (int v = 0; v < static_cast<int>(columns_.size()); ++v) {
      if (position_[v] >= 0) continue;
      const double d = reduced_cost(v, y);
      if (d > best) {
        entering = v;
        best = d;
        if (bland) break;
      }
    }
    if (entering < 0) break;

    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (const Entry& e : columns_[entering].entries)
      for (int r = 0; r < m; ++r) alpha[r] += binv_[static_cast<std::size_t>(r) * m + e.row] * e.value;

    int leave = -1;
    double theta = 0.0;
    for (int r = 0; r < m; ++r) {
      if (alpha[r] <= kPivotTol) continue;
      const double ratio = xb_[r] / alpha[r];
      bool take = leave < 0 || ratio < theta - 1e-12;
      if (!take && ratio <= theta + 1e-12) {
        take = bland ? basis_[r] < basis_[leave] : alpha[r] > alpha[leave];
      }
      if (take) {
        leave = r;
        theta = ratio;
      }
    }
    if (leave < 0) {
      out.status = Status::Unbounded;
      out.iterations++;
      return out;
    }

    for (int r = 0; r < m; ++r) {
      if (r == leave) continue;
      xb_[r] = std::max(0.0, xb_[r] - theta * alpha[r]);
    }
    xb_[leave] = theta;

    const double p = alpha[leave];
    double* prow = &binv_[static_cast<std::size_t>(leave) * m];
    for (int i = 0; i < m; ++i) prow[i] /= p;
    for (int r = 0; r < m; ++r) {
      if (r == leave || alpha[r] == 0.0) continue;
      const double f = alpha[r];
      double* row = &binv_[static_cast<std::size_t>(r) * m];
      for (int i = 0; i < m; ++i) row[i] -= f * prow[i];
    }

    position_[basis_[leave]] = -1;
    basis_[leave] = entering;
    position_[entering] = leave;
    ++pivots_since_reinvert_;
    ++out.iterations;
    stall = theta <= 1e-12 ? stall + 1 : 0;
  }

  out.duals = y;
  out.primal.assign(structural_.size(), 0.0);
  double artificial = 0.0;
  for (int r = 0; r < m; ++r) {
    out.objective += columns_[basis_[r]].cost * xb_[r];
    if (columns_[basis_[r]].artificial) artificial += xb_[r];
  }
  for (std::size_t s = 0; s < structural_.size(); ++s) {
    const int pos = position_[structural_[s]];
    if (pos >= 0) out.primal[s] = xb_[pos];
  }
  out.status = artificial > kArtificialTol ? Status::Infeasible : Status::Optimal;
  return out;
}

}  // namespace ddchain::lp
