#pragma once

// Independent test oracles. The LP oracle is a deliberately plain full-
// tableau two-phase simplex over the standard equality form with artificial
// variables and Bland's rule; it shares no code with the production solver.

#include <cmath>
#include <limits>
#include <vector>

#include "gridswitch/lp.hpp"
#include "gridswitch/model.hpp"
#include "gridswitch/network.hpp"

namespace oracle {

struct LpOracleResult {
  enum class Status { Optimal, Infeasible, Unbounded } status =
      Status::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;     // per original lp variable
  std::vector<double> row_duals;  // per original lp row
};

// Solve min c'x, rows with senses, variable bounds. Conversion: shift/split
// variables to x >= 0, upper bounds become extra rows, artificials on every
// row after making rhs nonnegative.
inline LpOracleResult solve_lp_oracle(const gridswitch::LinearProgram& lp) {
  using gridswitch::RowSense;
  const double inf = std::numeric_limits<double>::infinity();
  const int n0 = static_cast<int>(lp.num_vars());
  const int m0 = static_cast<int>(lp.num_rows());

  // variable mapping: x_orig = shift + sum(sign_k * x_new_k)
  struct VarMap {
    int col1 = -1, col2 = -1;  // split second column for free vars
    double shift = 0.0;
    double sign = 1.0;  // applied to col1
  };
  std::vector<VarMap> vmap(n0);
  int ncols = 0;
  std::vector<double> ub_row_value;  // upper-bound rows appended after m0
  std::vector<int> ub_row_col;
  for (int j = 0; j < n0; ++j) {
    const double lo = lp.vars[j].lower, hi = lp.vars[j].upper;
    if (lo > -inf) {
      vmap[j].col1 = ncols++;
      vmap[j].shift = lo;
      vmap[j].sign = 1.0;
      if (hi < inf) {
        ub_row_col.push_back(vmap[j].col1);
        ub_row_value.push_back(hi - lo);
      }
    } else if (hi < inf) {
      vmap[j].col1 = ncols++;
      vmap[j].shift = hi;
      vmap[j].sign = -1.0;
    } else {
      vmap[j].col1 = ncols++;
      vmap[j].col2 = ncols++;
      vmap[j].sign = 1.0;  // x = x1 - x2
    }
  }
  const int m_ub = static_cast<int>(ub_row_value.size());
  const int m = m0 + m_ub;

  // dense rows of the equality system before slacks/artificials
  std::vector<std::vector<double>> a(m, std::vector<double>(ncols, 0.0));
  std::vector<double> b(m, 0.0);
  std::vector<int> sense(m, 0);  // -1 <=, 0 =, +1 >=
  std::vector<double> flip(m, 1.0);
  for (int i = 0; i < m0; ++i) {
    double rhs = lp.rows[i].rhs;
    for (auto [col, coef] : lp.rows[i].coeffs) {
      const VarMap& vm = vmap[col];
      a[i][vm.col1] += coef * vm.sign;
      if (vm.col2 >= 0) a[i][vm.col2] -= coef;
      rhs -= coef * vm.shift;
    }
    b[i] = rhs;
    sense[i] = lp.rows[i].sense == RowSense::LessEqual
                   ? -1
                   : lp.rows[i].sense == RowSense::Equal ? 0 : 1;
  }
  for (int k = 0; k < m_ub; ++k) {
    a[m0 + k][ub_row_col[k]] = 1.0;
    b[m0 + k] = ub_row_value[k];
    sense[m0 + k] = -1;
  }

  // objective over new columns plus the constant picked up by shifting
  double obj_shift = lp.objective_const;
  std::vector<double> c(ncols, 0.0);
  for (int j = 0; j < n0; ++j) {
    const VarMap& vm = vmap[j];
    c[vm.col1] += lp.objective[j] * vm.sign;
    if (vm.col2 >= 0) c[vm.col2] -= lp.objective[j];
    obj_shift += lp.objective[j] * vm.shift;
  }

  // append slack/surplus then one artificial per row; flip rows to b >= 0
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      for (double& v : a[i]) v = -v;
      b[i] = -b[i];
      sense[i] = -sense[i];
      flip[i] = -1.0;
    }
  }
  int nslack = 0;
  for (int i = 0; i < m; ++i)
    if (sense[i] != 0) ++nslack;
  const int total = ncols + nslack + m;  // + artificials
  std::vector<std::vector<double>> t(m, std::vector<double>(total + 1, 0.0));
  std::vector<int> basis(m);
  {
    int s = ncols;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < ncols; ++j) t[i][j] = a[i][j];
      if (sense[i] == -1) t[i][s++] = 1.0;
      else if (sense[i] == 1) t[i][s++] = -1.0;
      const int art = ncols + nslack + i;
      t[i][art] = 1.0;
      basis[i] = art;
      t[i][total] = b[i];
    }
  }

  auto pivot = [&](int row, int col) {
    const double p = t[row][col];
    for (double& v : t[row]) v /= p;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= total; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  };

  // Bland's rule simplex over cost vector `cost` restricted to columns
  // [0, limit); returns false on unboundedness
  auto run = [&](const std::vector<double>& cost, int limit) {
    while (true) {
      std::vector<double> y(m);
      for (int i = 0; i < m; ++i) y[i] = cost[basis[i]];
      int enter = -1;
      for (int j = 0; j < limit; ++j) {
        double red = cost[j];
        for (int i = 0; i < m; ++i) red -= y[i] * t[i][j];
        if (red < -1e-9) { enter = j; break; }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] > 1e-9) {
          const double ratio = t[i][total] / t[i][enter];
          if (ratio < best - 1e-12 ||
              (ratio < best + 1e-12 &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  };

  LpOracleResult res;
  // phase 1
  std::vector<double> cost1(total, 0.0);
  for (int i = 0; i < m; ++i) cost1[ncols + nslack + i] = 1.0;
  if (!run(cost1, total)) return res;  // cannot happen, defensive
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[i] >= ncols + nslack) infeas += t[i][total];
  if (infeas > 1e-7) {
    res.status = LpOracleResult::Status::Infeasible;
    return res;
  }
  // drive residual artificials out of the basis where possible
  for (int i = 0; i < m; ++i) {
    if (basis[i] < ncols + nslack) continue;
    for (int j = 0; j < ncols + nslack; ++j) {
      if (std::abs(t[i][j]) > 1e-9) { pivot(i, j); break; }
    }
  }
  // phase 2, artificials excluded
  std::vector<double> cost2(total, 0.0);
  for (int j = 0; j < ncols; ++j) cost2[j] = c[j];
  if (!run(cost2, ncols + nslack)) {
    res.status = LpOracleResult::Status::Unbounded;
    return res;
  }

  std::vector<double> xnew(ncols, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[i] < ncols) xnew[basis[i]] = t[i][total];
  res.primal.assign(n0, 0.0);
  for (int j = 0; j < n0; ++j) {
    const VarMap& vm = vmap[j];
    res.primal[j] = vm.shift + vm.sign * xnew[vm.col1];
    if (vm.col2 >= 0) res.primal[j] -= xnew[vm.col2];
  }
  res.objective = obj_shift;
  for (int j = 0; j < n0; ++j) res.objective += lp.objective[j] * res.primal[j];

  // duals: reduced cost of the artificial of row i is c_art - y_i = -y_i,
  // read straight from the final tableau
  res.row_duals.assign(m0, 0.0);
  {
    std::vector<double> y(m);
    for (int i = 0; i < m; ++i) y[i] = cost2[basis[i]];
    for (int i = 0; i < m0; ++i) {
      const int art = ncols + nslack + i;
      double red = 0.0;
      for (int k = 0; k < m; ++k) red += y[k] * t[k][art];
      res.row_duals[i] = red * flip[i];
    }
  }
  res.status = LpOracleResult::Status::Optimal;
  return res;
}

// brute force over all 2^|E| topologies, each solved as a static DCOPF by
// the oracle LP solver; infeasible topologies are skipped
struct EnumerationResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<int> topology;  // indicator over branches
};

inline EnumerationResult enumerate_topologies(const gridswitch::Network& net) {
  EnumerationResult best;
  const std::size_t ne = net.num_branches();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ne); ++mask) {
    gridswitch::Topology topo(ne, false);
    for (std::size_t e = 0; e < ne; ++e)
      if (mask & (std::uint64_t{1} << e)) topo.set(static_cast<int>(e), true);
    const auto lp = gridswitch::build_sdcopf(net, topo);
    const auto res = solve_lp_oracle(lp);
    if (res.status != LpOracleResult::Status::Optimal) continue;
    if (!best.feasible || res.objective < best.objective - 1e-12) {
      best.feasible = true;
      best.objective = res.objective;
      best.topology = topo.indicator();
    }
  }
  return best;
}

}  // namespace oracle
