#pragma once

// Bounded-variable primal simplex, phase 1 / phase 2, dense basis inverse
// with periodic refactorization. Sized for desk-scale grids (a few thousand
// rows); sparsity of the basis is deliberately not exploited.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "gridswitch/lp.hpp"

namespace gridswitch {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit,
                      NumericalFailure };

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  std::vector<double> primal;  // per lp variable
  std::vector<double> duals;   // per lp row; y_i = d obj / d rhs_i
  double objective = 0.0;
  int iterations = 0;
};

struct SimplexOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  double pivot_tol = 1e-9;
  int max_iters = 50000;
  int refactor_interval = 100;
  int bland_streak = 50;  // degenerate pivots before switching to Bland's rule
};

// basis snapshot for warm starts across re-solves of the same LP shape
struct SimplexBasis {
  std::vector<int> basic;       // variable index per row
  std::vector<int8_t> nonbasic; // per variable: 0 basic, 1 at lower, 2 at upper, 3 free
};

class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexOptions opts = {}) : opts_(opts) {}

  LpResult solve(const LinearProgram& lp,
                 const SimplexBasis* warm = nullptr) {
    load(lp);
    if (warm && warm->basic.size() == static_cast<std::size_t>(m_) &&
        warm->nonbasic.size() == static_cast<std::size_t>(n_total_)) {
      basic_ = warm->basic;
      vstat_ = warm->nonbasic;
      if (!refactorize()) reset_to_logical_basis();
    } else {
      reset_to_logical_basis();
    }
    compute_basic_values();

    LpResult res;
    res.primal.assign(lp.num_vars(), 0.0);
    res.duals.assign(m_, 0.0);

    const RunOutcome p1 = run_phase(1);
    if (p1 == RunOutcome::IterLimit) return finish(lp, res, LpStatus::IterationLimit);
    if (p1 == RunOutcome::Numerical) { res.status = LpStatus::NumericalFailure; return res; }
    if (total_infeasibility() > opts_.feas_tol * 10.0)
      return finish(lp, res, LpStatus::Infeasible);

    const RunOutcome p2 = run_phase(2);
    if (p2 == RunOutcome::IterLimit) return finish(lp, res, LpStatus::IterationLimit);
    if (p2 == RunOutcome::Numerical) { res.status = LpStatus::NumericalFailure; return res; }
    if (p2 == RunOutcome::Unbounded) return finish(lp, res, LpStatus::Unbounded);
    return finish(lp, res, LpStatus::Optimal);
  }

  SimplexBasis basis() const { return {basic_, vstat_}; }

 private:
  enum VStat : int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };
  enum class RunOutcome { Done, Unbounded, IterLimit, Numerical };

  SimplexOptions opts_;
  int m_ = 0;        // rows
  int n_ = 0;        // structural variables
  int n_total_ = 0;  // structural + logical
  // column-wise sparse matrix including logical identity columns
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lower_, upper_, cost_;
  std::vector<double> rhs_;
  double obj_const_ = 0.0;

  std::vector<int> basic_;      // size m
  std::vector<int8_t> vstat_;   // size n_total
  std::vector<double> binv_;    // dense m*m, row-major
  std::vector<double> xb_;      // basic values, size m
  int iters_ = 0;
  int pivots_since_refactor_ = 0;
  int degen_streak_ = 0;

  void load(const LinearProgram& lp) {
    m_ = static_cast<int>(lp.num_rows());
    n_ = static_cast<int>(lp.num_vars());
    n_total_ = n_ + m_;
    obj_const_ = lp.objective_const;
    cols_.assign(n_total_, {});
    lower_.assign(n_total_, 0.0);
    upper_.assign(n_total_, 0.0);
    cost_.assign(n_total_, 0.0);
    rhs_.assign(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lower_[j] = lp.vars[j].lower;
      upper_[j] = lp.vars[j].upper;
      cost_[j] = lp.objective[j];
    }
    for (int i = 0; i < m_; ++i) {
      const Row& r = lp.rows[i];
      for (auto [col, coef] : r.coeffs)
        if (coef != 0.0) cols_[col].push_back({i, coef});
      rhs_[i] = r.rhs;
      const int s = n_ + i;
      cols_[s].push_back({i, 1.0});
      switch (r.sense) {
        case RowSense::LessEqual: lower_[s] = 0.0; upper_[s] = kInf; break;
        case RowSense::GreaterEqual: lower_[s] = -kInf; upper_[s] = 0.0; break;
        case RowSense::Equal: lower_[s] = 0.0; upper_[s] = 0.0; break;
      }
    }
    iters_ = 0;
    degen_streak_ = 0;
  }

  void reset_to_logical_basis() {
    basic_.resize(m_);
    vstat_.assign(n_total_, kAtLower);
    for (int j = 0; j < n_; ++j) {
      if (lower_[j] > -kInf) vstat_[j] = kAtLower;
      else if (upper_[j] < kInf) vstat_[j] = kAtUpper;
      else vstat_[j] = kFree;
    }
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      vstat_[n_ + i] = kBasic;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    pivots_since_refactor_ = 0;
  }

  double nonbasic_value(int j) const {
    switch (vstat_[j]) {
      case kAtLower: return lower_[j];
      case kAtUpper: return upper_[j];
      default: return 0.0;
    }
  }

  void compute_basic_values() {
    // xb = Binv * (b - N x_N)
    std::vector<double> r = rhs_;
    for (int j = 0; j < n_total_; ++j) {
      if (vstat_[j] == kBasic) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (auto [row, coef] : cols_[j]) r[row] -= coef * v;
    }
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) s += bi[k] * r[k];
      xb_[i] = s;
    }
  }

  bool refactorize() {
    // invert the basis matrix by Gauss-Jordan with partial pivoting
    std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i)
      for (auto [row, coef] : cols_[basic_[i]])
        a[static_cast<std::size_t>(row) * m_ + i] = coef;
    std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
    for (int col = 0; col < m_; ++col) {
      int piv = col;
      double best = std::abs(a[static_cast<std::size_t>(col) * m_ + col]);
      for (int i = col + 1; i < m_; ++i) {
        const double v = std::abs(a[static_cast<std::size_t>(i) * m_ + col]);
        if (v > best) { best = v; piv = i; }
      }
      if (best < 1e-12) return false;
      if (piv != col) {
        for (int k = 0; k < m_; ++k) {
          std::swap(a[static_cast<std::size_t>(piv) * m_ + k],
                    a[static_cast<std::size_t>(col) * m_ + k]);
          std::swap(inv[static_cast<std::size_t>(piv) * m_ + k],
                    inv[static_cast<std::size_t>(col) * m_ + k]);
        }
      }
      const double d = a[static_cast<std::size_t>(col) * m_ + col];
      for (int k = 0; k < m_; ++k) {
        a[static_cast<std::size_t>(col) * m_ + k] /= d;
        inv[static_cast<std::size_t>(col) * m_ + k] /= d;
      }
      for (int i = 0; i < m_; ++i) {
        if (i == col) continue;
        const double f = a[static_cast<std::size_t>(i) * m_ + col];
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          a[static_cast<std::size_t>(i) * m_ + k] -=
              f * a[static_cast<std::size_t>(col) * m_ + k];
          inv[static_cast<std::size_t>(i) * m_ + k] -=
              f * inv[static_cast<std::size_t>(col) * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);
    pivots_since_refactor_ = 0;
    return true;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (xb_[i] < lower_[j]) s += lower_[j] - xb_[i];
      if (xb_[i] > upper_[j]) s += xb_[i] - upper_[j];
    }
    return s;
  }

  // y = d_B^T * Binv
  void price(const std::vector<double>& db, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double d = db[i];
      if (d == 0.0) continue;
      const double* bi = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) y[k] += d * bi[k];
    }
  }

  double reduced_cost(int j, const std::vector<double>& y, double cj) const {
    double z = cj;
    for (auto [row, coef] : cols_[j]) z -= y[row] * coef;
    return z;
  }

  RunOutcome run_phase(int phase) {
    std::vector<double> db(m_), y, w(m_);
    while (true) {
      if (iters_ >= opts_.max_iters) return RunOutcome::IterLimit;

      // phase-1 cost drives infeasible basics back into their boxes
      bool any_infeasible = false;
      for (int i = 0; i < m_; ++i) {
        const int j = basic_[i];
        if (xb_[i] < lower_[j] - opts_.feas_tol) { db[i] = -1.0; any_infeasible = true; }
        else if (xb_[i] > upper_[j] + opts_.feas_tol) { db[i] = 1.0; any_infeasible = true; }
        else db[i] = 0.0;
      }
      if (phase == 1) {
        if (!any_infeasible) return RunOutcome::Done;
      } else {
        for (int i = 0; i < m_; ++i) db[i] = cost_[basic_[i]];
      }
      price(db, y);

      // entering variable: Dantzig, Bland fallback under degeneracy
      const bool bland = degen_streak_ >= opts_.bland_streak;
      int enter = -1, dir = 0;
      double best = opts_.opt_tol;
      for (int j = 0; j < n_total_; ++j) {
        const int8_t st = vstat_[j];
        if (st == kBasic) continue;
        const double cj = phase == 1 ? 0.0 : cost_[j];
        const double z = reduced_cost(j, y, cj);
        int d = 0;
        if ((st == kAtLower || st == kFree) && z < -opts_.opt_tol) d = 1;
        else if ((st == kAtUpper || st == kFree) && z > opts_.opt_tol) d = -1;
        if (d == 0) continue;
        if (bland) { enter = j; dir = d; break; }
        if (std::abs(z) > best) { best = std::abs(z); enter = j; dir = d; }
      }
      if (enter < 0) {
        if (phase == 1) return RunOutcome::Done;  // infeasibility is minimal
        return RunOutcome::Done;                  // optimal
      }

      // w = Binv * A_enter
      std::fill(w.begin(), w.end(), 0.0);
      for (auto [row, coef] : cols_[enter])
        for (int i = 0; i < m_; ++i)
          w[i] += binv_[static_cast<std::size_t>(i) * m_ + row] * coef;

      // ratio test; basics change at rate -dir*w_i per unit step
      double step = kInf;
      int leave = -1;       // row index
      int8_t leave_stat = kAtLower;
      const double span = upper_[enter] - lower_[enter];  // own bound flip
      for (int i = 0; i < m_; ++i) {
        if (std::abs(w[i]) < opts_.pivot_tol) continue;
        const int j = basic_[i];
        const double delta = -dir * w[i];
        double limit = kInf;
        int8_t stat = kAtLower;
        const bool below = xb_[i] < lower_[j] - opts_.feas_tol;
        const bool above = xb_[i] > upper_[j] + opts_.feas_tol;
        if (phase == 1 && below) {
          if (delta > 0) { limit = (lower_[j] - xb_[i]) / delta; stat = kAtLower; }
        } else if (phase == 1 && above) {
          if (delta < 0) { limit = (upper_[j] - xb_[i]) / delta; stat = kAtUpper; }
        } else {
          if (delta > 0 && upper_[j] < kInf) {
            limit = (upper_[j] - xb_[i]) / delta; stat = kAtUpper;
          } else if (delta < 0 && lower_[j] > -kInf) {
            limit = (lower_[j] - xb_[i]) / delta; stat = kAtLower;
          }
        }
        if (limit < -opts_.feas_tol) limit = 0.0;  // guard tiny negatives
        if (limit < 0.0) limit = 0.0;
        if (limit < step - 1e-12 ||
            (limit < step + 1e-12 && leave >= 0 && j < basic_[leave])) {
          step = limit;
          leave = i;
          leave_stat = stat;
        }
      }

      ++iters_;
      if (span < step) {
        // bound flip, basis unchanged
        if (span == kInf) return phase == 2 ? RunOutcome::Unbounded
                                            : RunOutcome::Numerical;
        for (int i = 0; i < m_; ++i) xb_[i] -= dir * span * w[i];
        vstat_[enter] = vstat_[enter] == kAtLower ? kAtUpper : kAtLower;
        degen_streak_ = 0;
        continue;
      }
      if (leave < 0) {
        if (span < kInf) {  // flip is the only limit
          for (int i = 0; i < m_; ++i) xb_[i] -= dir * span * w[i];
          vstat_[enter] = vstat_[enter] == kAtLower ? kAtUpper : kAtLower;
          degen_streak_ = 0;
          continue;
        }
        return phase == 2 ? RunOutcome::Unbounded : RunOutcome::Numerical;
      }

      if (step <= 1e-12) ++degen_streak_; else degen_streak_ = 0;

      const double enter_val = nonbasic_value(enter) + dir * step;
      for (int i = 0; i < m_; ++i) xb_[i] -= dir * step * w[i];
      const int out = basic_[leave];
      vstat_[out] = leave_stat;
      basic_[leave] = enter;
      vstat_[enter] = kBasic;
      xb_[leave] = enter_val;

      // product-form update of the dense inverse
      const double piv = w[leave];
      double* br = &binv_[static_cast<std::size_t>(leave) * m_];
      for (int k = 0; k < m_; ++k) br[k] /= piv;
      for (int i = 0; i < m_; ++i) {
        if (i == leave) continue;
        const double f = w[i];
        if (f == 0.0) continue;
        double* bi = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) bi[k] -= f * br[k];
      }
      if (++pivots_since_refactor_ >= opts_.refactor_interval) {
        if (!refactorize()) return RunOutcome::Numerical;
        compute_basic_values();
      }
    }
  }

  LpResult finish(const LinearProgram& lp, LpResult& res, LpStatus status) {
    res.status = status;
    res.iterations = iters_;
    std::vector<double> full(n_total_, 0.0);
    for (int j = 0; j < n_total_; ++j)
      if (vstat_[j] != kBasic) full[j] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i) full[basic_[i]] = xb_[i];
    for (int j = 0; j < n_; ++j) {
      double v = full[j];
      // clamp round-off within tolerance back onto the box
      if (lower_[j] > -kInf && v < lower_[j] && v > lower_[j] - opts_.feas_tol)
        v = lower_[j];
      if (upper_[j] < kInf && v > upper_[j] && v < upper_[j] + opts_.feas_tol)
        v = upper_[j];
      res.primal[j] = v;
    }
    double obj = obj_const_;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * res.primal[j];
    res.objective = obj;
    if (status == LpStatus::Optimal || status == LpStatus::IterationLimit) {
      std::vector<double> db(m_), y;
      for (int i = 0; i < m_; ++i) db[i] = cost_[basic_[i]];
      price(db, y);
      for (int i = 0; i < m_; ++i) res.duals[i] = y[i];
    }
    (void)lp;
    return res;
  }
};

inline LpResult solve_lp(const LinearProgram& lp, SimplexOptions opts = {},
                         const SimplexBasis* warm = nullptr) {
  SimplexSolver solver(opts);
  return solver.solve(lp, warm);
}

}  // namespace gridswitch
