#pragma once

// LP-based branch and bound with best-bound node selection, mipstart
// acceptance, a root rounding heuristic, and asynchronous incumbent
// injection polled at node boundaries.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridswitch/clock.hpp"
#include "gridswitch/lp.hpp"
#include "gridswitch/simplex.hpp"

namespace gridswitch {

class UndefinedGap : public std::runtime_error {
 public:
  UndefinedGap() : std::runtime_error("gap undefined: bound missing or ~0") {}
};

// gap = 100 |ub - lb| / |lb|, guarded against a vanishing denominator
inline double gap_percent(double ub, double lb, double lb_guard = 1e-9) {
  if (!std::isfinite(ub) || !std::isfinite(lb)) throw UndefinedGap();
  if (std::abs(lb) <= lb_guard) throw UndefinedGap();
  return 100.0 * std::abs(ub - lb) / std::abs(lb);
}

enum class MipStatus { Optimal, Feasible, Infeasible };
enum class IncumbentSource { Branching, Heuristic, Injected };
enum class InjectOutcome { Accepted, RejectedInfeasible, RejectedNotBetter,
                           HandleClosed };

struct SolverEvent {
  enum class Kind { NewIncumbent, BoundImproved, Heartbeat, RejectedStart,
                    Finished };
  Kind kind;
  double time = 0.0;
  double objective = 0.0;  // NewIncumbent
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  IncumbentSource source = IncumbentSource::Branching;
  std::vector<double> primal;  // NewIncumbent only
};

using EventSink = std::function<void(const SolverEvent&)>;

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  std::optional<std::vector<double>> incumbent;
  double objective = std::numeric_limits<double>::infinity();     // ub
  double lower_bound = -std::numeric_limits<double>::infinity();  // lb
  double gap = std::numeric_limits<double>::infinity();           // percent
  long nodes = 0;
  double wall_time = 0.0;
};

struct BnbOptions {
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  double gap_tol = 0.01;  // percent; run is optimal at gap <= gap_tol
  long node_limit = -1;   // < 0: unlimited
  double int_tol = 1e-6;
  double prune_tol = 1e-9;
  double inject_tol = 1e-6;
  double heartbeat_interval = 1.0;  // seconds
  bool root_heuristic = true;       // rounding + LP repair at the root
  SimplexOptions lp;
};

class BnbSolver {
 public:
  BnbSolver(MixedIntegerProgram mip, BnbOptions opts, const Clock& clock,
            EventSink sink = nullptr)
      : mip_(std::move(mip)), opts_(opts), clock_(&clock),
        sink_(std::move(sink)), start_(clock.now()) {
    last_heartbeat_ = start_;
    Node root;
    root.id = next_node_id_++;
    root.bound = -std::numeric_limits<double>::infinity();
    open_.push(std::move(root));
  }

  double upper_bound() const { return ub_.load(); }
  double lower_bound() const { return lb_; }
  long node_count() const { return nodes_; }
  bool finished() const { return finished_; }

  // Thread-safe. Verifies the candidate against every row and bound; accepts
  // iff feasible and strictly better than the current incumbent, atomically
  // updating the upper bound. Never loosens the bound.
  InjectOutcome inject(const std::vector<double>& primal) {
    if (finished_) return InjectOutcome::HandleClosed;
    if (!is_feasible_point(primal)) return InjectOutcome::RejectedInfeasible;
    const double obj = point_objective(primal);
    std::lock_guard<std::mutex> lock(incumbent_mutex_);
    if (obj >= ub_.load() - opts_.prune_tol)
      return InjectOutcome::RejectedNotBetter;
    incumbent_ = primal;
    ub_.store(obj);
    pending_injections_.push_back(obj);
    return InjectOutcome::Accepted;
  }

  void cancel() { cancelled_.store(true); }

  // Process bookkeeping and at most one node. Returns false once finished.
  bool step() {
    if (finished_) return false;
    drain_injections();
    maybe_heartbeat();

    if (!did_init_) {
      did_init_ = true;
      if (mip_.mipstart) consume_mipstart();
    }

    const double elapsed = clock_->now() - start_;
    if (cancelled_.load() || elapsed >= opts_.time_limit ||
        (opts_.node_limit >= 0 && nodes_ >= opts_.node_limit)) {
      finish(/*exhausted=*/false);
      return false;
    }
    if (open_.empty()) {
      finish(/*exhausted=*/true);
      return false;
    }

    Node node = open_.top();
    open_.pop();
    // the popped node is still unexplored; its bound keeps capping lb
    raise_lb(std::min(node.bound, frontier_bound()));
    if (node.bound >= ub_.load() - opts_.prune_tol) {
      // whole frontier is dominated under best-bound order
      while (!open_.empty()) open_.pop();
      finish(/*exhausted=*/true);
      return false;
    }

    ++nodes_;
    LpResult lp = solve_node(node);
    if (lp.status == LpStatus::Infeasible) return !check_gap_done();
    if (lp.status != LpStatus::Optimal) {
      // numerical trouble: drop the node conservatively after a cold retry
      // inside solve_node; treat as pruned
      return !check_gap_done();
    }
    if (lp.objective >= ub_.load() - opts_.prune_tol)
      return !check_gap_done();

    const int frac = most_fractional_binary(lp.primal);
    if (frac < 0) {
      offer_incumbent(lp.primal, lp.objective, IncumbentSource::Branching);
      return !check_gap_done();
    }

    if (node.id == 0 && opts_.root_heuristic) root_rounding(lp.primal);

    const SimplexBasis basis = last_basis_;
    for (int v : {0, 1}) {
      Node child;
      child.id = next_node_id_++;
      child.bound = lp.objective;
      child.fixings = node.fixings;
      child.fixings.push_back({mip_.binaries[frac], v});
      child.basis = basis;
      open_.push(std::move(child));
    }
    update_lb();
    return !check_gap_done();
  }

  MipResult run() {
    while (step()) {}
    return result();
  }

  MipResult result() const {
    MipResult r;
    r.nodes = nodes_;
    r.wall_time = clock_->now() - start_;
    r.lower_bound = lb_;
    r.objective = ub_.load();
    {
      std::lock_guard<std::mutex> lock(incumbent_mutex_);
      if (!incumbent_.empty()) r.incumbent = incumbent_;
    }
    if (!r.incumbent) {
      r.status = MipStatus::Infeasible;
      return r;
    }
    try {
      r.gap = gap_percent(r.objective, r.lower_bound);
    } catch (const UndefinedGap&) {
      r.gap = std::numeric_limits<double>::infinity();
    }
    r.status = r.gap <= opts_.gap_tol ? MipStatus::Optimal : MipStatus::Feasible;
    return r;
  }

 private:
  struct Node {
    long id = 0;
    double bound = 0.0;
    std::vector<std::pair<int, int>> fixings;  // (column, value)
    SimplexBasis basis;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
      return a.id > b.id;
    }
  };

  MixedIntegerProgram mip_;
  BnbOptions opts_;
  const Clock* clock_;
  EventSink sink_;
  double start_ = 0.0;
  double last_heartbeat_ = 0.0;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  long next_node_id_ = 0;
  long nodes_ = 0;
  double lb_ = -std::numeric_limits<double>::infinity();
  std::atomic<double> ub_{std::numeric_limits<double>::infinity()};
  std::vector<double> incumbent_;
  mutable std::mutex incumbent_mutex_;
  std::vector<double> pending_injections_;
  std::atomic<bool> cancelled_{false};
  bool finished_ = false;
  bool did_init_ = false;
  SimplexBasis last_basis_;

  void emit(SolverEvent ev) {
    ev.time = clock_->now() - start_;
    ev.ub = ub_.load();
    ev.lb = lb_;
    if (sink_) sink_(ev);
  }

  void maybe_heartbeat() {
    const double now = clock_->now();
    if (now - last_heartbeat_ >= opts_.heartbeat_interval) {
      last_heartbeat_ = now;
      emit({SolverEvent::Kind::Heartbeat});
    }
  }

  void drain_injections() {
    std::vector<double> objs;
    {
      std::lock_guard<std::mutex> lock(incumbent_mutex_);
      objs.swap(pending_injections_);
    }
    for (double obj : objs) {
      SolverEvent ev{SolverEvent::Kind::NewIncumbent};
      ev.objective = obj;
      ev.source = IncumbentSource::Injected;
      {
        std::lock_guard<std::mutex> lock(incumbent_mutex_);
        ev.primal = incumbent_;
      }
      emit(std::move(ev));
    }
  }

  double point_objective(const std::vector<double>& primal) const {
    double obj = mip_.lp.objective_const;
    for (std::size_t j = 0; j < primal.size(); ++j)
      obj += mip_.lp.objective[j] * primal[j];
    return obj;
  }

  bool is_feasible_point(const std::vector<double>& primal) const {
    if (primal.size() != mip_.lp.num_vars()) return false;
    const double tol = opts_.inject_tol;
    for (std::size_t j = 0; j < primal.size(); ++j) {
      const auto& v = mip_.lp.vars[j];
      if (primal[j] < v.lower - tol || primal[j] > v.upper + tol) return false;
    }
    for (int col : mip_.binaries) {
      const double v = primal[col];
      if (std::abs(v - std::round(v)) > tol) return false;
    }
    for (const auto& row : mip_.lp.rows) {
      double lhs = 0.0;
      for (auto [col, coef] : row.coeffs) lhs += coef * primal[col];
      switch (row.sense) {
        case RowSense::LessEqual:
          if (lhs > row.rhs + tol) return false;
          break;
        case RowSense::GreaterEqual:
          if (lhs < row.rhs - tol) return false;
          break;
        case RowSense::Equal:
          if (std::abs(lhs - row.rhs) > tol) return false;
          break;
      }
    }
    return true;
  }

  // incumbent candidates found by the tree search or heuristics
  void offer_incumbent(const std::vector<double>& primal, double obj,
                       IncumbentSource source) {
    {
      std::lock_guard<std::mutex> lock(incumbent_mutex_);
      if (obj >= ub_.load() - opts_.prune_tol) return;
      incumbent_ = primal;
      ub_.store(obj);
    }
    SolverEvent ev{SolverEvent::Kind::NewIncumbent};
    ev.objective = obj;
    ev.source = source;
    ev.primal = primal;
    emit(std::move(ev));
  }

  LpResult solve_with_fixings(const std::vector<std::pair<int, int>>& fixings,
                              const SimplexBasis* warm) {
    std::vector<std::pair<int, std::pair<double, double>>> saved;
    for (auto [col, val] : fixings) {
      saved.push_back({col, {mip_.lp.vars[col].lower, mip_.lp.vars[col].upper}});
      mip_.lp.vars[col].lower = val;
      mip_.lp.vars[col].upper = val;
    }
    SimplexSolver solver(opts_.lp);
    LpResult res = solver.solve(mip_.lp, warm);
    if (res.status == LpStatus::NumericalFailure ||
        res.status == LpStatus::IterationLimit) {
      SimplexOptions retry = opts_.lp;
      retry.max_iters *= 4;
      SimplexSolver cold(retry);
      res = cold.solve(mip_.lp, nullptr);
      last_basis_ = cold.basis();
    } else {
      last_basis_ = solver.basis();
    }
    for (auto& [col, bounds] : saved) {
      mip_.lp.vars[col].lower = bounds.first;
      mip_.lp.vars[col].upper = bounds.second;
    }
    return res;
  }

  LpResult solve_node(const Node& node) {
    const SimplexBasis* warm =
        node.basis.basic.empty() ? nullptr : &node.basis;
    return solve_with_fixings(node.fixings, warm);
  }

  int most_fractional_binary(const std::vector<double>& primal) const {
    int best = -1;
    double best_frac = opts_.int_tol;
    for (std::size_t k = 0; k < mip_.binaries.size(); ++k) {
      const double v = primal[mip_.binaries[k]];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        best = static_cast<int>(k);
      }
    }
    return best;
  }

  void consume_mipstart() {
    std::vector<std::pair<int, int>> fixings;
    for (std::size_t k = 0; k < mip_.binaries.size(); ++k)
      fixings.push_back({mip_.binaries[k], (*mip_.mipstart)[k]});
    LpResult res = solve_with_fixings(fixings, nullptr);
    if (res.status == LpStatus::Optimal) {
      offer_incumbent(res.primal, res.objective, IncumbentSource::Heuristic);
    } else {
      emit({SolverEvent::Kind::RejectedStart});
    }
  }

  void root_rounding(const std::vector<double>& root_primal) {
    std::vector<std::pair<int, int>> fixings;
    for (int col : mip_.binaries)
      fixings.push_back({col, root_primal[col] >= 0.5 ? 1 : 0});
    LpResult res = solve_with_fixings(fixings, nullptr);
    if (res.status == LpStatus::Optimal)
      offer_incumbent(res.primal, res.objective, IncumbentSource::Heuristic);
  }

  double frontier_bound() const {
    return open_.empty() ? std::numeric_limits<double>::infinity()
                         : open_.top().bound;
  }

  // lb is the least unexplored bound, capped by ub once the tree thins out
  void raise_lb(double frontier) {
    const double lb = std::min(frontier, ub_.load());
    if (std::isfinite(lb) && lb > lb_ + 1e-15) {
      lb_ = lb;
      emit({SolverEvent::Kind::BoundImproved});
    }
  }

  void update_lb() { raise_lb(frontier_bound()); }

  bool check_gap_done() {
    const double ub = ub_.load();
    if (std::isfinite(ub) && std::isfinite(lb_)) {
      try {
        if (gap_percent(ub, lb_) <= opts_.gap_tol) {
          finish(/*exhausted=*/false);
          return true;
        }
      } catch (const UndefinedGap&) {}
    }
    return false;
  }

  void finish(bool exhausted) {
    if (finished_) return;
    drain_injections();
    if (exhausted) {
      const double ub = ub_.load();
      if (std::isfinite(ub) && ub > lb_) {
        lb_ = ub;  // tree exhausted: the incumbent is proven optimal
        emit({SolverEvent::Kind::BoundImproved});
      }
    }
    finished_ = true;
    emit({SolverEvent::Kind::Finished});
  }
};

// One-shot convenience wrapper.
inline MipResult solve_milp(MixedIntegerProgram mip, BnbOptions opts = {},
                            EventSink sink = nullptr) {
  WallClock clock;
  BnbSolver solver(std::move(mip), opts, clock, std::move(sink));
  return solver.run();
}

}  // namespace gridswitch
