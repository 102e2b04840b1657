#pragma once

// Asynchronous master/worker architecture. Rank 0 solves the full switching
// MILP; each worker rank iterates the priority-guided heuristic, exchanging
// incumbents and lifted solutions over the in-process bus. Runs either on
// real threads against the wall clock or single-threaded on a simulated
// clock with a deterministic interleaving.

#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gridswitch/branchbound.hpp"
#include "gridswitch/bus.hpp"
#include "gridswitch/clock.hpp"
#include "gridswitch/criteria.hpp"
#include "gridswitch/model.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/simplex.hpp"

namespace gridswitch {

struct WorkerConfig {
  int n0 = 40;          // initial |E^S|
  int delta_n = 10;     // lines added per iteration
  double update_time = 10.0;            // s, incumbent/status poll period
  double reset_time = 20.0;             // s, abort-condition check period
  double no_improvement_window = 20.0;  // s without a new inner incumbent
};

struct TraceRecord {
  double elapsed = 0.0;
  int rank = 0;
  std::string kind;  // ub | lb | incumbent-src | iteration
  double value = 0.0;
  double objective = 0.0;
};

class TraceLog {
 public:
  void add(TraceRecord rec) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_.push_back(std::move(rec));
  }
  std::vector<TraceRecord> records() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return records_;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<TraceRecord> records_;
};

inline void write_trace_csv(std::ostream& os,
                            const std::vector<TraceRecord>& records) {
  os << "elapsed_s,rank,kind,value,objective\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%.6f,%d,%s,%.9g,%.9g\n", r.elapsed,
                  r.rank, r.kind.c_str(), r.value, r.objective);
    os << buf;
  }
}

struct WorkerStats {
  long iterations = 0;       // completed passes of the heuristic loop
  long solutions_sent = 0;
};

struct RunReport {
  MipResult master;
  std::vector<TraceRecord> trace;
  std::vector<WorkerStats> workers;
  long injections_accepted = 0;
  long injections_rejected = 0;
};

// maps a full-network point onto a model's column layout via tags
inline std::vector<double> solution_to_primal(const LinearProgram& lp,
                                              const OtspSolution& sol) {
  std::vector<double> primal(lp.num_vars(), 0.0);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const Tag& t = lp.vars[j].tag;
    switch (t.kind) {
      case TagKind::Generation: primal[j] = sol.generation[t.id]; break;
      case TagKind::Angle: primal[j] = sol.theta[t.id]; break;
      case TagKind::Flow: primal[j] = sol.flow[t.id]; break;
      case TagKind::Switch: primal[j] = sol.status[t.id]; break;
      default: break;
    }
  }
  return primal;
}

struct MasterOptions {
  BnbOptions bnb;
  double check_tol = 1e-6;  // re-verification of received solutions
  std::optional<std::vector<int>> mipstart;  // for the OTSP_x0 strategy
};

class MasterTask {
 public:
  MasterTask(const Network& net, MasterOptions opts, MessageBus& bus,
             const Clock& clock, TraceLog& trace)
      : net_(&net), opts_(std::move(opts)), bus_(&bus), clock_(&clock),
        trace_(&trace) {
    mip_ = build_otsp(net);
    if (opts_.mipstart) mip_.set_mipstart(*opts_.mipstart);
    lifting_mip_ = mip_;  // solver owns its copy; keep one for lifting
    solver_ = std::make_unique<BnbSolver>(
        mip_, opts_.bnb, clock,
        [this](const SolverEvent& ev) { on_event(ev); });
  }

  bool step() {
    if (done_) return false;
    for (auto& msg : bus_->drain_solutions()) receive_solution(msg);
    if (!solver_->step()) {
      done_ = true;
      bus_->broadcast_status(true, clock_->now());
      return false;
    }
    return true;
  }

  bool done() const { return done_; }
  MipResult result() const { return solver_->result(); }
  long injections_accepted() const { return injections_accepted_; }
  long injections_rejected() const { return injections_rejected_; }

 private:
  const Network* net_;
  MasterOptions opts_;
  MessageBus* bus_;
  const Clock* clock_;
  TraceLog* trace_;
  MixedIntegerProgram mip_;
  MixedIntegerProgram lifting_mip_;
  std::unique_ptr<BnbSolver> solver_;
  bool done_ = false;
  long injections_accepted_ = 0;
  long injections_rejected_ = 0;

  void receive_solution(const Message& msg) {
    // never trust the wire: re-verify against the full model
    if (!check_feasible(*net_, msg.payload, opts_.check_tol).empty()) {
      ++injections_rejected_;
      return;
    }
    const auto primal = solution_to_primal(lifting_mip_.lp, msg.payload);
    if (solver_->inject(primal) == InjectOutcome::Accepted)
      ++injections_accepted_;
    else
      ++injections_rejected_;
  }

  void on_event(const SolverEvent& ev) {
    const double t = clock_->now();
    switch (ev.kind) {
      case SolverEvent::Kind::NewIncumbent: {
        trace_->add({t, 0, "ub", ev.objective, ev.objective});
        trace_->add({t, 0, "incumbent-src",
                     static_cast<double>(static_cast<int>(ev.source)),
                     ev.objective});
        Message msg;
        msg.tag = MsgTag::Incumbent;
        msg.sender = 0;
        msg.timestamp = t;
        msg.objective = ev.objective;
        msg.payload = lift_rotsp(*net_, Topology::all(*net_),
                                 SwitchSet::all(*net_), lifting_mip_,
                                 ev.primal, ev.objective);
        bus_->broadcast_incumbent(msg);
        break;
      }
      case SolverEvent::Kind::BoundImproved:
        trace_->add({t, 0, "lb", ev.lb, ev.lb});
        break;
      case SolverEvent::Kind::Heartbeat:
        break;
      default:
        break;
    }
  }
};

class WorkerTask {
 public:
  WorkerTask(const Network& net, WorkerConfig cfg, int rank, MessageBus& bus,
             const Clock& clock, TraceLog& trace, BnbOptions inner_opts = {})
      : net_(&net), cfg_(cfg), rank_(rank), bus_(&bus), clock_(&clock),
        trace_(&trace), inner_opts_(inner_opts) {
    n_ = cfg.n0;
    ea_ = Topology::all(net);
  }

  // One bounded unit of work. Returns false once the worker has stopped.
  bool step() {
    switch (state_) {
      case State::Init: return do_init();
      case State::Solving: return do_solve_step();
      case State::Reprioritize: return do_reprioritize();
      case State::Done: return false;
    }
    return false;
  }

  bool done() const { return state_ == State::Done; }
  const WorkerStats& stats() const { return stats_; }

 private:
  enum class State { Init, Solving, Reprioritize, Done };

  const Network* net_;
  WorkerConfig cfg_;
  int rank_;
  MessageBus* bus_;
  const Clock* clock_;
  TraceLog* trace_;
  BnbOptions inner_opts_;

  State state_ = State::Init;
  int n_ = 0;
  Topology ea_;
  SwitchSet es_;
  PriorityList priority_;
  bool have_priority_ = false;
  std::vector<int> mipstart_;
  double ub_master_ = std::numeric_limits<double>::infinity();
  std::optional<OtspSolution> master_incumbent_;

  MixedIntegerProgram inner_mip_;
  std::unique_ptr<BnbSolver> inner_;
  double last_update_ = 0.0;
  double last_reset_ = 0.0;
  double last_inner_incumbent_ = 0.0;
  WorkerStats stats_;

  bool do_init() {
    // startup: validate the all-active topology, ship its lift,
    // keep x' as mipstart, and derive the first priority list.
    ea_ = Topology::all(*net_);
    const LinearProgram lp = build_sdcopf(*net_, ea_);
    const LpResult res = solve_lp(lp, inner_opts_.lp);
    if (res.status != LpStatus::Optimal) {
      state_ = State::Done;  // grid infeasible even with every line closed
      return false;
    }
    const OtspSolution lifted = lift_sdcopf(*net_, ea_, lp, res);
    send_solution(lifted);
    mipstart_ = lifted.status;
    const DcopfPoint pt = extract_dcopf(*net_, lp, res);
    priority_ = build_priority_list(lpsc(*net_, lifted.flow, pt.price));
    have_priority_ = true;
    es_ = select_switchable(priority_, static_cast<std::size_t>(n_));
    poll_master();
    start_inner();
    state_ = State::Solving;
    return true;
  }

  bool do_solve_step() {
    const double now = clock_->now();
    if (now - last_update_ >= cfg_.update_time) {
      last_update_ = now;
      poll_master();
      if (bus_->poll_status()) {
        state_ = State::Done;
        return false;
      }
    }
    if (now - last_reset_ >= cfg_.reset_time) {
      last_reset_ = now;
      const bool dominated = inner_->lower_bound() >= ub_master_ - 1e-9;
      const bool stalled =
          now - last_inner_incumbent_ >= cfg_.no_improvement_window;
      if (dominated || stalled) inner_->cancel();
    }
    if (!inner_->step()) state_ = State::Reprioritize;
    return true;
  }

  bool do_reprioritize() {
    ++stats_.iterations;
    trace_->add({clock_->now(), rank_, "iteration",
                 static_cast<double>(stats_.iterations), 0.0});
    poll_master();
    if (bus_->poll_status()) {
      state_ = State::Done;
      return false;
    }
    n_ = std::min(n_ + cfg_.delta_n, static_cast<int>(net_->num_branches()));
    if (master_incumbent_)
      ea_ = Topology::from_vector(master_incumbent_->status);
    // fresh duals on the updated topology; on infeasibility keep the
    // previous list (duals only exist when the static model has a solution)
    const LinearProgram lp = build_sdcopf(*net_, ea_);
    const LpResult res = solve_lp(lp, inner_opts_.lp);
    if (res.status == LpStatus::Optimal) {
      const OtspSolution lifted = lift_sdcopf(*net_, ea_, lp, res);
      const DcopfPoint pt = extract_dcopf(*net_, lp, res);
      priority_ = build_priority_list(lpsc(*net_, lifted.flow, pt.price));
    }
    es_ = select_switchable(priority_, static_cast<std::size_t>(n_));
    refresh_mipstart();
    start_inner();
    state_ = State::Solving;
    return true;
  }

  void poll_master() {
    if (auto msg = bus_->poll_incumbent(rank_ - 1)) {
      ub_master_ = msg->objective;
      master_incumbent_ = msg->payload;
      ea_ = Topology::from_vector(msg->payload.status);
      refresh_mipstart();
    }
  }

  void refresh_mipstart() {
    mipstart_.clear();
    const auto indicator = ea_.indicator();
    for (int e : es_.ids()) mipstart_.push_back(indicator[e]);
  }

  void start_inner() {
    if (mipstart_.size() != es_.size()) refresh_mipstart();
    inner_mip_ = build_rotsp(*net_, ea_, es_, mipstart_);
    inner_ = std::make_unique<BnbSolver>(
        inner_mip_, inner_opts_, *clock_,
        [this](const SolverEvent& ev) { on_inner_event(ev); });
    const double now = clock_->now();
    last_update_ = now;
    last_reset_ = now;
    last_inner_incumbent_ = now;
  }

  void on_inner_event(const SolverEvent& ev) {
    if (ev.kind != SolverEvent::Kind::NewIncumbent) return;
    last_inner_incumbent_ = clock_->now();
    if (ev.objective >= ub_master_ - 1e-9) return;
    const OtspSolution lifted =
        lift_rotsp(*net_, ea_, es_, inner_mip_, ev.primal, ev.objective);
    if (!check_feasible(*net_, lifted).empty()) return;  // never ship junk
    send_solution(lifted);
  }

  void send_solution(const OtspSolution& sol) {
    Message msg;
    msg.tag = MsgTag::Solution;
    msg.sender = rank_;
    msg.timestamp = clock_->now();
    msg.objective = sol.objective;
    msg.payload = sol;
    bus_->send_solution(std::move(msg));
    ++stats_.solutions_sent;
  }
};

enum class ClockMode { Wall, Simulated };

struct ParallelOptions {
  MasterOptions master;
  std::vector<WorkerConfig> workers;
  BnbOptions worker_bnb;
  ClockMode clock = ClockMode::Wall;
  double sim_tick = 1e-3;  // virtual seconds per task step
  unsigned seed = 0;
};

inline RunReport run_parallel(const Network& net, ParallelOptions opts) {
  const int num_workers = static_cast<int>(opts.workers.size());
  MessageBus bus(num_workers);
  TraceLog trace;
  RunReport report;

  auto run_with = [&](const Clock& clock, auto&& drive) {
    MasterTask master(net, opts.master, bus, clock, trace);
    std::vector<std::unique_ptr<WorkerTask>> workers;
    for (int j = 0; j < num_workers; ++j)
      workers.push_back(std::make_unique<WorkerTask>(
          net, opts.workers[j], j + 1, bus, clock, trace, opts.worker_bnb));
    drive(master, workers);
    report.master = master.result();
    report.injections_accepted = master.injections_accepted();
    report.injections_rejected = master.injections_rejected();
    for (auto& w : workers) report.workers.push_back(w->stats());
  };

  if (opts.clock == ClockMode::Simulated) {
    SimulatedClock clock;
    // deterministic round-robin: one master step then one step per worker,
    // each advancing virtual time by one tick
    run_with(clock, [&](MasterTask& master, auto& workers) {
      bool live = true;
      while (live) {
        live = false;
        if (!master.done()) {
          master.step();
          live = true;
        }
        clock.advance(opts.sim_tick);
        for (auto& w : workers) {
          if (!w->done()) {
            w->step();
            live = live || !w->done();
          }
          clock.advance(opts.sim_tick);
        }
        if (master.done()) {
          // let workers observe termination; they stop within one
          // update_time of virtual clock
          bool workers_live = false;
          for (auto& w : workers) workers_live = workers_live || !w->done();
          live = workers_live;
        }
      }
    });
  } else {
    WallClock clock;
    run_with(clock, [&](MasterTask& master, auto& workers) {
      std::vector<std::thread> threads;
      for (auto& w : workers)
        threads.emplace_back([&w] { while (w->step()) {} });
      while (master.step()) {}
      for (auto& t : threads) t.join();
    });
  }

  report.trace = trace.records();
  return report;
}

// degenerate architecture: no workers, plain solve with optional mipstart
inline RunReport run_single(const Network& net, MasterOptions opts,
                            ClockMode mode = ClockMode::Wall,
                            double sim_tick = 1e-3) {
  ParallelOptions popts;
  popts.master = std::move(opts);
  popts.clock = mode;
  popts.sim_tick = sim_tick;
  return run_parallel(net, popts);
}

}  // namespace gridswitch
