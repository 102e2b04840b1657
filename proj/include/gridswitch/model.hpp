#pragma once

// Builders for the three switching models, big-M computation, solution
// lifting back to the full network, and the full-model feasibility check.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridswitch/lp.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/simplex.hpp"

namespace gridswitch {

// Bounds |b_e (theta_f - theta_t) - f_e| over the whole variable box, so the
// paired flow-definition rows are vacuous on an open line.
inline double big_m(const Network& net, int e) {
  const Branch& br = net.branches.at(static_cast<std::size_t>(e));
  return std::abs(br.susceptance) * (net.theta_max - net.theta_min) +
         br.capacity;
}

namespace detail {

// Shared scaffold: generation, angle and flow variables plus nodal balance
// over all lines that exist in the model.
struct ModelFrame {
  LinearProgram lp;
  std::vector<int> p_col;      // per generator
  std::vector<int> theta_col;  // per bus
  std::vector<int> f_col;      // per branch, -1 if absent
};

inline ModelFrame build_frame(const Network& net,
                              const std::vector<bool>& has_line) {
  ModelFrame fr;
  LinearProgram& lp = fr.lp;
  fr.p_col.resize(net.num_generators());
  fr.theta_col.resize(net.num_buses());
  fr.f_col.assign(net.num_branches(), -1);

  for (const auto& g : net.generators) {
    fr.p_col[g.id] =
        lp.add_variable("p_" + std::to_string(g.id), g.p_min, g.p_max,
                        g.cost_linear, {TagKind::Generation, g.id});
    lp.objective_const += g.cost_const;
  }
  for (const auto& b : net.buses)
    fr.theta_col[b.id] =
        lp.add_variable("th_" + std::to_string(b.id), net.theta_min,
                        net.theta_max, 0.0, {TagKind::Angle, b.id});
  for (const auto& e : net.branches)
    if (has_line[e.id])
      fr.f_col[e.id] =
          lp.add_variable("f_" + std::to_string(e.id), -e.capacity, e.capacity,
                          0.0, {TagKind::Flow, e.id});

  // nodal balance: inflow - outflow + generation = demand   [pi]
  for (const auto& b : net.buses) {
    Row row;
    row.tag = {TagKind::Balance, b.id};
    row.sense = RowSense::Equal;
    row.rhs = b.demand;
    for (int e : net.branches_to[b.id])
      if (has_line[e]) row.coeffs.push_back({fr.f_col[e], 1.0});
    for (int e : net.branches_from[b.id])
      if (has_line[e]) row.coeffs.push_back({fr.f_col[e], -1.0});
    for (int g : net.generators_at[b.id])
      row.coeffs.push_back({fr.p_col[g], 1.0});
    lp.add_row(std::move(row));
  }
  return fr;
}

}  // namespace detail

// sDCOPF(E^A): DC optimal power flow on a fixed topology.
inline LinearProgram build_sdcopf(const Network& net, const Topology& ea) {
  std::vector<bool> has_line(net.num_branches(), false);
  for (std::size_t e = 0; e < net.num_branches(); ++e)
    has_line[e] = ea.active(static_cast<int>(e));
  auto fr = detail::build_frame(net, has_line);
  for (const auto& br : net.branches) {
    if (!has_line[br.id]) continue;
    Row row;
    row.tag = {TagKind::FlowDefEq, br.id};
    row.sense = RowSense::Equal;
    row.rhs = 0.0;
    row.coeffs = {{fr.theta_col[br.from], br.susceptance},
                  {fr.theta_col[br.to], -br.susceptance},
                  {fr.f_col[br.id], -1.0}};
    fr.lp.add_row(std::move(row));
  }
  return fr.lp;
}

// rOTSP(E^A, E^S): switching restricted to E^S, everything else fixed to its
// status in E^A. No variable or row is emitted for lines outside E^A u E^S.
// E^S = E and E^A = E recovers the full switching MILP; E^S = {} recovers
// the static DCOPF.
inline MixedIntegerProgram build_rotsp(
    const Network& net, const Topology& ea, const SwitchSet& es,
    const std::optional<std::vector<int>>& mipstart = std::nullopt) {
  std::vector<bool> has_line(net.num_branches(), false);
  for (std::size_t e = 0; e < net.num_branches(); ++e)
    has_line[e] = ea.active(static_cast<int>(e)) ||
                  es.contains(static_cast<int>(e));

  auto fr = detail::build_frame(net, has_line);
  MixedIntegerProgram mip;

  // switching variables first, so binary ordering follows es.ids()
  std::vector<int> x_col(net.num_branches(), -1);
  for (int e : es.ids())
    x_col[e] = fr.lp.add_variable("x_" + std::to_string(e), 0.0, 1.0, 0.0,
                                  {TagKind::Switch, e});

  for (const auto& br : net.branches) {
    if (!has_line[br.id]) continue;
    if (!es.contains(br.id)) {
      // fixed-closed line: exact flow definition, boxed capacity
      Row row;
      row.tag = {TagKind::FlowDefEq, br.id};
      row.sense = RowSense::Equal;
      row.rhs = 0.0;
      row.coeffs = {{fr.theta_col[br.from], br.susceptance},
                    {fr.theta_col[br.to], -br.susceptance},
                    {fr.f_col[br.id], -1.0}};
      fr.lp.add_row(std::move(row));
      continue;
    }
    const double m = big_m(net, br.id);
    const int f = fr.f_col[br.id];
    const int x = x_col[br.id];
    {  // b*dtheta - f - M x >= -M
      Row row;
      row.tag = {TagKind::FlowDefLo, br.id};
      row.sense = RowSense::GreaterEqual;
      row.rhs = -m;
      row.coeffs = {{fr.theta_col[br.from], br.susceptance},
                    {fr.theta_col[br.to], -br.susceptance},
                    {f, -1.0},
                    {x, -m}};
      fr.lp.add_row(std::move(row));
    }
    {  // b*dtheta - f + M x <= M
      Row row;
      row.tag = {TagKind::FlowDefHi, br.id};
      row.sense = RowSense::LessEqual;
      row.rhs = m;
      row.coeffs = {{fr.theta_col[br.from], br.susceptance},
                    {fr.theta_col[br.to], -br.susceptance},
                    {f, -1.0},
                    {x, m}};
      fr.lp.add_row(std::move(row));
    }
    {  // f - fbar x <= 0
      Row row;
      row.tag = {TagKind::FlowCapHi, br.id};
      row.sense = RowSense::LessEqual;
      row.rhs = 0.0;
      row.coeffs = {{f, 1.0}, {x, -br.capacity}};
      fr.lp.add_row(std::move(row));
    }
    {  // f + fbar x >= 0
      Row row;
      row.tag = {TagKind::FlowCapLo, br.id};
      row.sense = RowSense::GreaterEqual;
      row.rhs = 0.0;
      row.coeffs = {{f, 1.0}, {x, br.capacity}};
      fr.lp.add_row(std::move(row));
    }
  }

  mip.lp = std::move(fr.lp);
  for (int e : es.ids()) mip.binaries.push_back(x_col[e]);
  if (mipstart) mip.set_mipstart(*mipstart);
  return mip;
}

// full switching MILP: every line active and switchable
inline MixedIntegerProgram build_otsp(const Network& net) {
  return build_rotsp(net, Topology::all(net), SwitchSet::all(net));
}

class SourceNotFeasible : public std::runtime_error {
 public:
  explicit SourceNotFeasible(const std::string& what)
      : std::runtime_error(what) {}
};

// primal values of a solved static DCOPF mapped back to grid entities
struct DcopfPoint {
  std::vector<double> generation;  // per generator
  std::vector<double> flow;        // per branch; 0 where the line is absent
  std::vector<double> theta;       // per bus
  std::vector<double> price;       // pi per bus, from balance-row duals
  double objective = 0.0;
};

inline DcopfPoint extract_dcopf(const Network& net, const LinearProgram& lp,
                                const LpResult& res) {
  DcopfPoint pt;
  pt.generation.assign(net.num_generators(), 0.0);
  pt.flow.assign(net.num_branches(), 0.0);
  pt.theta.assign(net.num_buses(), 0.0);
  pt.price.assign(net.num_buses(), 0.0);
  pt.objective = res.objective;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const Tag& t = lp.vars[j].tag;
    if (t.kind == TagKind::Generation) pt.generation[t.id] = res.primal[j];
    else if (t.kind == TagKind::Angle) pt.theta[t.id] = res.primal[j];
    else if (t.kind == TagKind::Flow) pt.flow[t.id] = res.primal[j];
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i)
    if (lp.rows[i].tag.kind == TagKind::Balance)
      pt.price[lp.rows[i].tag.id] = res.duals[i];
  return pt;
}

// A static DCOPF optimum becomes a full-model point by
// closing exactly the active lines and zeroing flow elsewhere.
inline OtspSolution lift_sdcopf(const Network& net, const Topology& ea,
                                const LinearProgram& lp, const LpResult& res) {
  if (res.status != LpStatus::Optimal)
    throw SourceNotFeasible("sDCOPF result is not optimal/feasible");
  const DcopfPoint pt = extract_dcopf(net, lp, res);
  OtspSolution sol;
  sol.generation = pt.generation;
  sol.theta = pt.theta;
  sol.flow.assign(net.num_branches(), 0.0);
  sol.status.assign(net.num_branches(), 0);
  for (std::size_t e = 0; e < net.num_branches(); ++e) {
    if (ea.active(static_cast<int>(e))) {
      sol.status[e] = 1;
      sol.flow[e] = pt.flow[e];
    }
  }
  sol.objective = res.objective;
  return sol;
}

// A restricted-model point becomes a full-model point.
// Switching decisions are taken from x* on E^S and from E^A elsewhere.
inline OtspSolution lift_rotsp(const Network& net, const Topology& ea,
                               const SwitchSet& es,
                               const MixedIntegerProgram& mip,
                               const std::vector<double>& primal,
                               double objective) {
  OtspSolution sol;
  sol.generation.assign(net.num_generators(), 0.0);
  sol.flow.assign(net.num_branches(), 0.0);
  sol.theta.assign(net.num_buses(), 0.0);
  sol.status.assign(net.num_branches(), 0);
  if (primal.size() != mip.lp.num_vars())
    throw SourceNotFeasible("restricted-model point has wrong shape");

  std::vector<double> x_val(net.num_branches(), -1.0);
  std::vector<double> f_val(net.num_branches(), 0.0);
  std::vector<bool> has_f(net.num_branches(), false);
  for (std::size_t j = 0; j < mip.lp.num_vars(); ++j) {
    const Tag& t = mip.lp.vars[j].tag;
    switch (t.kind) {
      case TagKind::Generation: sol.generation[t.id] = primal[j]; break;
      case TagKind::Angle: sol.theta[t.id] = primal[j]; break;
      case TagKind::Flow: f_val[t.id] = primal[j]; has_f[t.id] = true; break;
      case TagKind::Switch: x_val[t.id] = primal[j]; break;
      default: break;
    }
  }
  for (std::size_t e = 0; e < net.num_branches(); ++e) {
    const int id = static_cast<int>(e);
    if (es.contains(id)) {
      sol.status[e] = x_val[e] > 0.5 ? 1 : 0;
      sol.flow[e] = sol.status[e] ? f_val[e] : 0.0;
    } else {
      sol.status[e] = ea.active(id) ? 1 : 0;
      sol.flow[e] = ea.active(id) && has_f[e] ? f_val[e] : 0.0;
    }
  }
  sol.objective = objective;
  return sol;
}

struct Violation {
  std::string constraint;
  double magnitude = 0.0;
};

// Checks every full-model constraint on a candidate point. An empty report
// means the point is feasible within tol.
inline std::vector<Violation> check_feasible(const Network& net,
                                             const OtspSolution& sol,
                                             double tol = 1e-6) {
  std::vector<Violation> out;
  auto add = [&](const std::string& c, double mag) {
    if (mag > tol) out.push_back({c, mag});
  };
  if (sol.generation.size() != net.num_generators() ||
      sol.flow.size() != net.num_branches() ||
      sol.theta.size() != net.num_buses() ||
      sol.status.size() != net.num_branches()) {
    out.push_back({"shape mismatch", 1.0});
    return out;
  }
  for (const auto& b : net.buses) {
    double lhs = 0.0;
    for (int e : net.branches_to[b.id]) lhs += sol.flow[e];
    for (int e : net.branches_from[b.id]) lhs -= sol.flow[e];
    for (int g : net.generators_at[b.id]) lhs += sol.generation[g];
    add("balance bus " + std::to_string(b.id), std::abs(lhs - b.demand));
  }
  for (const auto& br : net.branches) {
    const int x = sol.status[br.id];
    if (x != 0 && x != 1)
      out.push_back({"status not binary on branch " + std::to_string(br.id),
                     1.0});
    const double dtheta = sol.theta[br.from] - sol.theta[br.to];
    const double resid = br.susceptance * dtheta - sol.flow[br.id];
    const double m = big_m(net, br.id);
    add("flow definition (lower) branch " + std::to_string(br.id),
        -(resid + (1 - x) * m));
    add("flow definition (upper) branch " + std::to_string(br.id),
        resid - (1 - x) * m);
    add("capacity branch " + std::to_string(br.id),
        std::abs(sol.flow[br.id]) - br.capacity * x);
  }
  for (const auto& g : net.generators) {
    add("p_min generator " + std::to_string(g.id),
        g.p_min - sol.generation[g.id]);
    add("p_max generator " + std::to_string(g.id),
        sol.generation[g.id] - g.p_max);
  }
  for (const auto& b : net.buses) {
    add("theta_min bus " + std::to_string(b.id),
        net.theta_min - sol.theta[b.id]);
    add("theta_max bus " + std::to_string(b.id),
        sol.theta[b.id] - net.theta_max);
  }
  return out;
}

// objective recomputed from generation, for cross-checks
inline double generation_cost(const Network& net,
                              const std::vector<double>& p) {
  double z = 0.0;
  for (const auto& g : net.generators)
    z += g.cost_linear * p[g.id] + g.cost_const;
  return z;
}

}  // namespace gridswitch
