#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gridswitch {

struct Bus {
  int id = 0;           // dense index
  double demand = 0.0;  // p.u.
};

struct Branch {
  int id = 0;  // dense index
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // p.u., nonzero
  double capacity = 0.0;     // p.u., > 0
};

struct Generator {
  int id = 0;
  int bus = 0;
  double p_min = 0.0;  // p.u.
  double p_max = 0.0;  // p.u.
  double cost_linear = 0.0;  // $/p.u./h
  double cost_const = 0.0;   // $/h
};

// Immutable DC grid description. All quantities are per-unit on the case base.
class Network {
 public:
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  double theta_min = -0.6;  // rad, global
  double theta_max = 0.6;

  // branch ids leaving / entering each bus
  std::vector<std::vector<int>> branches_from;
  std::vector<std::vector<int>> branches_to;
  // generator ids per bus
  std::vector<std::vector<int>> generators_at;

  // dense bus index -> external MATPOWER bus id
  std::vector<int> external_bus_id;

  std::size_t num_buses() const { return buses.size(); }
  std::size_t num_branches() const { return branches.size(); }
  std::size_t num_generators() const { return generators.size(); }

  double total_demand() const {
    double s = 0.0;
    for (const auto& b : buses) s += b.demand;
    return s;
  }

  void rebuild_adjacency() {
    branches_from.assign(buses.size(), {});
    branches_to.assign(buses.size(), {});
    generators_at.assign(buses.size(), {});
    for (const auto& e : branches) {
      branches_from[e.from].push_back(e.id);
      branches_to[e.to].push_back(e.id);
    }
    for (const auto& g : generators) generators_at[g.bus].push_back(g.id);
  }

  void validate() const {
    const int nb = static_cast<int>(buses.size());
    for (const auto& e : branches) {
      if (e.from < 0 || e.from >= nb || e.to < 0 || e.to >= nb)
        throw std::invalid_argument("branch " + std::to_string(e.id) +
                                    " references missing bus");
      if (e.susceptance == 0.0)
        throw std::invalid_argument("branch " + std::to_string(e.id) +
                                    " has zero susceptance");
      if (e.capacity <= 0.0)
        throw std::invalid_argument("branch " + std::to_string(e.id) +
                                    " has non-positive capacity");
    }
    for (const auto& g : generators) {
      if (g.bus < 0 || g.bus >= nb)
        throw std::invalid_argument("generator references missing bus");
      if (g.p_min > g.p_max)
        throw std::invalid_argument("generator " + std::to_string(g.id) +
                                    " has p_min > p_max");
    }
    if (!(theta_min < theta_max))
      throw std::invalid_argument("theta_min must be < theta_max");
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["theta_min"] = theta_min;
    j["theta_max"] = theta_max;
    j["buses"] = nlohmann::json::array();
    for (std::size_t i = 0; i < buses.size(); ++i)
      j["buses"].push_back({{"id", buses[i].id},
                            {"demand", buses[i].demand},
                            {"external_id", external_bus_id[i]}});
    j["branches"] = nlohmann::json::array();
    for (const auto& e : branches)
      j["branches"].push_back({{"id", e.id},
                               {"from", e.from},
                               {"to", e.to},
                               {"susceptance", e.susceptance},
                               {"capacity", e.capacity}});
    j["generators"] = nlohmann::json::array();
    for (const auto& g : generators)
      j["generators"].push_back({{"id", g.id},
                                 {"bus", g.bus},
                                 {"p_min", g.p_min},
                                 {"p_max", g.p_max},
                                 {"cost_linear", g.cost_linear},
                                 {"cost_const", g.cost_const}});
    return j;
  }

  static Network from_json(const nlohmann::json& j) {
    Network net;
    net.theta_min = j.at("theta_min").get<double>();
    net.theta_max = j.at("theta_max").get<double>();
    for (const auto& jb : j.at("buses")) {
      Bus b;
      b.id = jb.at("id").get<int>();
      b.demand = jb.at("demand").get<double>();
      net.buses.push_back(b);
      net.external_bus_id.push_back(jb.at("external_id").get<int>());
    }
    for (const auto& je : j.at("branches")) {
      Branch e;
      e.id = je.at("id").get<int>();
      e.from = je.at("from").get<int>();
      e.to = je.at("to").get<int>();
      e.susceptance = je.at("susceptance").get<double>();
      e.capacity = je.at("capacity").get<double>();
      net.branches.push_back(e);
    }
    for (const auto& jg : j.at("generators")) {
      Generator g;
      g.id = jg.at("id").get<int>();
      g.bus = jg.at("bus").get<int>();
      g.p_min = jg.at("p_min").get<double>();
      g.p_max = jg.at("p_max").get<double>();
      g.cost_linear = jg.at("cost_linear").get<double>();
      g.cost_const = jg.at("cost_const").get<double>();
      net.generators.push_back(g);
    }
    net.rebuild_adjacency();
    net.validate();
    return net;
  }
};

// The active-line set E^A, kept as a membership mask over branch ids.
class Topology {
 public:
  Topology() = default;
  Topology(std::size_t num_branches, bool all_active) {
    mask_.assign(num_branches, all_active);
  }
  static Topology all(const Network& net) {
    return Topology(net.num_branches(), true);
  }
  static Topology none(const Network& net) {
    return Topology(net.num_branches(), false);
  }
  static Topology from_vector(const std::vector<int>& x) {
    Topology t;
    t.mask_.reserve(x.size());
    for (int v : x) t.mask_.push_back(v != 0);
    return t;
  }

  bool active(int e) const { return mask_.at(static_cast<std::size_t>(e)); }
  void set(int e, bool on) { mask_.at(static_cast<std::size_t>(e)) = on; }
  std::size_t size() const { return mask_.size(); }
  std::size_t count_active() const {
    std::size_t n = 0;
    for (bool b : mask_) n += b ? 1 : 0;
    return n;
  }
  std::vector<int> active_ids() const {
    std::vector<int> ids;
    for (std::size_t e = 0; e < mask_.size(); ++e)
      if (mask_[e]) ids.push_back(static_cast<int>(e));
    return ids;
  }
  // indicator vector x with x_e = 1 iff e active
  std::vector<int> indicator() const {
    std::vector<int> x(mask_.size(), 0);
    for (std::size_t e = 0; e < mask_.size(); ++e) x[e] = mask_[e] ? 1 : 0;
    return x;
  }
  bool operator==(const Topology& o) const { return mask_ == o.mask_; }

 private:
  std::vector<bool> mask_;
};

// Ordered switchable-line set E^S.
class SwitchSet {
 public:
  SwitchSet() = default;
  explicit SwitchSet(std::vector<int> ids) : ids_(std::move(ids)) {
    for (int e : ids_) member_.insert({e, true});
  }
  static SwitchSet all(const Network& net) {
    std::vector<int> ids(net.num_branches());
    for (std::size_t e = 0; e < ids.size(); ++e) ids[e] = static_cast<int>(e);
    return SwitchSet(std::move(ids));
  }
  bool contains(int e) const { return member_.count(e) > 0; }
  const std::vector<int>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

 private:
  std::vector<int> ids_;
  std::map<int, bool> member_;
};

// Full-network feasible point for the switching MILP.
struct OtspSolution {
  std::vector<double> generation;  // per generator, p.u.
  std::vector<double> flow;        // per branch, p.u.; 0 on open lines
  std::vector<double> theta;       // per bus, rad
  std::vector<int> status;         // per branch, {0,1}
  double objective = 0.0;          // $/h
};

}  // namespace gridswitch
