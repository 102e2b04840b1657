#pragma once

// Hand-built networks and a seeded random-network generator shared by the
// unit and acceptance suites.

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridswitch/matpower.hpp"
#include "gridswitch/model.hpp"
#include "gridswitch/network.hpp"
#include "gridswitch/simplex.hpp"

#ifndef GRIDSWITCH_DATA_DIR
#define GRIDSWITCH_DATA_DIR "data"
#endif

namespace fixtures {

inline std::string data_path(const std::string& name) {
  return std::string(GRIDSWITCH_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline gridswitch::Network load_case(const std::string& name,
                                     gridswitch::NetworkOptions opts = {}) {
  const auto raw = gridswitch::parse_matpower(read_file(data_path(name)));
  return gridswitch::to_network(raw, opts);
}

// 2-bus line: one cheap generator at bus 0, unit demand at bus 1.
// Per-unit values chosen directly (no file): c1 = 40 $/p.u./h, fbar = 2.
inline gridswitch::Network two_bus() {
  gridswitch::Network net;
  net.buses = {{0, 0.0}, {1, 1.0}};
  net.external_bus_id = {1, 2};
  net.branches = {{0, 0, 1, 4.0, 2.0}};
  net.generators = {{0, 0, 0.0, 3.0, 40.0, 0.0}};
  net.rebuild_adjacency();
  net.validate();
  return net;
}

// in-memory copy of the congested triangle (matches data/case3_triangle.m)
inline gridswitch::Network triangle() {
  gridswitch::Network net;
  net.buses = {{0, 0.0}, {1, 0.0}, {2, 2.4}};
  net.external_bus_id = {1, 2, 3};
  net.branches = {{0, 0, 1, 10.0, 1.0},
                  {1, 0, 2, 2.0, 2.0},
                  {2, 1, 2, 10.0, 2.0}};
  net.generators = {{0, 0, 0.0, 4.0, 2000.0, 0.0},
                    {1, 1, 0.0, 3.0, 5000.0, 0.0}};
  net.rebuild_adjacency();
  net.validate();
  return net;
}

// Random connected grid: 3-6 buses, at most 8 branches, random costs and
// limits. The all-lines-active dispatch is guaranteed solvable by retrying
// deterministically on the derived seed.
inline gridswitch::Network random_network(unsigned seed);

namespace detail {

inline gridswitch::Network random_network_attempt(std::mt19937& rng) {
  using namespace gridswitch;
  std::uniform_int_distribution<int> nbus_d(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int nb = nbus_d(rng);

  Network net;
  for (int v = 0; v < nb; ++v) {
    Bus b;
    b.id = v;
    b.demand = v == 0 ? 0.0 : 0.2 + 0.8 * unit(rng);
    net.buses.push_back(b);
    net.external_bus_id.push_back(v + 1);
  }

  auto add_branch = [&](int f, int t) {
    Branch e;
    e.id = static_cast<int>(net.branches.size());
    e.from = f;
    e.to = t;
    e.susceptance = 1.0 / (0.1 + 0.4 * unit(rng));
    e.capacity = 0.3 + 1.2 * unit(rng);
    net.branches.push_back(e);
  };
  // spanning tree then extra chords
  for (int v = 1; v < nb; ++v)
    add_branch(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  const int max_extra =
      std::min(8 - (nb - 1), nb * (nb - 1) / 2 - (nb - 1));
  const int extra =
      std::uniform_int_distribution<int>(0, std::max(0, max_extra))(rng);
  for (int k = 0; k < extra; ++k) {
    int f = std::uniform_int_distribution<int>(0, nb - 2)(rng);
    int t = std::uniform_int_distribution<int>(f + 1, nb - 1)(rng);
    add_branch(f, t);
  }

  const double total_demand = net.total_demand();
  const int ng = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int g = 0; g < ng; ++g) {
    Generator gen;
    gen.id = g;
    gen.bus = std::uniform_int_distribution<int>(0, nb - 1)(rng);
    gen.p_min = 0.0;
    gen.p_max = (1.2 + unit(rng)) * total_demand / ng + 0.5;
    gen.cost_linear = 10.0 + 90.0 * unit(rng);
    gen.cost_const = 0.0;
    net.generators.push_back(gen);
  }
  net.rebuild_adjacency();
  net.validate();
  return net;
}

}  // namespace detail

inline gridswitch::Network random_network(unsigned seed) {
  for (unsigned attempt = 0;; ++attempt) {
    std::mt19937 rng(seed * 7919u + attempt);
    auto net = detail::random_network_attempt(rng);
    const auto lp =
        gridswitch::build_sdcopf(net, gridswitch::Topology::all(net));
    if (gridswitch::solve_lp(lp).status == gridswitch::LpStatus::Optimal)
      return net;
  }
}

}  // namespace fixtures
