#pragma once

// Line-profit switching criterion and the priority list driving E^S.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gridswitch/network.hpp"

namespace gridswitch {

class ShapeMismatch : public std::runtime_error {
 public:
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

// alpha_e = f_e * (pi_from - pi_to). Flows must be lifted (0 on lines outside
// E^A), which zeroes alpha on inactive lines automatically.
inline std::vector<double> lpsc(const Network& net,
                                const std::vector<double>& lifted_flow,
                                const std::vector<double>& price) {
  if (lifted_flow.size() != net.num_branches())
    throw ShapeMismatch("flow vector must cover every branch");
  if (price.size() != net.num_buses())
    throw ShapeMismatch("price vector must cover every bus");
  std::vector<double> alpha(net.num_branches(), 0.0);
  for (const auto& e : net.branches)
    alpha[e.id] = lifted_flow[e.id] * (price[e.from] - price[e.to]);
  return alpha;
}

// all branch ids sorted ascending by alpha; most profitable removals first
struct PriorityList {
  std::vector<int> order;    // permutation of branch ids
  std::vector<double> alpha; // per branch
};

inline PriorityList build_priority_list(const std::vector<double>& alpha) {
  PriorityList list;
  list.alpha = alpha;
  list.order.resize(alpha.size());
  std::iota(list.order.begin(), list.order.end(), 0);
  std::stable_sort(list.order.begin(), list.order.end(),
                   [&](int a, int b) { return alpha[a] < alpha[b]; });
  return list;
}

// first min(n, |E|) entries of the priority list, order preserved
inline SwitchSet select_switchable(const PriorityList& list, std::size_t n) {
  n = std::min(n, list.order.size());
  return SwitchSet(
      std::vector<int>(list.order.begin(), list.order.begin() + n));
}

}  // namespace gridswitch
