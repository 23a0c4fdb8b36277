#pragma once

// Hand-built instances shared by the unit tests.

#include <map>
#include <vector>

#include "omla/lp.hpp"
#include "omla/model.hpp"

namespace omla::test {

/// One machine, one task, one edge; every slot has arrival probability p.
inline InstanceData single_edge_data(int T, int L, Budget budget, double q, std::vector<double> rewards, double p,
                                     std::vector<int> theta, std::vector<DelayDist> delays) {
  InstanceData d;
  d.horizon = T;
  d.levels = L;
  d.budgets = {budget};
  d.task_count = 1;
  d.edges = {{0, 0, 0, q}};
  d.rewards = std::move(rewards);
  d.penalties = std::move(theta);
  d.arrivals.assign(T, p);
  d.delays = std::move(delays);
  return d;
}

/// T=2, L=1, budget 1, theta 1, q=0.5, r=4, unit delay, p=1.
inline Instance two_slot_instance() {
  return Instance(single_edge_data(2, 1, Budget::finite(1), 0.5, {4.0}, 1.0, {1}, {DelayDist::point_mass(1)}));
}

/// x*_{e,1,1} = x*_{e,1,2} = 0.5 for two_slot_instance().
inline LpSolution two_slot_solution() {
  LpSolution x;
  x.status = LpStatus::optimal;
  x.edges = 1;
  x.levels = 1;
  x.horizon = 2;
  x.x = {0.5, 0.5};
  x.objective = 2.0;
  return x;
}

inline LpSolution zero_solution(const Instance& in) {
  LpSolution x;
  x.status = LpStatus::optimal;
  x.edges = in.edge_count();
  x.levels = in.levels();
  x.horizon = in.horizon();
  x.x.assign(static_cast<std::size_t>(x.edges) * x.levels * x.horizon, 0.0);
  return x;
}

inline Instance with_budgets(const Instance& in, const std::vector<Budget>& budgets) {
  InstanceData d = in.data();
  d.budgets = budgets;
  return Instance(std::move(d));
}

inline Instance with_uniform_budget(const Instance& in, Budget b) {
  return with_budgets(in, std::vector<Budget>(in.machine_count(), b));
}

}  // namespace omla::test
