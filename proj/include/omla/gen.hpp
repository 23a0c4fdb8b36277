#pragma once

#include <cstdint>

#include "omla/model.hpp"

namespace omla::gen {

/// Synthetic protocol: Erdos-Renyi bipartite graph, q_e ~ U(0.5,1),
/// r_{e,l} ~ U(a l^0.2, a l^0.4) with a ~ U(0.5,1) per edge,
/// D_l = Binomial(T, l^1.2 / 20) with mass at 0 folded into 1,
/// theta_l = l + 2, Delta_u uniform on {1..delta_cap} or unlimited.
struct SyntheticConfig {
  int machines = 10;
  int tasks = 25;
  int horizon = 100;
  int levels = 6;
  double edge_prob = 0.1;
  Budget delta_cap = Budget::finite(20);
  std::uint64_t seed = 1;
  /// Per-slot total arrival mass is drawn from U(arrival_mass_lo, arrival_mass_hi).
  double arrival_mass_lo = 0.3;
  double arrival_mass_hi = 1.0;
};

struct SyntheticStats {
  int reward_redraws = 0;
  int reward_sorted_fallbacks = 0;
};

Instance synthetic(const SyntheticConfig& config, SyntheticStats* stats = nullptr);

/// Binomial(n, p) pmf with the mass at 0 folded into 1.
DelayDist clamped_binomial(int n, double p);

/// Two-slot counterexample: one machine, tasks x, y, z, q = 1, a single level,
/// delay fixed at T = 2. p_{x,1} = 1, p_{y,2} = eps, p_{z,2} = 1 - eps,
/// rewards 1, 1/eps and 0. Budget is unlimited.
Instance hardness(double eps);

/// Small random instances sized for the exact oracles: random sparse graph,
/// delays with support inside [1, max_delay] and increasing means.
struct SmallConfig {
  int machines = 2;
  int tasks = 3;
  int horizon = 4;
  int levels = 2;
  int max_delay = 3;
  Budget delta_cap = Budget::finite(2);
  int max_penalty = 2;
  double edge_prob = 0.6;
  std::uint64_t seed = 1;
};

Instance small_random(const SmallConfig& config);

}  // namespace omla::gen
