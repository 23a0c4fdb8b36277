#pragma once

// Exhaustive evaluators for tiny instances.
//
// exact_opt: the offline optimum. For each arrival sequence I, a clairvoyant
// planner that knows I (but not acceptance or delay outcomes) solves the
// finite-horizon problem over (t, occupied_until, budgets); the result is
// sum_I Pr(I) OPT(I).
//
// exact_policy_value: the expected reward of an online policy, by recursion
// over the same Markov state with the policy's decision distribution.

#include <cstdint>

#include "omla/model.hpp"
#include "omla/policies.hpp"

namespace omla {

struct TinyLimits {
  int machines = 2;
  int tasks = 3;
  int horizon = 5;
  int levels = 2;
  int budget = 3;         // largest finite budget; unlimited is always allowed
  int delay_support = 3;  // largest delay with positive mass
  std::uint64_t node_cap = 1'000'000;
};

struct ExactValue {
  double value = 0.0;
  std::uint64_t nodes = 0;
};

/// Throws limits_exceeded naming the first cap the instance breaks.
void check_limits(const Instance& instance, const TinyLimits& limits = {});
bool within_limits(const Instance& instance, const TinyLimits& limits = {});

ExactValue exact_opt(const Instance& instance, const TinyLimits& limits = {});
ExactValue exact_policy_value(const Instance& instance, const Policy& policy, const TinyLimits& limits = {});

}  // namespace omla
