#pragma once

// Bound checker. Evaluates every inequality in the competitive analysis on a
// concrete instance:
//
//   X   x* satisfies the LP(Off) rows                  (guards supplied solutions)
//   L1  LP(Off) >= E[OPT]                              (tiny instances only)
//   L2  R^d_{u,t} >= R~^d_{u,t}                        entrywise
//   L3  R~_{u,1} >= 1/2 sum_{e in E_u,l,t} q r x*       unlimited machines
//   L4  composition of L2 and L3
//   L5  R~^{d-theta_l}_{u,t} >= ((d-theta_l)/d) R~^d_{u,t}   entrywise, finite machines
//   L6  R~^{D_u}_{u,1} >= D_u/(3D_u-1) sum q r x*           finite machines
//   L7  composition of L2, L5 and L6
//   T1/T2  sum_u R_{u,1} / LP(Off) >= 1/2 or D/(3D-1)
//
// Every inequality lhs >= rhs is normalized as (lhs - rhs) / max(1, |rhs|)
// and passes when that slack is >= -tol.

#include <optional>
#include <string>
#include <vector>

#include "omla/lp.hpp"
#include "omla/model.hpp"

namespace omla {

struct BoundCheck {
  std::string name;
  std::string statement;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // normalized; worst entry for entrywise checks
  std::string where;   // index of the worst entry, empty for scalar checks
  bool pass = true;
};

struct BoundReport {
  double tol = 0.0;
  double lp_value = 0.0;
  double omla_value = 0.0;  // sum_u R_{u,1}
  double ratio = 0.0;
  double constant = 0.0;
  std::optional<double> opt_value;
  std::vector<BoundCheck> checks;
  bool pass = true;

  const BoundCheck* find(const std::string& name) const;
  std::string to_json() const;
  std::string to_table() const;
};

/// D/(3D-1); one half at D = 1.
double limited_constant(int budget);
/// 1/2 when every machine is unlimited, otherwise D/(3D-1) at the largest finite budget.
double competitive_constant(const Instance& instance);

struct VerifyOptions {
  double tol = 1e-7;
  /// Run the exact-OPT check when the instance fits the oracle caps.
  bool oracle = true;
};

/// Solves the LP itself.
BoundReport check_all(const Instance& instance, const VerifyOptions& options = {});
/// Uses the supplied x*, which need not be optimal or even feasible.
BoundReport check_all(const Instance& instance, const LpSolution& x, const VerifyOptions& options = {});

}  // namespace omla
