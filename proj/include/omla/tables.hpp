#pragma once

// Activation values Q and baseline values R, computed offline by backward
// induction from the LP solution.
//
//   Q^d_{e,l,t} = q_e (r_{e,l} + sum_{k=1}^{T-t} Pr{d_l = k} R^d_{u,t+k}) + (1 - q_e) R^{d-theta_l}_{u,t+1}
//   R^d_{u,t}   = sum_{e in E_u, l} x*_{e,l,t} max{Q^d_{e,l,t}, R^d_{u,t+1}} + (1 - sum x*) R^d_{u,t+1}
//
// with R = Q = 0 whenever d <= 0 or t > T. The unlimited-budget variant drops
// d and continues a rejection at R_{u,t+1}.

#include <string>
#include <vector>

#include "omla/lp.hpp"
#include "omla/model.hpp"

namespace omla {

class ValueTables {
 public:
  ValueTables() = default;
  ValueTables(int max_budget, int machines, int edges, int levels, int horizon);

  int max_budget() const { return max_budget_; }
  int horizon() const { return horizon_; }

  /// R^delta_{u,t}; zero for delta <= 0 or t > T.
  double baseline(int delta, MachineId u, int t) const {
    if (delta <= 0 || t > horizon_) return 0.0;
    return r_[r_index(delta, u, t)];
  }
  /// Q^delta_{e,l,t}; zero for delta <= 0 or t > T.
  double activation(int delta, EdgeId e, LevelId l, int t) const {
    if (delta <= 0 || t > horizon_) return 0.0;
    return q_[q_index(delta, e, l, t)];
  }

  double& baseline_ref(int delta, MachineId u, int t) { return r_[r_index(delta, u, t)]; }
  double& activation_ref(int delta, EdgeId e, LevelId l, int t) { return q_[q_index(delta, e, l, t)]; }

 private:
  std::size_t r_index(int delta, MachineId u, int t) const {
    return (static_cast<std::size_t>(delta - 1) * machines_ + u) * horizon_ + (t - 1);
  }
  std::size_t q_index(int delta, EdgeId e, LevelId l, int t) const {
    return ((static_cast<std::size_t>(delta - 1) * edges_ + e) * levels_ + l) * horizon_ + (t - 1);
  }

  int max_budget_ = 0;
  int machines_ = 0;
  int edges_ = 0;
  int levels_ = 0;
  int horizon_ = 0;
  std::vector<double> r_;
  std::vector<double> q_;
};

class ValueTablesUnlimited {
 public:
  ValueTablesUnlimited() = default;
  ValueTablesUnlimited(int machines, int edges, int levels, int horizon);

  int horizon() const { return horizon_; }
  double baseline(MachineId u, int t) const { return t > horizon_ ? 0.0 : r_[static_cast<std::size_t>(u) * horizon_ + (t - 1)]; }
  double activation(EdgeId e, LevelId l, int t) const {
    return t > horizon_ ? 0.0 : q_[(static_cast<std::size_t>(e) * levels_ + l) * horizon_ + (t - 1)];
  }
  double& baseline_ref(MachineId u, int t) { return r_[static_cast<std::size_t>(u) * horizon_ + (t - 1)]; }
  double& activation_ref(EdgeId e, LevelId l, int t) {
    return q_[(static_cast<std::size_t>(e) * levels_ + l) * horizon_ + (t - 1)];
  }

 private:
  int levels_ = 0;
  int horizon_ = 0;
  std::vector<double> r_;
  std::vector<double> q_;
};

/// Budget-limited tables. Requires every budget to be finite; delta runs over
/// 1..max_u Delta_u for every machine.
ValueTables compute_tables(const Instance& instance, const LpSolution& x);

/// Unlimited-budget tables. Requires every budget to be unlimited.
ValueTablesUnlimited compute_tables_unlimited(const Instance& instance, const LpSolution& x);

/// Tables for any budget mix: finite machines get the budget-indexed
/// recursion, unlimited machines the budget-free one. Machines are computed
/// independently, so mixing is exact.
class TableSet {
 public:
  TableSet() = default;
  TableSet(const Instance& instance, const LpSolution& x);

  bool unlimited(MachineId u) const { return unlimited_[u] != 0; }
  /// Baseline at the machine's current remaining budget (ignored when unlimited).
  double baseline(MachineId u, int delta, int t) const {
    return unlimited(u) ? unlimited_tables_.baseline(u, t) : finite_tables_.baseline(delta, u, t);
  }
  double activation(MachineId u, int delta, EdgeId e, LevelId l, int t) const {
    return unlimited(u) ? unlimited_tables_.activation(e, l, t) : finite_tables_.activation(delta, e, l, t);
  }
  /// R at the initial budget and t = 1: the machine's expected reward under OMLA.
  double initial_value(const Instance& instance, MachineId u) const;
  /// Sum over machines of initial_value.
  double expected_reward(const Instance& instance) const;

  const ValueTables& finite() const { return finite_tables_; }
  const ValueTablesUnlimited& unlimited_tables() const { return unlimited_tables_; }

 private:
  std::vector<char> unlimited_;
  ValueTables finite_tables_;
  ValueTablesUnlimited unlimited_tables_;
};

/// Monotonicity diagnostics. Returns the worst violation (positive when the
/// property fails) of R^d_{u,t} >= R^d_{u,t+1} and R^d_{u,t} >= R^{d'}_{u,t}, d >= d'.
struct TableDiagnostics {
  double time_violation = 0.0;
  double budget_violation = 0.0;
};
TableDiagnostics diagnose(const ValueTables& tables, int machines);

/// CSV rows "delta,u,t,R" (1-based t). Unlimited machines are written with delta "inf".
void write_baseline_csv(const Instance& instance, const TableSet& tables, std::ostream& out);

}  // namespace omla
