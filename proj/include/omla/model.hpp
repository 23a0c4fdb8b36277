#pragma once

// Problem instances for online machine-and-level assignment: a bipartite graph
// of machines and repeatable task types, per-level rewards, delays and
// rejection penalties, per-machine rejection budgets and a time-varying
// arrival matrix.
//
// Conventions used throughout the library:
//   * time slots are 1-based, t in [1, T]; lookups past T read as zero,
//   * levels are 0-based indices; index l stands for processing level l + 1,
//   * machine, task and edge ids are dense 0-based indices.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace omla {

using MachineId = int;
using TaskId = int;
using EdgeId = int;
using LevelId = int;

/// Rejection budget of a machine: a positive integer or unlimited.
class Budget {
 public:
  static Budget finite(int value) { return Budget(value); }
  static Budget unlimited() { return Budget(kUnlimited); }

  bool is_unlimited() const { return value_ == kUnlimited; }
  /// Only meaningful for finite budgets.
  int value() const { return value_; }

  friend bool operator==(const Budget&, const Budget&) = default;

 private:
  static constexpr int kUnlimited = -1;
  explicit Budget(int v) : value_(v) {}
  int value_;
};

/// Distribution of the occupation time of one processing level. Support is a
/// subset of {1, 2, ...}.
class DelayDist {
 public:
  DelayDist() = default;

  /// Builds from a pmf keyed by delay. Mass at d <= 0 is folded into d = 1 and
  /// the result is renormalized to sum to one. Throws on negative or all-zero mass.
  static DelayDist from_pmf(const std::map<int, double>& pmf);
  static DelayDist point_mass(int d);

  /// Pr{d = k}; zero outside the support.
  double prob(int k) const { return k >= 1 && k < static_cast<int>(pmf_.size()) ? pmf_[k] : 0.0; }
  /// Pr{d >= k}; one for k <= 1, zero past the support.
  double tail(int k) const {
    if (k <= 1) return 1.0;
    return k < static_cast<int>(tail_.size()) ? tail_[k] : 0.0;
  }
  /// Pr{d > k}.
  double tail_above(int k) const { return tail(k + 1); }

  int support_min() const;
  int support_max() const { return static_cast<int>(pmf_.size()) - 1; }
  double expected() const;

  /// pmf()[d] = Pr{d}; index 0 is always zero.
  const std::vector<double>& pmf() const { return pmf_; }

 private:
  std::vector<double> pmf_;
  std::vector<double> tail_;
};

double expected_delay(const DelayDist& d);

struct Edge {
  EdgeId id = 0;
  MachineId machine = 0;
  TaskId task = 0;
  double accept_prob = 1.0;
};

/// Raw, mutable instance fields. Turned into an Instance once complete.
struct InstanceData {
  int horizon = 0;
  int levels = 0;
  std::vector<Budget> budgets;            // one per machine
  int task_count = 0;
  std::vector<Edge> edges;
  std::vector<double> rewards;            // edge-major: rewards[e * levels + l]
  std::vector<int> penalties;             // theta per level
  std::vector<double> arrivals;           // task-major: arrivals[v * horizon + (t - 1)]
  std::vector<DelayDist> delays;          // one per level
};

/// Immutable problem datum. Construction checks shapes and id consistency
/// only; the modelling assumptions are checked by validate().
class Instance {
 public:
  explicit Instance(InstanceData data);

  int horizon() const { return d_.horizon; }
  int levels() const { return d_.levels; }
  int machine_count() const { return static_cast<int>(d_.budgets.size()); }
  int task_count() const { return d_.task_count; }
  int edge_count() const { return static_cast<int>(d_.edges.size()); }

  const Budget& budget(MachineId u) const { return d_.budgets[u]; }
  const Edge& edge(EdgeId e) const { return d_.edges[e]; }
  const std::vector<Edge>& edges() const { return d_.edges; }
  double reward(EdgeId e, LevelId l) const { return d_.rewards[static_cast<std::size_t>(e) * d_.levels + l]; }
  int penalty(LevelId l) const { return d_.penalties[l]; }
  int theta_max() const { return theta_max_; }
  /// p_{v,t}; zero outside [1, T].
  double arrival(TaskId v, int t) const {
    if (t < 1 || t > d_.horizon) return 0.0;
    return d_.arrivals[static_cast<std::size_t>(v) * d_.horizon + (t - 1)];
  }
  const DelayDist& delay(LevelId l) const { return d_.delays[l]; }

  const std::vector<EdgeId>& edges_of_machine(MachineId u) const { return by_machine_[u]; }
  const std::vector<EdgeId>& edges_of_task(TaskId v) const { return by_task_[v]; }
  /// Edge id for (u, v) or -1.
  EdgeId find_edge(MachineId u, TaskId v) const;

  bool all_unlimited() const;
  bool all_finite() const;
  /// Largest finite budget, 0 if none.
  int max_finite_budget() const;

  const InstanceData& data() const { return d_; }

 private:
  InstanceData d_;
  int theta_max_ = 0;
  std::vector<std::vector<EdgeId>> by_machine_;
  std::vector<std::vector<EdgeId>> by_task_;
};

struct ValidationIssue {
  std::string code;     // stable short identifier, e.g. "rewards_not_increasing"
  std::string message;  // human readable, carries the offending indices
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

inline constexpr double kProbTolerance = 1e-9;
inline constexpr double kPmfSumTolerance = 1e-12;

ValidationReport validate(const Instance& instance);

/// Throws Error(contract_violation) listing the issues unless validate passes.
void require_valid(const Instance& instance);

}  // namespace omla
