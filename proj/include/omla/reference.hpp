#pragma once

// Per-machine reference system. Each machine u is replaced by a single
// virtual task stream with parameters
//
//   p'_{u,l,t} = sum_{e in E_u} x*_{e,l,t}
//   q'_{u,l,t} = sum_e q_e x*_{e,l,t} / p'          (0 when p' = 0)
//   r'_{u,l,t} = sum_e q_e r_{e,l} x*_{e,l,t} / (p' q')  (0 when p' q' = 0)
//
// whose value recursion mirrors the original tables with the edge sum
// collapsed. Its values lower-bound the original ones and admit closed-form
// competitive constants; nothing on the policy path reads them.

#include <vector>

#include "omla/lp.hpp"
#include "omla/model.hpp"

namespace omla {

struct RefParams {
  int machines = 0;
  int levels = 0;
  int horizon = 0;
  std::vector<double> p;  // (u,l,t) flat, see index()
  std::vector<double> q;
  std::vector<double> r;

  std::size_t index(MachineId u, LevelId l, int t) const {
    return (static_cast<std::size_t>(u) * levels + l) * horizon + (t - 1);
  }
  double p_at(MachineId u, LevelId l, int t) const { return p[index(u, l, t)]; }
  double q_at(MachineId u, LevelId l, int t) const { return q[index(u, l, t)]; }
  double r_at(MachineId u, LevelId l, int t) const { return r[index(u, l, t)]; }
};

RefParams ref_params(const Instance& instance, const LpSolution& x);

/// Reference tables for any budget mix. Finite machines are indexed by the
/// remaining budget delta in 1..max finite budget; unlimited machines ignore it.
class RefTables {
 public:
  RefTables() = default;

  int horizon() const { return horizon_; }
  int max_budget() const { return max_budget_; }
  bool unlimited(MachineId u) const { return unlimited_[u] != 0; }

  /// R~^delta_{u,t}; zero for t > T, and for delta <= 0 on finite machines.
  double baseline(MachineId u, int delta, int t) const {
    if (t > horizon_) return 0.0;
    if (unlimited(u)) return ru_[static_cast<std::size_t>(u) * horizon_ + (t - 1)];
    if (delta <= 0) return 0.0;
    return rf_[(static_cast<std::size_t>(delta - 1) * machines_ + u) * horizon_ + (t - 1)];
  }
  /// Q~^delta_{u,l,t}; same boundary rules.
  double activation(MachineId u, int delta, LevelId l, int t) const {
    if (t > horizon_) return 0.0;
    if (unlimited(u)) return qu_[(static_cast<std::size_t>(u) * levels_ + l) * horizon_ + (t - 1)];
    if (delta <= 0) return 0.0;
    return qf_[((static_cast<std::size_t>(delta - 1) * machines_ + u) * levels_ + l) * horizon_ + (t - 1)];
  }

  /// R~ at the machine's initial budget and t = 1.
  double initial_value(const Instance& instance, MachineId u) const;

 private:
  friend RefTables ref_tables(const Instance&, const RefParams&);

  int machines_ = 0;
  int levels_ = 0;
  int horizon_ = 0;
  int max_budget_ = 0;
  std::vector<char> unlimited_;
  std::vector<double> rf_, qf_, ru_, qu_;
};

RefTables ref_tables(const Instance& instance, const RefParams& params);

}  // namespace omla
