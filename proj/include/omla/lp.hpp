#pragma once

// The offline LP relaxation over x_{e,l,t}: the probability that task type v
// arrives at t and is assigned to machine u with level l along e = (u, v).
//
//   maximize   sum_{t,e,l} q_e r_{e,l} x_{e,l,t}
//   occupancy  per (u,t):  sum_{t'<t} sum_{e in E_u,l} q_e x_{e,l,t'} Pr{d_l >= t-t'+1}
//                          + sum_{e in E_u,l} q_e x_{e,l,t}                          <= 1
//   budget     per finite u: sum_{t,e in E_u,l} x_{e,l,t} [theta q_e Pr{d_l > T-t} + (1-q_e) theta_l]
//                                                                       <= Delta_u + theta - 1
//   arrival    per (v,t):   sum_{e in E_v,l} x_{e,l,t} <= p_{v,t}
//   per edge   per (e,t):   sum_l x_{e,l,t} <= p_{v,t}
//   per slot   per (u,t):   sum_{e in E_u,l} x_{e,l,t} <= 1
//   x >= 0

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omla/model.hpp"
#include "omla/simplex.hpp"

namespace omla {

enum class RowFamily { occupancy, budget, arrival_task, arrival_edge, machine_slot };

std::string to_string(RowFamily f);

struct LpRow {
  RowFamily family;
  int owner = 0;  // machine, task or edge the row belongs to
  int t = 0;      // time slot, 0 for the budget family
  std::vector<int> cols;
  std::vector<double> vals;
  double rhs = 0.0;
};

/// Restricts which (edge, level) pairs get LP columns. Excluded pairs keep
/// x = 0 in every solution.
struct LevelMask {
  std::vector<char> allowed;  // edge-major, |E| * L
  bool operator()(EdgeId e, LevelId l, int levels) const { return allowed[static_cast<std::size_t>(e) * levels + l] != 0; }
};

/// Dense (e,l,t) -> column mapping plus the row list. All rows have sense <=.
class LpProblem {
 public:
  int edges = 0;
  int levels = 0;
  int horizon = 0;
  int columns = 0;
  std::vector<int> column_of;  // (e,l,t) slot -> column, -1 when masked out
  std::vector<double> objective;
  std::vector<LpRow> rows;

  std::size_t slot(EdgeId e, LevelId l, int t) const {
    return (static_cast<std::size_t>(e) * levels + l) * horizon + (t - 1);
  }
  int column(EdgeId e, LevelId l, int t) const { return column_of[slot(e, l, t)]; }

  std::size_t count(RowFamily f) const;
  simplex::SparseLp to_sparse() const;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(LpStatus s);

/// Optimal x*_{e,l,t}, stored densely over every (e,l,t) slot.
struct LpSolution {
  LpStatus status = LpStatus::iteration_limit;
  double objective = 0.0;
  int edges = 0;
  int levels = 0;
  int horizon = 0;
  std::vector<double> x;
  std::int64_t iterations = 0;

  double at(EdgeId e, LevelId l, int t) const {
    if (t < 1 || t > horizon) return 0.0;
    return x[(static_cast<std::size_t>(e) * levels + l) * horizon + (t - 1)];
  }
  double& at(EdgeId e, LevelId l, int t) { return x[(static_cast<std::size_t>(e) * levels + l) * horizon + (t - 1)]; }
  bool matches(const Instance& in) const {
    return edges == in.edge_count() && levels == in.levels() && horizon == in.horizon() &&
           x.size() == static_cast<std::size_t>(edges) * levels * horizon;
  }
};

enum class SolverKind { revised, dense };

/// Builds the LP. Rejects instances that fail validate().
LpProblem build_off(const Instance& instance, const LevelMask* mask = nullptr);

/// Solves to optimality. tol is the relative objective tolerance handed to the
/// pivoting rules. Components below 1e-12 are clamped to zero afterwards.
LpSolution solve(const LpProblem& problem, double tol = 1e-7, SolverKind kind = SolverKind::revised);

/// build_off + solve; also asserts the objective is bounded by sum q r p.
LpSolution solve_off(const Instance& instance, double tol = 1e-7, const LevelMask* mask = nullptr);

/// Worst violation of any row (inf-norm, computed from the problem rows, not
/// from solver state) together with the offending row index.
struct Residual {
  double max_violation = 0.0;
  int row = -1;
  double min_component = 0.0;
};

Residual residual(const LpProblem& problem, const LpSolution& sol);

/// Independent feasibility check straight from the instance data.
Residual residual(const Instance& instance, const LpSolution& sol);

/// Objective recomputed from the instance: sum q_e r_{e,l} x_{e,l,t}.
double lp_objective(const Instance& instance, const LpSolution& sol);

/// Sparse text dump: header "rows cols nnz", a line of row senses, then one
/// "row col value" line per nonzero, then "rhs row value" and "obj col value" lines.
void write_lp(const LpProblem& problem, std::ostream& out);

std::string solution_to_json(const LpSolution& sol);
LpSolution solution_from_json(const std::string& text);

}  // namespace omla
