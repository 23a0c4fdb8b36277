#pragma once

// Primal simplex solvers for   maximize c'x  s.t.  A x <= b,  x >= 0,  b >= 0.
// With b >= 0 the all-slack basis is feasible, so no phase one is needed.
//
// Two independent implementations share this interface:
//   revised_simplex  sparse revised simplex, LU of the basis plus an eta file,
//                    Harris ratio test, Dantzig pricing with a Bland fallback
//                    after a run of degenerate pivots;
//   dense_tableau    textbook full-tableau simplex with the same pivot rules.
// Both are deterministic: identical input gives identical pivots.

#include <cstdint>
#include <string>
#include <vector>

namespace omla::simplex {

/// Column-major sparse LP.
struct SparseLp {
  int rows = 0;
  int cols = 0;
  std::vector<double> c;          // objective, size cols
  std::vector<double> b;          // right-hand sides, size rows, all >= 0
  std::vector<int> col_start;     // size cols + 1
  std::vector<int> row_index;     // size nnz
  std::vector<double> value;      // size nnz
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(Status s);

struct Options {
  double optimality_tol = 1e-9;
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Matrix entries with smaller magnitude are ignored.
  double drop_tol = 1e-15;
  std::int64_t max_iterations = 2'000'000;
  int refactor_interval = 80;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 40;
};

struct Result {
  Status status = Status::iteration_limit;
  std::vector<double> x;  // size cols
  double objective = 0.0;
  std::int64_t iterations = 0;
};

Result revised_simplex(const SparseLp& lp, const Options& opt = {});
Result dense_tableau(const SparseLp& lp, const Options& opt = {});

}  // namespace omla::simplex
