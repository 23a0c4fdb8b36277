#include "omla/lp.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <ostream>

#include "omla/error.hpp"

namespace omla {

std::string to_string(RowFamily f) {
  switch (f) {
    case RowFamily::occupancy: return "occupancy";
    case RowFamily::budget: return "budget";
    case RowFamily::arrival_task: return "arrival-task";
    case RowFamily::arrival_edge: return "arrival-edge";
    case RowFamily::machine_slot: return "machine-per-slot";
  }
  return "unknown";
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

std::size_t LpProblem::count(RowFamily f) const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [f](const LpRow& r) { return r.family == f; }));
}

simplex::SparseLp LpProblem::to_sparse() const {
  simplex::SparseLp lp;
  lp.rows = static_cast<int>(rows.size());
  lp.cols = columns;
  lp.c = objective;
  lp.b.reserve(rows.size());
  std::vector<int> counts(columns, 0);
  for (const auto& r : rows) {
    lp.b.push_back(r.rhs);
    for (int c : r.cols) ++counts[c];
  }
  lp.col_start.assign(columns + 1, 0);
  for (int j = 0; j < columns; ++j) lp.col_start[j + 1] = lp.col_start[j] + counts[j];
  lp.row_index.resize(lp.col_start.back());
  lp.value.resize(lp.col_start.back());
  std::vector<int> fill(lp.col_start.begin(), lp.col_start.end() - 1);
  for (int i = 0; i < lp.rows; ++i) {
    const auto& r = rows[i];
    for (std::size_t k = 0; k < r.cols.size(); ++k) {
      const int pos = fill[r.cols[k]]++;
      lp.row_index[pos] = i;
      lp.value[pos] = r.vals[k];
    }
  }
  return lp;
}

LpProblem build_off(const Instance& in, const LevelMask* mask) {
  require_valid(in);
  const int T = in.horizon();
  const int L = in.levels();
  const int E = in.edge_count();
  if (mask)
    require(mask->allowed.size() == static_cast<std::size_t>(E) * L, ErrorKind::invalid_argument,
            "level mask does not match instance");

  LpProblem lp;
  lp.edges = E;
  lp.levels = L;
  lp.horizon = T;
  lp.column_of.assign(static_cast<std::size_t>(E) * L * T, -1);
  for (EdgeId e = 0; e < E; ++e)
    for (LevelId l = 0; l < L; ++l) {
      if (mask && !(*mask)(e, l, L)) continue;
      for (int t = 1; t <= T; ++t) {
        lp.column_of[lp.slot(e, l, t)] = lp.columns++;
        lp.objective.push_back(in.edge(e).accept_prob * in.reward(e, l));
      }
    }

  const auto add = [&](LpRow& row, EdgeId e, LevelId l, int t, double coef) {
    const int c = lp.column(e, l, t);
    if (c < 0 || coef == 0.0) return;
    row.cols.push_back(c);
    row.vals.push_back(coef);
  };

  for (MachineId u = 0; u < in.machine_count(); ++u)
    for (int t = 1; t <= T; ++t) {
      LpRow row{RowFamily::occupancy, u, t, {}, {}, 1.0};
      for (EdgeId e : in.edges_of_machine(u)) {
        const double q = in.edge(e).accept_prob;
        for (LevelId l = 0; l < L; ++l) {
          for (int tp = 1; tp < t; ++tp) add(row, e, l, tp, q * in.delay(l).tail(t - tp + 1));
          add(row, e, l, t, q);
        }
      }
      lp.rows.push_back(std::move(row));
    }

  const int theta = in.theta_max();
  for (MachineId u = 0; u < in.machine_count(); ++u) {
    if (in.budget(u).is_unlimited()) continue;
    LpRow row{RowFamily::budget, u, 0, {}, {}, static_cast<double>(in.budget(u).value() + theta - 1)};
    for (int t = 1; t <= T; ++t)
      for (EdgeId e : in.edges_of_machine(u)) {
        const double q = in.edge(e).accept_prob;
        for (LevelId l = 0; l < L; ++l)
          add(row, e, l, t, theta * q * in.delay(l).tail_above(T - t) + (1.0 - q) * in.penalty(l));
      }
    lp.rows.push_back(std::move(row));
  }

  for (TaskId v = 0; v < in.task_count(); ++v)
    for (int t = 1; t <= T; ++t) {
      LpRow row{RowFamily::arrival_task, v, t, {}, {}, in.arrival(v, t)};
      for (EdgeId e : in.edges_of_task(v))
        for (LevelId l = 0; l < L; ++l) add(row, e, l, t, 1.0);
      lp.rows.push_back(std::move(row));
    }

  for (EdgeId e = 0; e < E; ++e)
    for (int t = 1; t <= T; ++t) {
      LpRow row{RowFamily::arrival_edge, e, t, {}, {}, in.arrival(in.edge(e).task, t)};
      for (LevelId l = 0; l < L; ++l) add(row, e, l, t, 1.0);
      lp.rows.push_back(std::move(row));
    }

  for (MachineId u = 0; u < in.machine_count(); ++u)
    for (int t = 1; t <= T; ++t) {
      LpRow row{RowFamily::machine_slot, u, t, {}, {}, 1.0};
      for (EdgeId e : in.edges_of_machine(u))
        for (LevelId l = 0; l < L; ++l) add(row, e, l, t, 1.0);
      lp.rows.push_back(std::move(row));
    }
  return lp;
}

namespace {

LpStatus convert(simplex::Status s) {
  switch (s) {
    case simplex::Status::optimal: return LpStatus::optimal;
    case simplex::Status::infeasible: return LpStatus::infeasible;
    case simplex::Status::unbounded: return LpStatus::unbounded;
    case simplex::Status::iteration_limit: return LpStatus::iteration_limit;
  }
  return LpStatus::iteration_limit;
}

}  // namespace

LpSolution solve(const LpProblem& problem, double tol, SolverKind kind) {
  require(tol > 0.0, ErrorKind::invalid_argument, "LP tolerance must be positive");
  const auto sparse = problem.to_sparse();
  simplex::Options opt;
  opt.optimality_tol = std::min(1e-9, tol);
  const auto res = kind == SolverKind::revised ? simplex::revised_simplex(sparse, opt) : simplex::dense_tableau(sparse, opt);

  LpSolution sol;
  sol.status = convert(res.status);
  sol.edges = problem.edges;
  sol.levels = problem.levels;
  sol.horizon = problem.horizon;
  sol.iterations = res.iterations;
  sol.x.assign(problem.column_of.size(), 0.0);
  for (std::size_t s = 0; s < problem.column_of.size(); ++s) {
    const int c = problem.column_of[s];
    if (c < 0) continue;
    const double v = res.x[c];
    sol.x[s] = v < 1e-12 ? 0.0 : v;
  }
  double obj = 0.0;
  for (std::size_t s = 0; s < problem.column_of.size(); ++s)
    if (problem.column_of[s] >= 0) obj += problem.objective[problem.column_of[s]] * sol.x[s];
  sol.objective = obj;
  return sol;
}

LpSolution solve_off(const Instance& instance, double tol, const LevelMask* mask) {
  const auto problem = build_off(instance, mask);
  auto sol = solve(problem, tol);
  require(sol.status == LpStatus::optimal, ErrorKind::contract_violation,
          "offline LP did not reach optimality: " + to_string(sol.status));
  double bound = 0.0;
  for (const Edge& e : instance.edges())
    for (int t = 1; t <= instance.horizon(); ++t)
      bound += e.accept_prob * instance.reward(e.id, instance.levels() - 1) * instance.arrival(e.task, t);
  require(sol.objective <= bound * (1.0 + 1e-9) + 1e-9, ErrorKind::contract_violation,
          "offline LP objective exceeds the sum q r p bound");
  return sol;
}

Residual residual(const LpProblem& problem, const LpSolution& sol) {
  Residual res;
  std::vector<double> by_col(problem.columns, 0.0);
  for (std::size_t s = 0; s < problem.column_of.size(); ++s)
    if (problem.column_of[s] >= 0) by_col[problem.column_of[s]] = sol.x[s];
  for (double v : sol.x) res.min_component = std::min(res.min_component, v);
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const auto& r = problem.rows[i];
    double lhs = 0.0;
    for (std::size_t k = 0; k < r.cols.size(); ++k) lhs += r.vals[k] * by_col[r.cols[k]];
    const double viol = lhs - r.rhs;
    if (viol > res.max_violation) {
      res.max_violation = viol;
      res.row = static_cast<int>(i);
    }
  }
  return res;
}

Residual residual(const Instance& in, const LpSolution& x) {
  require(x.matches(in), ErrorKind::invalid_argument, "LP solution does not match instance dimensions");
  Residual res;
  int row = 0;
  const auto note = [&](double lhs, double rhs) {
    if (lhs - rhs > res.max_violation) {
      res.max_violation = lhs - rhs;
      res.row = row;
    }
    ++row;
  };
  for (double v : x.x) res.min_component = std::min(res.min_component, v);
  const int T = in.horizon();
  const int L = in.levels();

  for (MachineId u = 0; u < in.machine_count(); ++u)
    for (int t = 1; t <= T; ++t) {
      double lhs = 0.0;
      for (EdgeId e : in.edges_of_machine(u))
        for (LevelId l = 0; l < L; ++l) {
          const double q = in.edge(e).accept_prob;
          for (int tp = 1; tp < t; ++tp) lhs += q * x.at(e, l, tp) * in.delay(l).tail(t - tp + 1);
          lhs += q * x.at(e, l, t);
        }
      note(lhs, 1.0);
    }
  for (MachineId u = 0; u < in.machine_count(); ++u) {
    if (in.budget(u).is_unlimited()) continue;
    double lhs = 0.0;
    for (EdgeId e : in.edges_of_machine(u))
      for (LevelId l = 0; l < L; ++l)
        for (int t = 1; t <= T; ++t) {
          const double q = in.edge(e).accept_prob;
          lhs += x.at(e, l, t) * (in.theta_max() * q * in.delay(l).tail_above(T - t) + (1.0 - q) * in.penalty(l));
        }
    note(lhs, in.budget(u).value() + in.theta_max() - 1.0);
  }
  for (TaskId v = 0; v < in.task_count(); ++v)
    for (int t = 1; t <= T; ++t) {
      double lhs = 0.0;
      for (EdgeId e : in.edges_of_task(v))
        for (LevelId l = 0; l < L; ++l) lhs += x.at(e, l, t);
      note(lhs, in.arrival(v, t));
    }
  for (EdgeId e = 0; e < in.edge_count(); ++e)
    for (int t = 1; t <= T; ++t) {
      double lhs = 0.0;
      for (LevelId l = 0; l < L; ++l) lhs += x.at(e, l, t);
      note(lhs, in.arrival(in.edge(e).task, t));
    }
  for (MachineId u = 0; u < in.machine_count(); ++u)
    for (int t = 1; t <= T; ++t) {
      double lhs = 0.0;
      for (EdgeId e : in.edges_of_machine(u))
        for (LevelId l = 0; l < L; ++l) lhs += x.at(e, l, t);
      note(lhs, 1.0);
    }
  return res;
}

double lp_objective(const Instance& in, const LpSolution& x) {
  double obj = 0.0;
  for (const Edge& e : in.edges())
    for (LevelId l = 0; l < in.levels(); ++l)
      for (int t = 1; t <= in.horizon(); ++t) obj += e.accept_prob * in.reward(e.id, l) * x.at(e.id, l, t);
  return obj;
}

void write_lp(const LpProblem& problem, std::ostream& out) {
  std::size_t nnz = 0;
  for (const auto& r : problem.rows) nnz += r.cols.size();
  out << problem.rows.size() << ' ' << problem.columns << ' ' << nnz << '\n';
  for (std::size_t i = 0; i < problem.rows.size(); ++i) out << (i ? " " : "") << "L";
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < problem.rows.size(); ++i) {
    const auto& r = problem.rows[i];
    for (std::size_t k = 0; k < r.cols.size(); ++k) out << i << ' ' << r.cols[k] << ' ' << r.vals[k] << '\n';
  }
  for (std::size_t i = 0; i < problem.rows.size(); ++i) out << "rhs " << i << ' ' << problem.rows[i].rhs << '\n';
  for (int j = 0; j < problem.columns; ++j) out << "obj " << j << ' ' << problem.objective[j] << '\n';
}

std::string solution_to_json(const LpSolution& sol) {
  nlohmann::ordered_json j;
  j["status"] = to_string(sol.status);
  j["objective"] = sol.objective;
  j["edges"] = sol.edges;
  j["levels"] = sol.levels;
  j["horizon"] = sol.horizon;
  j["iterations"] = sol.iterations;
  j["x"] = sol.x;
  return j.dump() + "\n";
}

LpSolution solution_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::invalid_argument, std::string("LP solution json: ") + e.what());
  }
  LpSolution sol;
  try {
    const auto status = j.at("status").get<std::string>();
    sol.status = status == "optimal"     ? LpStatus::optimal
                 : status == "infeasible" ? LpStatus::infeasible
                 : status == "unbounded"  ? LpStatus::unbounded
                                          : LpStatus::iteration_limit;
    sol.objective = j.at("objective").get<double>();
    sol.edges = j.at("edges").get<int>();
    sol.levels = j.at("levels").get<int>();
    sol.horizon = j.at("horizon").get<int>();
    sol.iterations = j.value("iterations", std::int64_t{0});
    sol.x = j.at("x").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("LP solution json: ") + e.what());
  }
  require(sol.x.size() == static_cast<std::size_t>(sol.edges) * sol.levels * sol.horizon, ErrorKind::invalid_argument,
          "LP solution json: x has wrong length");
  return sol;
}

}  // namespace omla
