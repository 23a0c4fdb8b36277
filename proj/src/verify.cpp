#include "omla/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omla/error.hpp"
#include "omla/oracle.hpp"
#include "omla/reference.hpp"
#include "omla/tables.hpp"

namespace omla {

namespace {

double normalized_slack(double lhs, double rhs) { return (lhs - rhs) / std::max(1.0, std::abs(rhs)); }

// Tracks the worst slack over many entries.
struct Worst {
  double slack = INFINITY;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string where;
  bool seen = false;

  void offer(double l, double r, const std::string& at) {
    const double s = normalized_slack(l, r);
    if (!seen || s < slack) {
      slack = s;
      lhs = l;
      rhs = r;
      where = at;
      seen = true;
    }
  }
};

BoundCheck make_check(std::string name, std::string statement, const Worst& w, double tol) {
  BoundCheck c{std::move(name), std::move(statement), w.lhs, w.rhs, w.seen ? w.slack : 0.0, w.where, true};
  c.pass = c.slack >= -tol;
  return c;
}

BoundCheck compose(std::string name, std::string statement, const std::vector<const BoundCheck*>& parts) {
  BoundCheck c;
  c.name = std::move(name);
  c.statement = std::move(statement);
  c.slack = INFINITY;
  for (const BoundCheck* p : parts) {
    c.pass = c.pass && p->pass;
    if (p->slack < c.slack) {
      c.slack = p->slack;
      c.where = p->name;
    }
  }
  c.where = "from " + c.where;
  return c;
}

std::string at(const char* fmt, int a, int b, int c, int d = -1) {
  char buf[96];
  if (d >= 0)
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  else
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

}  // namespace

double limited_constant(int budget) {
  require(budget >= 1, ErrorKind::invalid_argument, "budget must be positive");
  return budget / (3.0 * budget - 1.0);
}

double competitive_constant(const Instance& in) {
  return in.all_unlimited() ? 0.5 : limited_constant(in.max_finite_budget());
}

const BoundCheck* BoundReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

BoundReport check_all(const Instance& in, const VerifyOptions& opt) {
  return check_all(in, solve_off(in), opt);
}

BoundReport check_all(const Instance& in, const LpSolution& x, const VerifyOptions& opt) {
  require_valid(in);
  require(x.matches(in), ErrorKind::invalid_argument, "LP solution does not match instance dimensions");
  const double tol = opt.tol;
  const int U = in.machine_count();
  const int L = in.levels();
  const int T = in.horizon();

  BoundReport rep;
  rep.tol = tol;
  rep.lp_value = lp_objective(in, x);
  const TableSet tables(in, x);
  const RefTables ref = ref_tables(in, ref_params(in, x));
  const int dmax = in.all_unlimited() ? 0 : in.max_finite_budget();

  bool any_unlimited = false, any_finite = false;
  for (MachineId u = 0; u < U; ++u) (in.budget(u).is_unlimited() ? any_unlimited : any_finite) = true;

  // The bounds below assume x* is feasible; a violated row is reported by row index.
  {
    const Residual res = residual(in, x);
    Worst w;
    w.offer(0.0, std::max({0.0, res.max_violation, -res.min_component}),
            res.max_violation > 0.0 ? "row " + std::to_string(res.row) : "");
    rep.checks.push_back(make_check("X", "x* satisfies every LP(Off) row and x* >= 0", w, tol));
  }

  if (opt.oracle && within_limits(in)) {
    const double v = exact_opt(in).value;
    rep.opt_value = v;
    Worst w;
    w.offer(rep.lp_value, v, "");
    rep.checks.push_back(make_check("L1", "LP(Off) >= E[OPT]", w, tol));
  }

  // Per-machine LP share sum_{e in E_u,l,t} q r x*.
  std::vector<double> share(U, 0.0);
  for (MachineId u = 0; u < U; ++u)
    for (EdgeId e : in.edges_of_machine(u))
      for (LevelId l = 0; l < L; ++l)
        for (int t = 1; t <= T; ++t) share[u] += in.edge(e).accept_prob * in.reward(e, l) * x.at(e, l, t);

  Worst l2;
  for (MachineId u = 0; u < U; ++u) {
    const bool unl = in.budget(u).is_unlimited();
    for (int delta = unl ? 0 : 1; delta <= (unl ? 0 : dmax); ++delta)
      for (int t = 1; t <= T; ++t)
        l2.offer(tables.baseline(u, delta, t), ref.baseline(u, delta, t), at("delta=%d u=%d t=%d", delta, u, t));
  }
  rep.checks.push_back(make_check("L2", "R >= R~ entrywise", l2, tol));
  const BoundCheck l2c = rep.checks.back();

  if (any_unlimited) {
    Worst w;
    for (MachineId u = 0; u < U; ++u)
      if (in.budget(u).is_unlimited()) w.offer(ref.initial_value(in, u), 0.5 * share[u], "u=" + std::to_string(u));
    rep.checks.push_back(make_check("L3", "R~_{u,1} >= 1/2 sum q r x*", w, tol));
    const BoundCheck l3c = rep.checks.back();
    rep.checks.push_back(compose("L4", "R_{u,1} >= 1/2 sum q r x* (L2 + L3)", {&l2c, &l3c}));
  }

  if (any_finite) {
    Worst l5;
    for (MachineId u = 0; u < U; ++u) {
      if (in.budget(u).is_unlimited()) continue;
      for (int delta = 1; delta <= dmax; ++delta)
        for (int t = 1; t <= T; ++t)
          for (LevelId l = 0; l < L; ++l) {
            const int lower = delta - in.penalty(l);
            const double rhs = static_cast<double>(lower) / delta * ref.baseline(u, delta, t);
            l5.offer(ref.baseline(u, lower, t), rhs, at("delta=%d u=%d t=%d l=%d", delta, u, t, l + 1));
          }
    }
    rep.checks.push_back(make_check("L5", "R~^{d-theta} >= ((d-theta)/d) R~^d entrywise", l5, tol));
    const BoundCheck l5c = rep.checks.back();

    Worst l6;
    for (MachineId u = 0; u < U; ++u) {
      if (in.budget(u).is_unlimited()) continue;
      const int b = in.budget(u).value();
      l6.offer(ref.initial_value(in, u), limited_constant(b) * share[u], "u=" + std::to_string(u));
    }
    rep.checks.push_back(make_check("L6", "R~^{D_u}_{u,1} >= D_u/(3D_u-1) sum q r x*", l6, tol));
    const BoundCheck l6c = rep.checks.back();
    rep.checks.push_back(compose("L7", "R^{D_u}_{u,1} >= D_u/(3D_u-1) sum q r x* (L2 + L5 + L6)", {&l2c, &l5c, &l6c}));
  }

  rep.omla_value = tables.expected_reward(in);
  rep.constant = competitive_constant(in);
  rep.ratio = rep.lp_value > 0.0 ? rep.omla_value / rep.lp_value : 1.0;
  Worst th;
  th.offer(rep.omla_value, rep.constant * rep.lp_value, "");
  rep.checks.push_back(make_check(in.all_unlimited() ? "T1" : "T2",
                                  in.all_unlimited() ? "sum_u R_{u,1} >= 1/2 LP(Off)" : "sum_u R_{u,1} >= D/(3D-1) LP(Off)",
                                  th, tol));

  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

std::string BoundReport::to_json() const {
  nlohmann::ordered_json j;
  j["pass"] = pass;
  j["tol"] = tol;
  j["lp_off"] = lp_value;
  if (opt_value) j["exact_opt"] = *opt_value;
  j["omla_expected"] = omla_value;
  j["ratio"] = ratio;
  j["constant"] = constant;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["statement"] = c.statement;
    e["lhs"] = c.lhs;
    e["rhs"] = c.rhs;
    e["slack"] = c.slack;
    e["where"] = c.where;
    e["pass"] = c.pass;
    arr.push_back(std::move(e));
  }
  j["checks"] = std::move(arr);
  return j.dump(2);
}

std::string BoundReport::to_table() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s %-6s %14s %14s %12s  %s\n", "chk", "result", "lhs", "rhs", "slack", "worst at");
  out << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-4s %-6s %14.8g %14.8g %12.4e  %s\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                  c.lhs, c.rhs, c.slack, c.where.c_str());
    out << line;
  }
  std::snprintf(line, sizeof line, "LP(Off) %.10g  E[OMLA] %.10g  ratio %.6f  bound %.6f  %s\n", lp_value, omla_value,
                ratio, constant, pass ? "ALL PASS" : "FAILED");
  out << line;
  return out.str();
}

}  // namespace omla
