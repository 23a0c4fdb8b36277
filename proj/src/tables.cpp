#include "omla/tables.hpp"

#include <algorithm>
#include <ostream>

#include "omla/error.hpp"

namespace omla {

ValueTables::ValueTables(int max_budget, int machines, int edges, int levels, int horizon)
    : max_budget_(max_budget),
      machines_(machines),
      edges_(edges),
      levels_(levels),
      horizon_(horizon),
      r_(static_cast<std::size_t>(max_budget) * machines * horizon, 0.0),
      q_(static_cast<std::size_t>(max_budget) * edges * levels * horizon, 0.0) {}

ValueTablesUnlimited::ValueTablesUnlimited(int machines, int edges, int levels, int horizon)
    : levels_(levels),
      horizon_(horizon),
      r_(static_cast<std::size_t>(machines) * horizon, 0.0),
      q_(static_cast<std::size_t>(edges) * levels * horizon, 0.0) {}

namespace {

/// sum_{k=1}^{T-t} Pr{d = k} * next(t + k)
template <class Baseline>
double delay_convolution(const DelayDist& d, int t, int T, Baseline&& next) {
  const int kmax = std::min(T - t, d.support_max());
  double acc = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    const double p = d.prob(k);
    if (p != 0.0) acc += p * next(t + k);
  }
  return acc;
}

void fill_machine_finite(const Instance& in, const LpSolution& x, MachineId u, ValueTables& out) {
  const int T = in.horizon();
  const int L = in.levels();
  const int max_delta = out.max_budget();
  const auto& edges = in.edges_of_machine(u);
  std::vector<double> conv(L);
  for (int t = T; t >= 1; --t) {
    double mass = 0.0;
    for (EdgeId e : edges)
      for (LevelId l = 0; l < L; ++l) mass += x.at(e, l, t);
    for (int delta = 1; delta <= max_delta; ++delta) {
      for (LevelId l = 0; l < L; ++l)
        conv[l] = delay_convolution(in.delay(l), t, T, [&](int s) { return out.baseline(delta, u, s); });
      const double next = out.baseline(delta, u, t + 1);
      double r = (1.0 - mass) * next;
      for (EdgeId e : edges) {
        const double q = in.edge(e).accept_prob;
        for (LevelId l = 0; l < L; ++l) {
          const double act =
              q * (in.reward(e, l) + conv[l]) + (1.0 - q) * out.baseline(delta - in.penalty(l), u, t + 1);
          out.activation_ref(delta, e, l, t) = act;
          r += x.at(e, l, t) * std::max(act, next);
        }
      }
      out.baseline_ref(delta, u, t) = r;
    }
  }
}

void fill_machine_unlimited(const Instance& in, const LpSolution& x, MachineId u, ValueTablesUnlimited& out) {
  const int T = in.horizon();
  const int L = in.levels();
  const auto& edges = in.edges_of_machine(u);
  std::vector<double> conv(L);
  for (int t = T; t >= 1; --t) {
    double mass = 0.0;
    for (EdgeId e : edges)
      for (LevelId l = 0; l < L; ++l) mass += x.at(e, l, t);
    for (LevelId l = 0; l < L; ++l)
      conv[l] = delay_convolution(in.delay(l), t, T, [&](int s) { return out.baseline(u, s); });
    const double next = out.baseline(u, t + 1);
    double r = (1.0 - mass) * next;
    for (EdgeId e : edges) {
      const double q = in.edge(e).accept_prob;
      for (LevelId l = 0; l < L; ++l) {
        const double act = q * (in.reward(e, l) + conv[l]) + (1.0 - q) * next;
        out.activation_ref(e, l, t) = act;
        r += x.at(e, l, t) * std::max(act, next);
      }
    }
    out.baseline_ref(u, t) = r;
  }
}

void check_solution(const Instance& in, const LpSolution& x) {
  require(x.matches(in), ErrorKind::invalid_argument, "LP solution does not match instance dimensions");
}

}  // namespace

ValueTables compute_tables(const Instance& in, const LpSolution& x) {
  check_solution(in, x);
  require(in.all_finite(), ErrorKind::invalid_argument,
          "compute_tables needs finite budgets; use compute_tables_unlimited for unlimited machines");
  ValueTables out(in.max_finite_budget(), in.machine_count(), in.edge_count(), in.levels(), in.horizon());
  for (MachineId u = 0; u < in.machine_count(); ++u) fill_machine_finite(in, x, u, out);
  return out;
}

ValueTablesUnlimited compute_tables_unlimited(const Instance& in, const LpSolution& x) {
  check_solution(in, x);
  require(in.all_unlimited(), ErrorKind::invalid_argument,
          "compute_tables_unlimited needs unlimited budgets on every machine");
  ValueTablesUnlimited out(in.machine_count(), in.edge_count(), in.levels(), in.horizon());
  for (MachineId u = 0; u < in.machine_count(); ++u) fill_machine_unlimited(in, x, u, out);
  return out;
}

TableSet::TableSet(const Instance& in, const LpSolution& x) {
  check_solution(in, x);
  unlimited_.resize(in.machine_count());
  bool any_finite = false;
  bool any_unlimited = false;
  for (MachineId u = 0; u < in.machine_count(); ++u) {
    unlimited_[u] = in.budget(u).is_unlimited() ? 1 : 0;
    (unlimited_[u] ? any_unlimited : any_finite) = true;
  }
  if (any_finite) {
    finite_tables_ = ValueTables(in.max_finite_budget(), in.machine_count(), in.edge_count(), in.levels(), in.horizon());
    for (MachineId u = 0; u < in.machine_count(); ++u)
      if (!unlimited_[u]) fill_machine_finite(in, x, u, finite_tables_);
  }
  if (any_unlimited) {
    unlimited_tables_ = ValueTablesUnlimited(in.machine_count(), in.edge_count(), in.levels(), in.horizon());
    for (MachineId u = 0; u < in.machine_count(); ++u)
      if (unlimited_[u]) fill_machine_unlimited(in, x, u, unlimited_tables_);
  }
}

double TableSet::initial_value(const Instance& in, MachineId u) const {
  const Budget& b = in.budget(u);
  return baseline(u, b.is_unlimited() ? 0 : b.value(), 1);
}

double TableSet::expected_reward(const Instance& in) const {
  double total = 0.0;
  for (MachineId u = 0; u < in.machine_count(); ++u) total += initial_value(in, u);
  return total;
}

TableDiagnostics diagnose(const ValueTables& tables, int machines) {
  TableDiagnostics diag;
  for (int delta = 1; delta <= tables.max_budget(); ++delta)
    for (MachineId u = 0; u < machines; ++u)
      for (int t = 1; t <= tables.horizon(); ++t) {
        const double r = tables.baseline(delta, u, t);
        diag.time_violation = std::max(diag.time_violation, tables.baseline(delta, u, t + 1) - r);
        if (delta > 1) diag.budget_violation = std::max(diag.budget_violation, tables.baseline(delta - 1, u, t) - r);
      }
  return diag;
}

void write_baseline_csv(const Instance& in, const TableSet& tables, std::ostream& out) {
  out << "delta,u,t,R\n";
  out.precision(17);
  for (MachineId u = 0; u < in.machine_count(); ++u) {
    if (tables.unlimited(u)) {
      for (int t = 1; t <= in.horizon(); ++t) out << "inf," << u << ',' << t << ',' << tables.baseline(u, 0, t) << '\n';
      continue;
    }
    for (int delta = 1; delta <= tables.finite().max_budget(); ++delta)
      for (int t = 1; t <= in.horizon(); ++t)
        out << delta << ',' << u << ',' << t << ',' << tables.baseline(u, delta, t) << '\n';
  }
}

}  // namespace omla
