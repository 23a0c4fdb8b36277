#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "omla/error.hpp"
#include "omla/gen.hpp"
#include "omla/oracle.hpp"
#include "omla/policies.hpp"
#include "omla/tables.hpp"

using namespace omla;

namespace {

Instance small_synthetic(std::uint64_t seed, Budget cap, int levels = 3) {
  gen::SyntheticConfig c;
  c.machines = 4;
  c.tasks = 6;
  c.horizon = 15;
  c.levels = levels;
  c.edge_prob = 0.4;
  c.delta_cap = cap;
  c.seed = seed;
  return gen::synthetic(c);
}

Instance with_certain_acceptance(const Instance& in) {
  InstanceData d = in.data();
  for (Edge& e : d.edges) e.accept_prob = 1.0;
  return Instance(std::move(d));
}

}  // namespace

TEST_SUITE("tables") {
  TEST_CASE("two-slot example by hand") {
    const Instance in = test::two_slot_instance();
    const LpSolution x = test::two_slot_solution();
    const ValueTables tab = compute_tables(in, x);
    // Q_2 = 0.5*4 = 2, R_2 = 0.5*2 = 1, Q_1 = 0.5*(4 + R_2) = 2.5, R_1 = 0.5*2.5 + 0.5*1.
    CHECK(tab.activation(1, 0, 0, 2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(tab.baseline(1, 0, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tab.activation(1, 0, 0, 1) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(tab.baseline(1, 0, 1) == doctest::Approx(1.75).epsilon(1e-15));
  }

  TEST_CASE("two-slot example agrees with the exact policy evaluation") {
    const Instance in = test::two_slot_instance();
    auto art = std::make_shared<OmlaArtifacts>();
    art->x = test::two_slot_solution();
    art->tables = TableSet(in, art->x);
    const OmlaPolicy pol(in, art);
    CHECK(art->tables.expected_reward(in) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(exact_policy_value(in, pol).value == doctest::Approx(1.75).epsilon(1e-12));
  }

  TEST_CASE("boundary values are zero") {
    const Instance in = test::two_slot_instance();
    const ValueTables tab = compute_tables(in, test::two_slot_solution());
    CHECK(tab.baseline(0, 0, 1) == 0.0);
    CHECK(tab.baseline(-1, 0, 1) == 0.0);
    CHECK(tab.baseline(1, 0, 3) == 0.0);
    CHECK(tab.activation(1, 0, 0, 3) == 0.0);
  }

  TEST_CASE("single slot: R equals expected immediate reward") {
    const Instance in(test::single_edge_data(1, 2, Budget::finite(2), 0.7, {1.0, 3.0}, 0.9, {1, 1},
                                             {DelayDist::point_mass(1), DelayDist::point_mass(2)}));
    const LpSolution x = solve_off(in);
    const ValueTables tab = compute_tables(in, x);
    double expect = 0.0;
    for (LevelId l = 0; l < 2; ++l) {
      CHECK(tab.activation(2, 0, l, 1) == doctest::Approx(0.7 * in.reward(0, l)).epsilon(1e-15));
      expect += x.at(0, l, 1) * 0.7 * in.reward(0, l);
    }
    CHECK(tab.baseline(2, 0, 1) == doctest::Approx(expect).epsilon(1e-14));
  }

  TEST_CASE("unlimited tables equal finite tables with a budget that cannot run out") {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const Instance unl = small_synthetic(s, Budget::unlimited());
      const LpSolution x = solve_off(unl);
      const int big = unl.horizon() * unl.theta_max() + 1;
      const Instance fin = test::with_uniform_budget(unl, Budget::finite(big));
      const ValueTablesUnlimited tu = compute_tables_unlimited(unl, x);
      const ValueTables tf = compute_tables(fin, x);
      for (MachineId u = 0; u < unl.machine_count(); ++u)
        for (int t = 1; t <= unl.horizon(); ++t)
          CHECK(tf.baseline(big, u, t) == doctest::Approx(tu.baseline(u, t)).epsilon(1e-12));
    }
  }

  TEST_CASE("with certain acceptance the budget never matters") {
    const Instance fin = with_certain_acceptance(small_synthetic(3, Budget::finite(3)));
    const Instance unl = test::with_uniform_budget(fin, Budget::unlimited());
    const LpSolution x = solve_off(fin);
    const ValueTables tf = compute_tables(fin, x);
    const ValueTablesUnlimited tu = compute_tables_unlimited(unl, x);
    for (MachineId u = 0; u < fin.machine_count(); ++u)
      for (int d = 1; d <= tf.max_budget(); ++d)
        for (int t = 1; t <= fin.horizon(); ++t)
          CHECK(tf.baseline(d, u, t) == doctest::Approx(tu.baseline(u, t)).epsilon(1e-12));
  }

  TEST_CASE("baseline is monotone in time and budget") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
      const Instance in = small_synthetic(s, Budget::finite(5));
      const ValueTables tab = compute_tables(in, solve_off(in));
      const TableDiagnostics diag = diagnose(tab, in.machine_count());
      CHECK(diag.time_violation <= 1e-12);
      CHECK(diag.budget_violation <= 1e-12);
    }
  }

  TEST_CASE("mixed budgets route each machine to its own table") {
    const Instance base = small_synthetic(4, Budget::finite(3));
    std::vector<Budget> budgets(base.machine_count(), Budget::finite(2));
    budgets[1] = Budget::unlimited();
    const Instance in = test::with_budgets(base, budgets);
    const LpSolution x = solve_off(in);
    const TableSet set(in, x);
    CHECK(set.unlimited(1));
    CHECK_FALSE(set.unlimited(0));
    const ValueTablesUnlimited tu = compute_tables_unlimited(test::with_uniform_budget(in, Budget::unlimited()), x);
    const ValueTables tf = compute_tables(test::with_uniform_budget(in, Budget::finite(2)), x);
    CHECK(set.baseline(1, 7, 1) == tu.baseline(1, 1));
    CHECK(set.baseline(0, 2, 1) == tf.baseline(2, 0, 1));
    double sum = 0.0;
    for (MachineId u = 0; u < in.machine_count(); ++u) sum += set.initial_value(in, u);
    CHECK(set.expected_reward(in) == doctest::Approx(sum).epsilon(1e-15));
  }

  TEST_CASE("wrong budget type is rejected") {
    const Instance fin = test::two_slot_instance();
    const Instance unl = test::with_uniform_budget(fin, Budget::unlimited());
    const LpSolution x = test::two_slot_solution();
    CHECK_THROWS_AS(compute_tables(unl, x), Error);
    CHECK_THROWS_AS(compute_tables_unlimited(fin, x), Error);
  }

  TEST_CASE("solution shape must match the instance") {
    const Instance in = test::two_slot_instance();
    LpSolution x = test::two_slot_solution();
    x.horizon = 3;
    x.x.push_back(0.0);
    CHECK_THROWS_AS(compute_tables(in, x), Error);
  }

  TEST_CASE("baseline csv lists every entry") {
    const Instance base = small_synthetic(2, Budget::finite(2), 2);
    std::vector<Budget> budgets(base.machine_count(), Budget::finite(2));
    budgets[0] = Budget::unlimited();
    const Instance in = test::with_budgets(base, budgets);
    const TableSet set(in, solve_off(in));
    std::ostringstream out;
    write_baseline_csv(in, set, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "delta,u,t,R");
    int rows = 0, inf_rows = 0;
    while (std::getline(lines, line)) {
      ++rows;
      if (line.rfind("inf,", 0) == 0) ++inf_rows;
    }
    CHECK(inf_rows == in.horizon());
    CHECK(rows == in.horizon() + (in.machine_count() - 1) * 2 * in.horizon());
  }
}
