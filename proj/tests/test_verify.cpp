#include <doctest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "omla/gen.hpp"
#include "omla/verify.hpp"

using namespace omla;

TEST_SUITE("verify") {
  TEST_CASE("competitive constants") {
    CHECK(limited_constant(1) == 0.5);
    CHECK(limited_constant(2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(limited_constant(5) == doctest::Approx(5.0 / 14.0).epsilon(1e-15));
    CHECK(limited_constant(20) == doctest::Approx(20.0 / 59.0).epsilon(1e-15));
    for (int d = 1; d < 50; ++d) {
      CHECK(limited_constant(d + 1) < limited_constant(d));
      CHECK(limited_constant(d) > 1.0 / 3.0);
    }
    CHECK(competitive_constant(gen::hardness(0.3)) == 0.5);
    CHECK(competitive_constant(test::two_slot_instance()) == 0.5);
  }

  TEST_CASE("small instances pass every check") {
    for (std::uint64_t s = 1; s <= 20; ++s) {
      gen::SmallConfig c;
      c.seed = s;
      c.delta_cap = s % 2 ? Budget::finite(3) : Budget::unlimited();
      const Instance in = gen::small_random(c);
      const BoundReport rep = check_all(in);
      CHECK(rep.pass);
      CHECK(rep.find("X")->pass);
      REQUIRE(rep.opt_value.has_value());
      CHECK(rep.lp_value >= *rep.opt_value - 1e-6);
      CHECK(rep.ratio >= rep.constant - 1e-9);
      REQUIRE(rep.find("L1") != nullptr);
      CHECK(rep.find("L2") != nullptr);
    }
  }

  TEST_CASE("synthetic instances pass with both budget regimes") {
    for (std::uint64_t s = 1; s <= 4; ++s) {
      gen::SyntheticConfig c;
      c.machines = 4;
      c.tasks = 8;
      c.horizon = 20;
      c.levels = 3;
      c.edge_prob = 0.3;
      c.delta_cap = s % 2 ? Budget::finite(4) : Budget::unlimited();
      c.seed = s;
      const BoundReport rep = check_all(gen::synthetic(c));
      CHECK(rep.pass);
      CHECK_FALSE(rep.opt_value.has_value());
      CHECK(rep.find("L1") == nullptr);
      if (s % 2) {
        CHECK(rep.find("L5") != nullptr);
        CHECK(rep.find("L6") != nullptr);
      } else {
        CHECK(rep.find("L3") != nullptr);
      }
    }
  }

  TEST_CASE("oracle can be switched off") {
    VerifyOptions opt;
    opt.oracle = false;
    const BoundReport rep = check_all(gen::hardness(0.5), opt);
    CHECK_FALSE(rep.opt_value.has_value());
    CHECK(rep.find("L1") == nullptr);
  }

  TEST_CASE("an inflated solution is caught") {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      gen::SmallConfig c;
      c.seed = s;
      const Instance in = gen::small_random(c);
      LpSolution x = solve_off(in);
      for (double& v : x.x) v += 0.5;
      x.objective = lp_objective(in, x);
      const BoundReport rep = check_all(in, x);
      CHECK_FALSE(rep.pass);
      REQUIRE(rep.find("X") != nullptr);
      CHECK_FALSE(rep.find("X")->pass);
      CHECK(rep.find("X")->where.rfind("row ", 0) == 0);
    }
  }

  TEST_CASE("report is deterministic and serializes") {
    gen::SmallConfig c;
    c.seed = 9;
    const Instance in = gen::small_random(c);
    const BoundReport a = check_all(in);
    const BoundReport b = check_all(in);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.to_table() == b.to_table());
    const auto j = nlohmann::json::parse(a.to_json());
    CHECK(j.contains("checks"));
    for (const auto& chk : a.checks) CHECK(chk.pass == (chk.slack >= -a.tol));
  }
}
