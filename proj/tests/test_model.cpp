#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "omla/error.hpp"
#include "omla/gen.hpp"
#include "omla/instance_io.hpp"
#include "omla/model.hpp"

using namespace omla;

namespace {

bool has_issue(const ValidationReport& rep, const std::string& code) {
  return std::any_of(rep.issues.begin(), rep.issues.end(), [&](const ValidationIssue& i) { return i.code == code; });
}

InstanceData base_two_level() {
  return test::single_edge_data(3, 2, Budget::finite(2), 0.8, {1.0, 2.0}, 0.5, {1, 2},
                                {DelayDist::point_mass(1), DelayDist::point_mass(2)});
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("point mass and two-point delay means") {
    CHECK(expected_delay(DelayDist::point_mass(3)) == 3.0);
    CHECK(expected_delay(DelayDist::from_pmf({{1, 0.5}, {2, 0.5}})) == 1.5);
  }

  TEST_CASE("clamped binomial mean matches direct summation") {
    // sum_k max(k,1) C(100,k) 0.05^k 0.95^(100-k), summed independently in double precision.
    const DelayDist d = gen::clamped_binomial(100, 0.05);
    CHECK(d.expected() == doctest::Approx(5.0059205292203135).epsilon(1e-12));
    CHECK(d.support_min() == 1);
  }

  TEST_CASE("tail equals the direct suffix sum") {
    const DelayDist d = DelayDist::from_pmf({{1, 0.2}, {3, 0.5}, {4, 0.3}});
    CHECK(d.tail(1) == 1.0);
    CHECK(d.tail(0) == 1.0);
    for (int k = 1; k <= d.support_max() + 1; ++k) {
      double direct = 0.0;
      for (int j = k; j <= d.support_max(); ++j) direct += d.prob(j);
      CHECK(d.tail(k) == doctest::Approx(direct).epsilon(1e-15));
      CHECK(d.tail_above(k - 1) == d.tail(k));
      if (k > 1) CHECK(d.tail(k) <= d.tail(k - 1));
    }
    CHECK(d.tail(d.support_max() + 1) == 0.0);
    CHECK(d.tail(50) == 0.0);
  }

  TEST_CASE("mass at zero folds into one") {
    const DelayDist d = DelayDist::from_pmf({{0, 0.25}, {1, 0.25}, {2, 0.5}});
    CHECK(d.prob(1) == 0.5);
    CHECK(d.prob(2) == 0.5);
    CHECK(d.support_min() == 1);
  }

  TEST_CASE("negative or empty pmf is rejected") {
    CHECK_THROWS_AS(DelayDist::from_pmf({{1, -0.1}, {2, 1.1}}), Error);
    CHECK_THROWS_AS(DelayDist::from_pmf({}), Error);
  }

  TEST_CASE("valid instance passes and validate is repeatable") {
    const Instance in(base_two_level());
    const auto a = validate(in);
    const auto b = validate(in);
    CHECK(a.ok());
    CHECK(a.issues.size() == b.issues.size());
    CHECK(in.theta_max() == 2);
  }

  TEST_CASE("decreasing rewards are reported") {
    InstanceData d = base_two_level();
    d.rewards = {2.0, 1.0};
    const auto rep = validate(Instance(d));
    REQUIRE(has_issue(rep, "rewards_not_increasing"));
    CHECK(rep.summary().find("rewards not increasing in level") != std::string::npos);
  }

  TEST_CASE("arrival mass above one is reported with its slot") {
    InstanceData d;
    d.horizon = 3;
    d.levels = 1;
    d.budgets = {Budget::unlimited()};
    d.task_count = 2;
    d.edges = {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}};
    d.rewards = {1.0, 1.0};
    d.penalties = {1};
    d.arrivals = {0.1, 0.1, 0.6, 0.1, 0.1, 0.6};
    d.delays = {DelayDist::point_mass(1)};
    const auto rep = validate(Instance(d));
    REQUIRE(has_issue(rep, "arrival_mass_exceeds_one"));
    CHECK(rep.summary().find("arrival mass exceeds 1 at t=3") != std::string::npos);
  }

  TEST_CASE("each invariant has its own issue code") {
    SUBCASE("probability out of range") {
      InstanceData d = base_two_level();
      d.edges[0].accept_prob = 1.5;
      CHECK(has_issue(validate(Instance(d)), "accept_prob_out_of_range"));
    }
    SUBCASE("negative reward") {
      InstanceData d = base_two_level();
      d.rewards = {-1.0, 2.0};
      CHECK(has_issue(validate(Instance(d)), "reward_negative"));
    }
    SUBCASE("zero penalty") {
      InstanceData d = base_two_level();
      d.penalties = {0, 2};
      CHECK(has_issue(validate(Instance(d)), "penalty_not_positive"));
    }
    SUBCASE("zero budget") {
      InstanceData d = base_two_level();
      d.budgets = {Budget::finite(0)};
      CHECK(has_issue(validate(Instance(d)), "budget_not_positive"));
    }
    SUBCASE("expected delays not increasing") {
      InstanceData d = base_two_level();
      d.delays = {DelayDist::point_mass(2), DelayDist::point_mass(2)};
      CHECK(has_issue(validate(Instance(d)), "delays_not_increasing"));
    }
    SUBCASE("duplicate edge") {
      InstanceData d = base_two_level();
      d.edges.push_back({1, 0, 0, 0.5});
      d.rewards.insert(d.rewards.end(), {1.0, 2.0});
      CHECK(has_issue(validate(Instance(d)), "duplicate_edge"));
    }
    SUBCASE("arrival probability out of range") {
      InstanceData d = base_two_level();
      d.arrivals[1] = -0.2;
      CHECK(has_issue(validate(Instance(d)), "arrival_out_of_range"));
    }
  }

  TEST_CASE("require_valid throws a contract violation") {
    InstanceData d = base_two_level();
    d.rewards = {2.0, 1.0};
    try {
      require_valid(Instance(d));
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::contract_violation);
    }
  }

  TEST_CASE("generated instances validate over 100 seeds") {
    for (std::uint64_t s = 1; s <= 100; ++s) {
      gen::SyntheticConfig c;
      c.horizon = 20;
      c.seed = s;
      CHECK(validate(gen::synthetic(c)).ok());
    }
  }

  TEST_CASE("adjacency lists") {
    const Instance in = gen::small_random({});
    for (const Edge& e : in.edges()) {
      const auto& em = in.edges_of_machine(e.machine);
      const auto& ev = in.edges_of_task(e.task);
      CHECK(std::count(em.begin(), em.end(), e.id) == 1);
      CHECK(std::count(ev.begin(), ev.end(), e.id) == 1);
      CHECK(in.find_edge(e.machine, e.task) == e.id);
    }
  }

  TEST_CASE("json round trip is exact") {
    gen::SyntheticConfig c;
    c.horizon = 15;
    c.levels = 3;
    c.delta_cap = Budget::finite(4);
    const Instance a = gen::synthetic(c);
    const std::string text = instance_to_json(a);
    const Instance b = instance_from_json(text);
    CHECK(instance_to_json(b) == text);
    CHECK(b.data().rewards == a.data().rewards);
    CHECK(b.data().arrivals == a.data().arrivals);
    for (LevelId l = 0; l < a.levels(); ++l) CHECK(b.delay(l).pmf() == a.delay(l).pmf());
  }

  TEST_CASE("unlimited budget round trips as inf") {
    const Instance a = gen::hardness(0.25);
    const std::string text = instance_to_json(a);
    CHECK(text.find("\"inf\"") != std::string::npos);
    CHECK(instance_from_json(text).budget(0).is_unlimited());
  }

  TEST_CASE("json rejects unknown and missing keys") {
    const std::string text = instance_to_json(test::two_slot_instance());
    std::string extra = text;
    extra.insert(1, "\"bogus\": 1,");
    CHECK_THROWS_AS(instance_from_json(extra), Error);
    const auto pos = text.find("\"theta\"");
    REQUIRE(pos != std::string::npos);
    std::string renamed = text;
    renamed.replace(pos, 7, "\"thetas\"");
    CHECK_THROWS_AS(instance_from_json(renamed), Error);
    CHECK_THROWS_AS(instance_from_json("{not json"), Error);
  }
}
