#include <doctest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "omla/error.hpp"
#include "omla/gen.hpp"
#include "omla/policies.hpp"
#include "omla/sim.hpp"

using namespace omla;
using Kind = TraceEvent::Kind;

namespace {

// Assigns every arriving task to its first usable machine at level 0.
class FirstFitPolicy : public Policy {
 public:
  explicit FirstFitPolicy(const Instance& in) : in_(&in) {}
  std::string name() const override { return "first-fit"; }
  std::vector<WeightedDecision> distribution(const SimState& s, TaskId v) const override {
    for (EdgeId e : in_->edges_of_task(v))
      if (s.usable(in_->edge(e).machine)) return {{Decision::to(in_->edge(e), 0), 1.0}};
    return {};
  }

 private:
  const Instance* in_;
};

// Always assigns along the task's first edge, even to a busy machine.
class PushyPolicy : public Policy {
 public:
  explicit PushyPolicy(const Instance& in) : in_(&in) {}
  std::string name() const override { return "pushy"; }
  std::vector<WeightedDecision> distribution(const SimState&, TaskId v) const override {
    return {{Decision::to(in_->edge(in_->edges_of_task(v).front()), 0), 1.0}};
  }

 private:
  const Instance* in_;
};

Instance busy_instance(std::uint64_t seed) {
  gen::SyntheticConfig c;
  c.machines = 3;
  c.tasks = 5;
  c.horizon = 30;
  c.levels = 3;
  c.edge_prob = 0.6;
  c.delta_cap = Budget::finite(4);
  c.seed = seed;
  return gen::synthetic(c);
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("no arrivals means no events besides empty slots") {
    InstanceData d = busy_instance(1).data();
    std::fill(d.arrivals.begin(), d.arrivals.end(), 0.0);
    const Instance in(d);
    const RandomPolicy pol(in);
    EpisodeTrace tr;
    CHECK(run_episode(in, pol, 3, 0, &tr) == 0.0);
    REQUIRE(tr.events.size() == static_cast<std::size_t>(in.horizon()));
    for (const auto& e : tr.events) CHECK(e.kind == Kind::no_arrival);
  }

  TEST_CASE("same seed and episode give the same trace") {
    const Instance in = busy_instance(2);
    const RandomPolicy pol(in);
    EpisodeTrace a, b;
    run_episode(in, pol, 17, 4, &a);
    run_episode(in, pol, 17, 4, &b);
    std::ostringstream ja, jb;
    write_trace_jsonl(a, ja);
    write_trace_jsonl(b, jb);
    CHECK(ja.str() == jb.str());
    CHECK(a.reward == b.reward);
  }

  TEST_CASE("arrivals are shared across policies") {
    const Instance in = busy_instance(3);
    PolicyFactory f(in);
    auto arrivals = [&](const Policy& p) {
      EpisodeTrace tr;
      run_episode(in, p, 5, 11, &tr);
      std::vector<std::pair<int, int>> out;
      for (const auto& e : tr.events)
        if (e.kind == Kind::arrival || e.kind == Kind::no_arrival) out.push_back({e.t, e.task});
      return out;
    };
    const auto base = arrivals(*f.make("random"));
    for (const auto& name : policy_names()) CHECK(arrivals(*f.make(name)) == base);
  }

  TEST_CASE("a single episode has zero variance") {
    const Instance in = busy_instance(4);
    const RandomPolicy pol(in);
    const SimSummary s = monte_carlo(in, pol, 1, 9);
    CHECK(s.n == 1);
    CHECK(s.variance == 0.0);
    CHECK(s.std_error == 0.0);
  }

  TEST_CASE("budget accounting and removal") {
    for (std::uint64_t ep = 0; ep < 200; ++ep) {
      const Instance in = busy_instance(5);
      const FirstFitPolicy pol(in);
      EpisodeTrace tr;
      run_episode(in, pol, 1, ep, &tr);
      std::vector<int> spent(in.machine_count(), 0);
      std::vector<int> removed_at(in.machine_count(), 0);
      double reward = 0.0;
      for (const auto& e : tr.events) {
        if (e.kind == Kind::rejected) {
          CHECK(e.penalty == in.penalty(e.level));
          spent[e.machine] += e.penalty;
        }
        if (e.kind == Kind::assigned) CHECK(removed_at[e.machine] == 0);
        if (e.kind == Kind::removed) {
          CHECK(spent[e.machine] >= in.budget(e.machine).value());
          removed_at[e.machine] = e.t;
        }
        if (e.kind == Kind::accepted) reward += e.reward;
      }
      for (MachineId u = 0; u < in.machine_count(); ++u)
        CHECK(tr.final_state.budget[u] == in.budget(u).value() - spent[u]);
      CHECK(reward == doctest::Approx(tr.reward).epsilon(1e-12));
    }
  }

  TEST_CASE("a machine is free again exactly when its delay ends") {
    const Instance in = busy_instance(6);
    const FirstFitPolicy pol(in);
    for (std::uint64_t ep = 0; ep < 200; ++ep) {
      EpisodeTrace tr;
      run_episode(in, pol, 2, ep, &tr);
      std::vector<int> busy_until(in.machine_count(), 1);
      for (const auto& e : tr.events) {
        if (e.kind == Kind::assigned) CHECK(e.t >= busy_until[e.machine]);
        if (e.kind == Kind::accepted) {
          CHECK(e.delay >= in.delay(e.level).support_min());
          busy_until[e.machine] = e.t + e.delay;
        }
      }
    }
  }

  TEST_CASE("illegal decisions are contract violations") {
    const Instance in(test::single_edge_data(3, 1, Budget::unlimited(), 1.0, {1.0}, 1.0, {1}, {DelayDist::point_mass(3)}));
    const PushyPolicy pol(in);
    try {
      run_episode(in, pol, 1, 0);
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::contract_violation);
    }
  }

  TEST_CASE("counterexample: always taking the first task earns exactly one") {
    const Instance in = gen::hardness(0.1);
    const FirstFitPolicy pol(in);
    const SimSummary s = monte_carlo(in, pol, 1000, 3);
    CHECK(s.mean == 1.0);
    CHECK(s.variance == 0.0);
  }

  TEST_CASE("two-slot example: simulated mean matches the table value") {
    const Instance in = test::two_slot_instance();
    auto art = std::make_shared<OmlaArtifacts>();
    art->x = test::two_slot_solution();
    art->tables = TableSet(in, art->x);
    const OmlaPolicy pol(in, art);
    const SimSummary s = monte_carlo(in, pol, 200000, 42, 4);
    CHECK(std::abs(s.mean - 1.75) <= 3 * s.std_error);
  }

  TEST_CASE("rewards do not depend on the thread count") {
    const Instance in = busy_instance(7);
    PolicyFactory f(in);
    const auto pol = f.make("omla");
    const auto one = episode_rewards(in, *pol, 997, 8, 1);
    CHECK(episode_rewards(in, *pol, 997, 8, 3) == one);
    CHECK(episode_rewards(in, *pol, 997, 8, 8) == one);
    const SimSummary a = monte_carlo(in, *pol, 997, 8, 1);
    const SimSummary b = monte_carlo(in, *pol, 997, 8, 8);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);
  }

  TEST_CASE("summary statistics") {
    const SimSummary s = summarize({1.0, 2.0, 3.0, 4.0}, "p", 1);
    CHECK(s.mean == 2.5);
    CHECK(s.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-15));
  }

  TEST_CASE("delay and arrival sampling by inverse cdf") {
    const DelayDist d = DelayDist::from_pmf({{1, 0.25}, {3, 0.75}});
    CHECK(sample_delay(d, 0.0) == 1);
    CHECK(sample_delay(d, 0.2499) == 1);
    CHECK(sample_delay(d, 0.25) == 3);
    CHECK(sample_delay(d, 0.9999) == 3);
    InstanceData data = test::two_slot_instance().data();
    data.arrivals = {0.4, 0.4};
    const Instance in(data);
    CHECK(sample_arrival(in, 1, 0.39) == 0);
    CHECK(sample_arrival(in, 1, 0.41) == -1);
  }

  TEST_CASE("trace jsonl has one object per event") {
    const Instance in = busy_instance(8);
    const RandomPolicy pol(in);
    EpisodeTrace tr;
    run_episode(in, pol, 1, 0, &tr);
    std::ostringstream out;
    write_trace_jsonl(tr, out);
    std::istringstream lines(out.str());
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("event"));
      CHECK(j.contains("t"));
      ++n;
    }
    CHECK(n == tr.events.size());
  }

  TEST_CASE("bad episode or job counts") {
    const Instance in = busy_instance(1);
    const RandomPolicy pol(in);
    CHECK_THROWS_AS(monte_carlo(in, pol, 0, 1), Error);
    CHECK_THROWS_AS(monte_carlo(in, pol, 10, 1, 0), Error);
  }
}
