#include "omla/gen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "omla/error.hpp"
#include "omla/rng.hpp"

namespace omla::gen {

namespace {

constexpr int kRewardRetries = 100;

std::vector<double> random_arrivals(Rng& rng, int tasks, int horizon, double lo, double hi) {
  // Task-major layout, filled slot by slot.
  std::vector<double> p(static_cast<std::size_t>(tasks) * horizon, 0.0);
  if (tasks == 0) return p;
  std::vector<double> w(tasks);
  for (int t = 0; t < horizon; ++t) {
    double sum = 0.0;
    for (auto& x : w) {
      x = rng.uniform();
      sum += x;
    }
    const double mass = rng.uniform(lo, hi);
    for (int v = 0; v < tasks; ++v) p[static_cast<std::size_t>(v) * horizon + t] = sum > 0.0 ? w[v] / sum * mass : 0.0;
  }
  return p;
}

}  // namespace

DelayDist clamped_binomial(int n, double p) {
  require(n >= 1 && p >= 0.0 && p <= 1.0, ErrorKind::invalid_argument, "binomial parameters out of range");
  std::map<int, double> pmf;
  if (p == 0.0) return DelayDist::point_mass(1);
  if (p == 1.0) return DelayDist::point_mass(n);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lnf = std::lgamma(n + 1.0);
  for (int k = 0; k <= n; ++k) {
    const double m = std::exp(lnf - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq);
    if (m > 0.0) pmf[std::max(k, 1)] += m;
  }
  return DelayDist::from_pmf(pmf);
}

Instance synthetic(const SyntheticConfig& c, SyntheticStats* stats) {
  require(c.machines >= 1 && c.tasks >= 1 && c.horizon >= 1 && c.levels >= 1, ErrorKind::invalid_argument,
          "synthetic config sizes must be positive");
  require(c.levels <= 12, ErrorKind::invalid_argument, "synthetic delays need L <= 12 (binomial p = l^1.2/20 <= 1)");
  require(c.edge_prob >= 0.0 && c.edge_prob <= 1.0, ErrorKind::invalid_argument, "edge probability outside [0,1]");
  require(c.delta_cap.is_unlimited() || c.delta_cap.value() >= 1, ErrorKind::invalid_argument, "budget cap must be positive");
  require(0.0 <= c.arrival_mass_lo && c.arrival_mass_lo <= c.arrival_mass_hi && c.arrival_mass_hi <= 1.0,
          ErrorKind::invalid_argument, "arrival mass range must lie in [0,1]");

  SyntheticStats local;
  SyntheticStats& st = stats ? *stats : local;
  Rng rng(c.seed);
  InstanceData d;
  d.horizon = c.horizon;
  d.levels = c.levels;
  d.task_count = c.tasks;

  for (MachineId u = 0; u < c.machines; ++u)
    for (TaskId v = 0; v < c.tasks; ++v)
      if (rng.bernoulli(c.edge_prob)) d.edges.push_back({static_cast<EdgeId>(d.edges.size()), u, v, 0.0});

  std::vector<double> r(c.levels);
  for (Edge& e : d.edges) {
    e.accept_prob = rng.uniform(0.5, 1.0);
    const double a = rng.uniform(0.5, 1.0);
    bool sorted = false;
    for (int attempt = 0; attempt < kRewardRetries && !sorted; ++attempt) {
      if (attempt > 0) ++st.reward_redraws;
      for (int l = 0; l < c.levels; ++l) {
        const double lv = l + 1.0;
        r[l] = rng.uniform(a * std::pow(lv, 0.2), a * std::pow(lv, 0.4));
      }
      sorted = std::adjacent_find(r.begin(), r.end(), [](double x, double y) { return !(x < y); }) == r.end();
    }
    if (!sorted) {
      ++st.reward_sorted_fallbacks;
      std::sort(r.begin(), r.end());
    }
    d.rewards.insert(d.rewards.end(), r.begin(), r.end());
  }

  for (MachineId u = 0; u < c.machines; ++u)
    d.budgets.push_back(c.delta_cap.is_unlimited() ? Budget::unlimited()
                                                   : Budget::finite(rng.uniform_int(1, c.delta_cap.value())));

  d.arrivals = random_arrivals(rng, c.tasks, c.horizon, c.arrival_mass_lo, c.arrival_mass_hi);

  for (int l = 1; l <= c.levels; ++l) {
    d.penalties.push_back(l + 2);
    d.delays.push_back(clamped_binomial(c.horizon, std::pow(static_cast<double>(l), 1.2) / 20.0));
  }

  Instance out(std::move(d));
  const auto rep = validate(out);
  require(rep.ok(), ErrorKind::contract_violation, "synthetic instance violates model assumptions: " + rep.summary());
  return out;
}

Instance hardness(double eps) {
  require(eps > 0.0 && eps < 1.0, ErrorKind::invalid_argument, "hardness epsilon must lie in (0,1)");
  InstanceData d;
  d.horizon = 2;
  d.levels = 1;
  d.task_count = 3;
  d.budgets = {Budget::unlimited()};
  d.edges = {{0, 0, 0, 1.0}, {1, 0, 1, 1.0}, {2, 0, 2, 1.0}};
  d.rewards = {1.0, 1.0 / eps, 0.0};
  d.penalties = {1};
  d.arrivals = {1.0, 0.0,   // x
                0.0, eps,   // y
                0.0, 1.0 - eps};  // z
  d.delays = {DelayDist::point_mass(2)};
  return Instance(std::move(d));
}

Instance small_random(const SmallConfig& c) {
  require(c.machines >= 1 && c.tasks >= 1 && c.horizon >= 1 && c.levels >= 1 && c.max_delay >= 1 && c.max_penalty >= 1,
          ErrorKind::invalid_argument, "small config sizes must be positive");
  require(c.levels == 1 || c.max_delay >= 2, ErrorKind::invalid_argument,
          "increasing expected delays need a delay support of at least 2");
  Rng rng(c.seed);
  InstanceData d;
  d.horizon = c.horizon;
  d.levels = c.levels;
  d.task_count = c.tasks;

  while (d.edges.empty()) {
    for (MachineId u = 0; u < c.machines; ++u)
      for (TaskId v = 0; v < c.tasks; ++v)
        if (rng.bernoulli(c.edge_prob)) d.edges.push_back({static_cast<EdgeId>(d.edges.size()), u, v, 0.0});
  }
  for (Edge& e : d.edges) {
    e.accept_prob = rng.bernoulli(0.2) ? 1.0 : rng.uniform(0.2, 1.0);
    double r = rng.uniform(0.2, 2.0);
    for (int l = 0; l < c.levels; ++l) {
      d.rewards.push_back(r);
      r += rng.uniform(0.1, 1.5);
    }
  }
  for (MachineId u = 0; u < c.machines; ++u)
    d.budgets.push_back(c.delta_cap.is_unlimited() ? Budget::unlimited()
                                                   : Budget::finite(rng.uniform_int(1, c.delta_cap.value())));
  for (int l = 0; l < c.levels; ++l) d.penalties.push_back(rng.uniform_int(1, c.max_penalty));
  d.arrivals = random_arrivals(rng, c.tasks, c.horizon, 0.3, 1.0);

  // Random pmfs on [1, max_delay], ordered by mean; redraw on ties.
  std::vector<DelayDist> delays;
  for (;;) {
    delays.clear();
    for (int l = 0; l < c.levels; ++l) {
      std::map<int, double> pmf;
      for (int k = 1; k <= c.max_delay; ++k) pmf[k] = rng.bernoulli(0.3) ? 0.0 : rng.uniform();
      pmf[rng.uniform_int(1, c.max_delay)] += 0.05;
      delays.push_back(DelayDist::from_pmf(pmf));
    }
    std::sort(delays.begin(), delays.end(), [](const DelayDist& a, const DelayDist& b) { return a.expected() < b.expected(); });
    bool strict = true;
    for (int l = 1; l < c.levels; ++l) strict = strict && delays[l - 1].expected() < delays[l].expected();
    if (strict) break;
  }
  d.delays = std::move(delays);

  Instance out(std::move(d));
  require_valid(out);
  return out;
}

}  // namespace omla::gen
