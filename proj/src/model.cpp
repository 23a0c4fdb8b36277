#include "omla/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "omla/error.hpp"

namespace omla {

DelayDist DelayDist::from_pmf(const std::map<int, double>& pmf) {
  int max_d = 1;
  double total = 0.0;
  for (const auto& [d, p] : pmf) {
    require(std::isfinite(p) && p >= 0.0, ErrorKind::invalid_argument,
            "delay pmf has a negative or non-finite mass at d=" + std::to_string(d));
    if (p > 0.0) max_d = std::max(max_d, d);
    total += p;
  }
  require(total > 0.0, ErrorKind::invalid_argument, "delay pmf has no mass");

  DelayDist out;
  out.pmf_.assign(static_cast<std::size_t>(max_d) + 1, 0.0);
  for (const auto& [d, p] : pmf) {
    if (p <= 0.0) continue;
    out.pmf_[std::max(d, 1)] += p;
  }
  // Leave already-normalized input untouched so save/load round-trips bit-exactly.
  if (std::abs(total - 1.0) > 1e-14)
    for (double& p : out.pmf_) p /= total;

  out.tail_.assign(out.pmf_.size() + 1, 0.0);
  double acc = 0.0;
  for (int k = max_d; k >= 1; --k) {
    acc += out.pmf_[k];
    out.tail_[k] = acc;
  }
  out.tail_[0] = 1.0;
  out.tail_[1] = 1.0;
  return out;
}

DelayDist DelayDist::point_mass(int d) { return from_pmf({{d, 1.0}}); }

int DelayDist::support_min() const {
  for (int d = 1; d < static_cast<int>(pmf_.size()); ++d)
    if (pmf_[d] > 0.0) return d;
  return 0;
}

double DelayDist::expected() const {
  double m = 0.0;
  for (int d = 1; d < static_cast<int>(pmf_.size()); ++d) m += d * pmf_[d];
  return m;
}

double expected_delay(const DelayDist& d) { return d.expected(); }

Instance::Instance(InstanceData data) : d_(std::move(data)) {
  const auto fail_shape = [](const std::string& what) { fail(ErrorKind::invalid_argument, "malformed instance: " + what); };
  if (d_.horizon < 1) fail_shape("horizon must be positive");
  if (d_.levels < 1) fail_shape("level count must be positive");
  if (d_.task_count < 0) fail_shape("negative task count");
  const auto E = d_.edges.size();
  if (d_.rewards.size() != E * d_.levels) fail_shape("reward table must have |E|*L entries");
  if (static_cast<int>(d_.penalties.size()) != d_.levels) fail_shape("need one penalty per level");
  if (static_cast<int>(d_.delays.size()) != d_.levels) fail_shape("need one delay distribution per level");
  if (d_.arrivals.size() != static_cast<std::size_t>(d_.task_count) * d_.horizon)
    fail_shape("arrival matrix must be |V| x T");
  for (const auto& dd : d_.delays)
    if (dd.pmf().empty()) fail_shape("empty delay distribution");

  by_machine_.assign(d_.budgets.size(), {});
  by_task_.assign(d_.task_count, {});
  for (std::size_t i = 0; i < E; ++i) {
    const Edge& e = d_.edges[i];
    if (e.id != static_cast<EdgeId>(i)) fail_shape("edge ids must be dense and ordered");
    if (e.machine < 0 || e.machine >= machine_count()) fail_shape("edge " + std::to_string(i) + " has unknown machine");
    if (e.task < 0 || e.task >= d_.task_count) fail_shape("edge " + std::to_string(i) + " has unknown task");
    by_machine_[e.machine].push_back(e.id);
    by_task_[e.task].push_back(e.id);
  }
  theta_max_ = d_.penalties.empty() ? 0 : *std::max_element(d_.penalties.begin(), d_.penalties.end());
}

EdgeId Instance::find_edge(MachineId u, TaskId v) const {
  for (EdgeId e : by_machine_[u])
    if (d_.edges[e].task == v) return e;
  return -1;
}

bool Instance::all_unlimited() const {
  return std::all_of(d_.budgets.begin(), d_.budgets.end(), [](const Budget& b) { return b.is_unlimited(); });
}

bool Instance::all_finite() const {
  return std::none_of(d_.budgets.begin(), d_.budgets.end(), [](const Budget& b) { return b.is_unlimited(); });
}

int Instance::max_finite_budget() const {
  int m = 0;
  for (const auto& b : d_.budgets)
    if (!b.is_unlimited()) m = std::max(m, b.value());
  return m;
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i].message;
  }
  return os.str();
}

namespace {

bool is_probability(double p) { return std::isfinite(p) && p >= -kProbTolerance && p <= 1.0 + kProbTolerance; }

}  // namespace

ValidationReport validate(const Instance& in) {
  ValidationReport rep;
  const auto add = [&rep](std::string code, std::string msg) { rep.issues.push_back({std::move(code), std::move(msg)}); };
  const int L = in.levels();
  const int T = in.horizon();

  for (MachineId u = 0; u < in.machine_count(); ++u) {
    const Budget& b = in.budget(u);
    if (!b.is_unlimited() && b.value() < 1)
      add("budget_not_positive", "budget of machine " + std::to_string(u) + " is not a positive integer");
  }
  for (LevelId l = 0; l < L; ++l)
    if (in.penalty(l) < 1)
      add("penalty_not_positive", "penalty of level " + std::to_string(l + 1) + " is below 1");

  std::set<std::pair<MachineId, TaskId>> pairs;
  for (const Edge& e : in.edges()) {
    const std::string tag = "edge " + std::to_string(e.id);
    if (!pairs.insert({e.machine, e.task}).second)
      add("duplicate_edge", tag + " repeats pair (" + std::to_string(e.machine) + "," + std::to_string(e.task) + ")");
    if (!is_probability(e.accept_prob)) add("accept_prob_out_of_range", tag + " acceptance probability outside [0,1]");
    for (LevelId l = 0; l < L; ++l) {
      const double r = in.reward(e.id, l);
      if (!std::isfinite(r) || r < 0.0)
        add("reward_negative", tag + " level " + std::to_string(l + 1) + " reward is negative or non-finite");
      if (l > 0 && !(in.reward(e.id, l - 1) < r))
        add("rewards_not_increasing", tag + " rewards not increasing in level at level " + std::to_string(l + 1));
    }
  }

  for (int t = 1; t <= T; ++t) {
    double mass = 0.0;
    for (TaskId v = 0; v < in.task_count(); ++v) {
      const double p = in.arrival(v, t);
      if (!is_probability(p))
        add("arrival_out_of_range", "arrival probability of task " + std::to_string(v) + " at t=" + std::to_string(t) +
                                        " outside [0,1]");
      mass += p;
    }
    if (mass > 1.0 + kProbTolerance)
      add("arrival_mass_exceeds_one", "arrival mass exceeds 1 at t=" + std::to_string(t));
  }

  for (LevelId l = 0; l < L; ++l) {
    const DelayDist& d = in.delay(l);
    const std::string tag = "delay of level " + std::to_string(l + 1);
    double sum = 0.0;
    for (double p : d.pmf()) sum += p;
    if (std::abs(sum - 1.0) > kPmfSumTolerance) add("delay_mass", tag + " does not sum to 1");
    if (d.support_min() < 1) add("delay_support", tag + " has support below 1");
    if (l > 0 && !(in.delay(l - 1).expected() < d.expected()))
      add("delays_not_increasing", tag + " expected delay not increasing in level");
  }
  return rep;
}

void require_valid(const Instance& instance) {
  const auto rep = validate(instance);
  require(rep.ok(), ErrorKind::contract_violation, "instance failed validation: " + rep.summary());
}

}  // namespace omla
