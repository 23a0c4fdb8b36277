#include "omla/oracle.hpp"

#include <algorithm>
#include <unordered_map>

#include "omla/error.hpp"

namespace omla {

namespace {

// Mixed-radix packing of (t, occupied_until, budgets) with occupied_until
// clamped into [t, T+1] and budgets into [0, max].
class StateCodec {
 public:
  explicit StateCodec(const Instance& in) : T_(in.horizon()), U_(in.machine_count()) {
    budget_radix_ = 1 + (in.all_unlimited() ? 0 : in.max_finite_budget());
  }

  std::uint64_t encode(const SimState& s) const {
    std::uint64_t code = static_cast<std::uint64_t>(s.t);
    for (MachineId u = 0; u < U_; ++u) code = code * (T_ + 2) + static_cast<std::uint64_t>(s.occupied_until[u]);
    for (MachineId u = 0; u < U_; ++u)
      code = code * budget_radix_ + static_cast<std::uint64_t>(s.unlimited[u] ? 0 : s.budget[u]);
    return code;
  }

  /// The state at slot t+1.
  SimState advance(SimState s) const {
    ++s.t;
    for (MachineId u = 0; u < U_; ++u) {
      s.occupied_until[u] = std::clamp(s.occupied_until[u], s.t, T_ + 1);
      if (!s.unlimited[u]) s.budget[u] = std::max(s.budget[u], 0);
    }
    return s;
  }

 private:
  int T_;
  int U_;
  std::uint64_t budget_radix_;
};

class NodeCounter {
 public:
  explicit NodeCounter(std::uint64_t cap) : cap_(cap) {}
  void add() {
    if (++nodes_ > cap_)
      fail(ErrorKind::limits_exceeded, "exact evaluation exceeded the node cap of " + std::to_string(cap_));
  }
  std::uint64_t nodes() const { return nodes_; }

 private:
  std::uint64_t cap_;
  std::uint64_t nodes_ = 0;
};

// Value of the assignment (e,l) at s.t given the continuation `next`, where
// next(s') evaluates a state already advanced to t+1.
template <class Next>
double assignment_value(const Instance& in, const StateCodec& codec, const SimState& s, EdgeId e, LevelId l,
                        Next&& next) {
  const Edge& edge = in.edge(e);
  const MachineId u = edge.machine;
  const DelayDist& dist = in.delay(l);
  double accepted = in.reward(e, l);
  for (int k = dist.support_min(); k <= dist.support_max(); ++k) {
    const double p = dist.prob(k);
    if (p == 0.0) continue;
    SimState busy = s;
    busy.occupied_until[u] = s.t + k;
    accepted += p * next(codec.advance(std::move(busy)));
  }
  SimState rejected = s;
  if (!rejected.unlimited[u]) rejected.budget[u] -= in.penalty(l);
  const double q = edge.accept_prob;
  return q * accepted + (1.0 - q) * next(codec.advance(std::move(rejected)));
}

class OptSolver {
 public:
  OptSolver(const Instance& in, const TinyLimits& lim) : in_(in), codec_(in), counter_(lim.node_cap) {}

  ExactValue run() {
    seq_.assign(in_.horizon() + 1, -1);
    SimState s0 = SimState::initial(in_);
    s0.t = 1;
    const double v = enumerate(1, 1.0, s0);
    return {v, counter_.nodes()};
  }

 private:
  // Sums Pr(I) * OPT(I) over sequences that agree with seq_ before slot t.
  double enumerate(int t, double prob, const SimState& s0) {
    if (t > in_.horizon()) {
      suffix_.assign(in_.horizon() + 2, 0);
      for (int k = in_.horizon(); k >= 1; --k)
        suffix_[k] = suffix_[k + 1] * static_cast<std::uint64_t>(in_.task_count() + 1) + static_cast<std::uint64_t>(seq_[k] + 1);
      return prob * value(s0);
    }
    double total = 0.0;
    double none = 1.0;
    for (TaskId v = 0; v < in_.task_count(); ++v) {
      const double p = in_.arrival(v, t);
      if (p == 0.0) continue;
      none -= p;
      seq_[t] = v;
      total += enumerate(t + 1, prob * p, s0);
    }
    // Rounding can leave a sliver of no-arrival mass when sum_v p = 1.
    if (none > 1e-12) {
      seq_[t] = -1;
      total += enumerate(t + 1, prob * none, s0);
    }
    return total;
  }

  // OPT from state s given the fixed sequence seq_; memoized on the suffix.
  double value(const SimState& s) {
    if (s.t > in_.horizon()) return 0.0;
    const auto key_pair = std::make_pair(codec_.encode(s), suffix_[s.t]);
    if (auto it = memo_.find(key_pair); it != memo_.end()) return it->second;
    counter_.add();
    auto next = [&](const SimState& n) { return value(n); };
    double best = value(codec_.advance(s));
    const TaskId v = seq_[s.t];
    if (v >= 0)
      for (EdgeId e : in_.edges_of_task(v)) {
        if (!s.usable(in_.edge(e).machine)) continue;
        for (LevelId l = 0; l < in_.levels(); ++l) best = std::max(best, assignment_value(in_, codec_, s, e, l, next));
      }
    memo_.emplace(key_pair, best);
    return best;
  }

  struct PairHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
      return k.first ^ (k.second * 0x9E3779B97F4A7C15ull);
    }
  };

  const Instance& in_;
  StateCodec codec_;
  NodeCounter counter_;
  std::vector<TaskId> seq_;
  std::vector<std::uint64_t> suffix_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, double, PairHash> memo_;
};

class PolicyEvaluator {
 public:
  PolicyEvaluator(const Instance& in, const Policy& policy, const TinyLimits& lim)
      : in_(in), policy_(policy), codec_(in), counter_(lim.node_cap) {}

  ExactValue run() {
    const double v = value(SimState::initial(in_));
    return {v, counter_.nodes()};
  }

 private:
  double value(const SimState& s) {
    if (s.t > in_.horizon()) return 0.0;
    const std::uint64_t key = codec_.encode(s);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    counter_.add();
    auto next = [&](const SimState& n) { return value(n); };
    const double idle = value(codec_.advance(s));
    double total = 0.0;
    double none = 1.0;
    for (TaskId v = 0; v < in_.task_count(); ++v) {
      const double p = in_.arrival(v, s.t);
      if (p == 0.0) continue;
      none -= p;
      double branch = 0.0;
      double discard = 1.0;
      for (const WeightedDecision& wd : policy_.distribution(s, v)) {
        if (wd.prob == 0.0) continue;
        discard -= wd.prob;
        if (!wd.decision.assign) {
          branch += wd.prob * idle;
          continue;
        }
        const Decision& d = wd.decision;
        require(d.edge >= 0 && d.edge < in_.edge_count() && in_.edge(d.edge).task == v && s.usable(d.machine),
                ErrorKind::contract_violation, policy_.name() + " offered an illegal decision");
        branch += wd.prob * assignment_value(in_, codec_, s, d.edge, d.level, next);
      }
      branch += discard * idle;
      total += p * branch;
    }
    total += none * idle;
    memo_.emplace(key, total);
    return total;
  }

  const Instance& in_;
  const Policy& policy_;
  StateCodec codec_;
  NodeCounter counter_;
  std::unordered_map<std::uint64_t, double> memo_;
};

}  // namespace

void check_limits(const Instance& in, const TinyLimits& lim) {
  auto cap = [](bool ok, const std::string& what) {
    require(ok, ErrorKind::limits_exceeded, "instance too large for the exact oracle: " + what);
  };
  cap(in.machine_count() <= lim.machines, "machines > " + std::to_string(lim.machines));
  cap(in.task_count() <= lim.tasks, "tasks > " + std::to_string(lim.tasks));
  cap(in.horizon() <= lim.horizon, "T > " + std::to_string(lim.horizon));
  cap(in.levels() <= lim.levels, "L > " + std::to_string(lim.levels));
  cap(in.all_unlimited() || in.max_finite_budget() <= lim.budget, "budget > " + std::to_string(lim.budget));
  for (LevelId l = 0; l < in.levels(); ++l)
    cap(in.delay(l).support_max() <= lim.delay_support, "delay support > " + std::to_string(lim.delay_support));
}

bool within_limits(const Instance& in, const TinyLimits& lim) {
  try {
    check_limits(in, lim);
    return true;
  } catch (const Error&) {
    return false;
  }
}

ExactValue exact_opt(const Instance& in, const TinyLimits& lim) {
  require_valid(in);
  check_limits(in, lim);
  return OptSolver(in, lim).run();
}

ExactValue exact_policy_value(const Instance& in, const Policy& policy, const TinyLimits& lim) {
  require_valid(in);
  check_limits(in, lim);
  return PolicyEvaluator(in, policy, lim).run();
}

}  // namespace omla
