#include "omla/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "omla/error.hpp"
#include "omla/rng.hpp"

namespace omla {

std::string to_string(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::arrival: return "Arrival";
    case TraceEvent::Kind::no_arrival: return "NoArrival";
    case TraceEvent::Kind::assigned: return "Assigned";
    case TraceEvent::Kind::accepted: return "Accepted";
    case TraceEvent::Kind::rejected: return "Rejected";
    case TraceEvent::Kind::removed: return "Removed";
    case TraceEvent::Kind::discarded: return "Discarded";
  }
  return "?";
}

void write_trace_jsonl(const EpisodeTrace& trace, std::ostream& out) {
  using Kind = TraceEvent::Kind;
  for (const TraceEvent& e : trace.events) {
    nlohmann::ordered_json j;
    j["event"] = to_string(e.kind);
    j["t"] = e.t;
    switch (e.kind) {
      case Kind::arrival: j["v"] = e.task; break;
      case Kind::assigned:
        j["u"] = e.machine;
        j["v"] = e.task;
        j["l"] = e.level + 1;
        break;
      case Kind::accepted:
        j["u"] = e.machine;
        j["d"] = e.delay;
        j["reward"] = e.reward;
        break;
      case Kind::rejected:
        j["u"] = e.machine;
        j["theta"] = e.penalty;
        break;
      case Kind::removed: j["u"] = e.machine; break;
      case Kind::no_arrival:
      case Kind::discarded: break;
    }
    out << j.dump() << '\n';
  }
}

int sample_delay(const DelayDist& d, double u01) {
  double cum = 0.0;
  int last = d.support_min();
  for (int k = d.support_min(); k <= d.support_max(); ++k) {
    const double p = d.prob(k);
    if (p == 0.0) continue;
    last = k;
    cum += p;
    if (u01 < cum) return k;
  }
  return last;
}

TaskId sample_arrival(const Instance& in, int t, double u01) {
  double cum = 0.0;
  for (TaskId v = 0; v < in.task_count(); ++v) {
    const double p = in.arrival(v, t);
    if (p == 0.0) continue;
    cum += p;
    if (u01 < cum) return v;
  }
  return -1;
}

double run_episode(const Instance& in, const Policy& policy, std::uint64_t seed, std::uint64_t episode,
                   EpisodeTrace* trace) {
  using Kind = TraceEvent::Kind;
  const RandomStream arrivals(seed, episode, Purpose::arrival);
  const RandomStream accepts(seed, episode, Purpose::accept);
  const RandomStream delays(seed, episode, Purpose::delay);
  const RandomStream choices(seed, episode, Purpose::policy);
  auto log = [&](TraceEvent ev) {
    if (trace) trace->events.push_back(ev);
  };

  SimState s = SimState::initial(in);
  double reward = 0.0;
  for (int t = 1; t <= in.horizon(); ++t) {
    s.t = t;
    const TaskId v = sample_arrival(in, t, arrivals.at(t));
    if (v < 0) {
      log({Kind::no_arrival, t});
      continue;
    }
    log({Kind::arrival, t, -1, v});
    const Decision dec = policy.decide(s, v, choices.at(t));
    if (!dec.assign) {
      log({Kind::discarded, t});
      continue;
    }
    require(dec.edge >= 0 && dec.edge < in.edge_count() && dec.level >= 0 && dec.level < in.levels(),
            ErrorKind::contract_violation, policy.name() + " returned an out-of-range decision");
    const Edge& e = in.edge(dec.edge);
    require(e.task == v && e.machine == dec.machine, ErrorKind::contract_violation,
            policy.name() + " assigned along an edge not incident to the arriving task");
    require(s.alive(e.machine), ErrorKind::contract_violation, policy.name() + " assigned a removed machine");
    require(s.available(e.machine), ErrorKind::contract_violation, policy.name() + " assigned an occupied machine");
    log({Kind::assigned, t, e.machine, v, dec.level});

    if (accepts.at(t) < e.accept_prob) {
      const int d = sample_delay(in.delay(dec.level), delays.at(t));
      const double r = in.reward(e.id, dec.level);
      reward += r;
      s.occupied_until[e.machine] = t + d;
      TraceEvent ev{Kind::accepted, t, e.machine, v, dec.level};
      ev.delay = d;
      ev.reward = r;
      log(ev);
    } else {
      const int theta = in.penalty(dec.level);
      TraceEvent ev{Kind::rejected, t, e.machine, v, dec.level};
      ev.penalty = theta;
      log(ev);
      if (!s.unlimited[e.machine]) {
        s.budget[e.machine] -= theta;
        if (s.budget[e.machine] <= 0) log({Kind::removed, t, e.machine});
      }
    }
  }
  s.t = in.horizon() + 1;
  if (trace) {
    trace->reward = reward;
    trace->final_state = s;
  }
  return reward;
}

std::vector<double> episode_rewards(const Instance& in, const Policy& policy, long n, std::uint64_t seed, int jobs) {
  require(n >= 1, ErrorKind::invalid_argument, "episode count must be at least 1");
  require(jobs >= 1, ErrorKind::invalid_argument, "job count must be at least 1");
  std::vector<double> rewards(static_cast<std::size_t>(n));
  const long workers = std::min<long>(jobs, n);
  if (workers == 1) {
    for (long i = 0; i < n; ++i) rewards[i] = run_episode(in, policy, seed, static_cast<std::uint64_t>(i));
    return rewards;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (long w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < n; i += workers) rewards[i] = run_episode(in, policy, seed, static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  return rewards;
}

SimSummary summarize(const std::vector<double>& rewards, const std::string& policy, std::uint64_t seed) {
  SimSummary s;
  s.policy = policy;
  s.seed = seed;
  s.n = static_cast<long>(rewards.size());
  // Welford, in episode order.
  double mean = 0.0, m2 = 0.0;
  long k = 0;
  for (double r : rewards) {
    ++k;
    const double d = r - mean;
    mean += d / k;
    m2 += d * (r - mean);
  }
  s.mean = mean;
  s.variance = s.n > 1 ? m2 / (s.n - 1) : 0.0;
  s.std_error = s.n > 0 ? std::sqrt(s.variance / s.n) : 0.0;
  return s;
}

SimSummary monte_carlo(const Instance& in, const Policy& policy, long n, std::uint64_t seed, int jobs) {
  return summarize(episode_rewards(in, policy, n, seed, jobs), policy.name(), seed);
}

}  // namespace omla
