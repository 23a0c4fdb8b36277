#pragma once

// Slotted Monte Carlo simulator. Each episode draws from four counter-based
// streams (arrival, accept, delay, policy) keyed on (seed, episode) and
// indexed by the time slot, so two policies run with the same seed see the
// same arrival sequence.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "omla/model.hpp"
#include "omla/policies.hpp"

namespace omla {

struct TraceEvent {
  enum class Kind { arrival, no_arrival, assigned, accepted, rejected, removed, discarded };
  Kind kind;
  int t = 0;
  MachineId machine = -1;
  TaskId task = -1;
  LevelId level = -1;
  int delay = 0;    // accepted
  int penalty = 0;  // rejected
  double reward = 0.0;
};

std::string to_string(TraceEvent::Kind k);

struct EpisodeTrace {
  std::vector<TraceEvent> events;
  double reward = 0.0;
  SimState final_state;
};

/// One JSON object per line.
void write_trace_jsonl(const EpisodeTrace& trace, std::ostream& out);

/// Delay by inverse CDF of the uniform `u01`.
int sample_delay(const DelayDist& d, double u01);

/// Task arriving at t for the uniform `u01`, or -1 for no arrival. Tasks are
/// scanned in id order against the cumulative p_{v,t}.
TaskId sample_arrival(const Instance& instance, int t, double u01);

/// Runs one episode. Throws contract_violation when the policy returns an
/// illegal decision. `trace` may be null.
double run_episode(const Instance& instance, const Policy& policy, std::uint64_t seed, std::uint64_t episode,
                   EpisodeTrace* trace = nullptr);

struct SimSummary {
  std::string policy;
  std::uint64_t seed = 0;
  long n = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1 denominator)
  double std_error = 0.0;
};

/// Episodes 0..n-1 spread over `jobs` threads; the result does not depend on `jobs`.
SimSummary monte_carlo(const Instance& instance, const Policy& policy, long n, std::uint64_t seed, int jobs = 1);

/// Per-episode rewards, in episode order.
std::vector<double> episode_rewards(const Instance& instance, const Policy& policy, long n, std::uint64_t seed,
                                    int jobs = 1);

SimSummary summarize(const std::vector<double>& rewards, const std::string& policy, std::uint64_t seed);

}  // namespace omla
