#pragma once

// Online decision rules. Every policy exposes its randomized choice as an
// explicit distribution over decisions, so the simulator can sample it with
// one uniform and the exact evaluator can enumerate it.

#include <memory>
#include <string>
#include <vector>

#include "omla/lp.hpp"
#include "omla/model.hpp"
#include "omla/tables.hpp"

namespace omla {

/// Per-episode machine state at the start of slot t.
struct SimState {
  int t = 1;
  std::vector<int> occupied_until;  // available iff t >= occupied_until
  std::vector<int> budget;          // remaining budget; ignored when unlimited
  std::vector<char> unlimited;

  static SimState initial(const Instance& instance);

  bool alive(MachineId u) const { return unlimited[u] || budget[u] > 0; }
  bool available(MachineId u) const { return t >= occupied_until[u]; }
  bool usable(MachineId u) const { return alive(u) && available(u); }
};

struct Decision {
  bool assign = false;
  MachineId machine = -1;
  LevelId level = -1;
  EdgeId edge = -1;

  static Decision discard() { return {}; }
  static Decision to(const Edge& e, LevelId l) { return {true, e.machine, l, e.id}; }
  friend bool operator==(const Decision&, const Decision&) = default;
};

struct WeightedDecision {
  Decision decision;
  double prob = 0.0;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;

  /// Decisions with positive probability for task v arriving in `state`.
  /// Probabilities sum to at most one; the remainder is Discard.
  virtual std::vector<WeightedDecision> distribution(const SimState& state, TaskId v) const = 0;

  /// Samples distribution() by inverse CDF with the uniform `u01`.
  virtual Decision decide(const SimState& state, TaskId v, double u01) const;
};

/// LP solution plus the value tables built from it.
struct OmlaArtifacts {
  LpSolution x;
  TableSet tables;
};

/// Solves the LP (restricted to `mask` when given) and builds the tables.
std::shared_ptr<const OmlaArtifacts> build_omla_artifacts(const Instance& instance, const LevelMask* mask = nullptr);

/// OMLA: draw (e,l) with probability x*_{e,l,t}/p_{v,t}; assign when the
/// machine is alive and free and Q^delta_{e,l,t} >= R^delta_{u,t+1}.
class OmlaPolicy : public Policy {
 public:
  OmlaPolicy(const Instance& instance, std::shared_ptr<const OmlaArtifacts> artifacts, std::string name = "omla");

  std::string name() const override { return name_; }
  std::vector<WeightedDecision> distribution(const SimState& state, TaskId v) const override;

  struct Candidate {
    EdgeId edge;
    LevelId level;
    double prob;
  };
  /// The pair-selection step alone: (e,l) with probability x*/p. Throws a
  /// contract violation when p_{v,t} = 0.
  std::vector<Candidate> candidates(int t, TaskId v) const;
  /// Whether the gate lets a sampled pair through in `state`.
  bool gate(const SimState& state, EdgeId e, LevelId l) const;

  const OmlaArtifacts& artifacts() const { return *art_; }

 private:
  const Instance* in_;
  std::shared_ptr<const OmlaArtifacts> art_;
  std::string name_;
};

/// Uniform over {(u,l) : (u,v) in E, l in levels}; an unavailable draw discards.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(const Instance& instance) : in_(&instance) {}
  std::string name() const override { return "random"; }
  std::vector<WeightedDecision> distribution(const SimState& state, TaskId v) const override;

 private:
  const Instance* in_;
};

/// Greedy over usable pairs: by reward (UG) or reward per expected delay (EG).
/// Ties go to the lowest machine id, then the lowest level.
class GreedyPolicy : public Policy {
 public:
  enum class Key { utility, efficiency };
  GreedyPolicy(const Instance& instance, Key key) : in_(&instance), key_(key) {}
  std::string name() const override { return key_ == Key::utility ? "ug" : "eg"; }
  std::vector<WeightedDecision> distribution(const SimState& state, TaskId v) const override;

 private:
  const Instance* in_;
  Key key_;
};

/// One level per edge: argmax_l r_{e,l} (utility) or argmax_l r_{e,l}/E[d_l]
/// (efficiency), lowest level on ties.
LevelMask best_level_mask(const Instance& instance, GreedyPolicy::Key key);

/// Policy names accepted by make_policy.
const std::vector<std::string>& policy_names();

/// Lazily built artifacts shared by the policies of one instance.
class PolicyFactory {
 public:
  explicit PolicyFactory(const Instance& instance) : in_(&instance) {}

  /// omla, random, ug, eg, ug+, eg+. Throws invalid_argument on other names.
  std::unique_ptr<Policy> make(const std::string& name);

  std::shared_ptr<const OmlaArtifacts> omla();
  std::shared_ptr<const OmlaArtifacts> ug_plus();
  std::shared_ptr<const OmlaArtifacts> eg_plus();

 private:
  const Instance* in_;
  std::shared_ptr<const OmlaArtifacts> omla_, ug_plus_, eg_plus_;
};

}  // namespace omla
