#include "omla/policies.hpp"

#include "omla/error.hpp"

namespace omla {

SimState SimState::initial(const Instance& in) {
  SimState s;
  const int U = in.machine_count();
  s.occupied_until.assign(U, 1);
  s.budget.resize(U);
  s.unlimited.resize(U);
  for (MachineId u = 0; u < U; ++u) {
    const Budget& b = in.budget(u);
    s.unlimited[u] = b.is_unlimited() ? 1 : 0;
    s.budget[u] = b.is_unlimited() ? 0 : b.value();
  }
  return s;
}

Decision Policy::decide(const SimState& state, TaskId v, double u01) const {
  double cum = 0.0;
  for (const auto& wd : distribution(state, v)) {
    cum += wd.prob;
    if (u01 < cum) return wd.decision;
  }
  return Decision::discard();
}

std::shared_ptr<const OmlaArtifacts> build_omla_artifacts(const Instance& in, const LevelMask* mask) {
  auto art = std::make_shared<OmlaArtifacts>();
  art->x = solve_off(in, 1e-7, mask);
  art->tables = TableSet(in, art->x);
  return art;
}

OmlaPolicy::OmlaPolicy(const Instance& in, std::shared_ptr<const OmlaArtifacts> art, std::string name)
    : in_(&in), art_(std::move(art)), name_(std::move(name)) {
  require(art_ != nullptr && art_->x.matches(in), ErrorKind::invalid_argument, "OMLA artifacts do not match instance");
}

std::vector<OmlaPolicy::Candidate> OmlaPolicy::candidates(int t, TaskId v) const {
  const double p = in_->arrival(v, t);
  require(p > 0.0, ErrorKind::contract_violation,
          "task " + std::to_string(v) + " arrived at t=" + std::to_string(t) + " with zero arrival probability");
  std::vector<Candidate> out;
  for (EdgeId e : in_->edges_of_task(v))
    for (LevelId l = 0; l < in_->levels(); ++l) {
      const double xv = art_->x.at(e, l, t);
      if (xv > 0.0) out.push_back({e, l, xv / p});
    }
  return out;
}

bool OmlaPolicy::gate(const SimState& s, EdgeId e, LevelId l) const {
  const MachineId u = in_->edge(e).machine;
  if (!s.usable(u)) return false;
  const int delta = s.budget[u];
  return art_->tables.activation(u, delta, e, l, s.t) >= art_->tables.baseline(u, delta, s.t + 1);
}

std::vector<WeightedDecision> OmlaPolicy::distribution(const SimState& s, TaskId v) const {
  std::vector<WeightedDecision> out;
  for (const Candidate& c : candidates(s.t, v)) {
    const Decision d = gate(s, c.edge, c.level) ? Decision::to(in_->edge(c.edge), c.level) : Decision::discard();
    out.push_back({d, c.prob});
  }
  return out;
}

std::vector<WeightedDecision> RandomPolicy::distribution(const SimState& s, TaskId v) const {
  const auto& edges = in_->edges_of_task(v);
  const int L = in_->levels();
  std::vector<WeightedDecision> out;
  if (edges.empty()) return out;
  const double w = 1.0 / (static_cast<double>(edges.size()) * L);
  for (EdgeId e : edges) {
    const Edge& edge = in_->edge(e);
    for (LevelId l = 0; l < L; ++l)
      out.push_back({s.usable(edge.machine) ? Decision::to(edge, l) : Decision::discard(), w});
  }
  return out;
}

namespace {

double greedy_score(const Instance& in, EdgeId e, LevelId l, GreedyPolicy::Key key) {
  const double r = in.reward(e, l);
  return key == GreedyPolicy::Key::utility ? r : r / in.delay(l).expected();
}

}  // namespace

std::vector<WeightedDecision> GreedyPolicy::distribution(const SimState& s, TaskId v) const {
  // Levels are scanned upwards, so a strict > keeps the lowest level among equal scores.
  bool found = false;
  double best = 0.0;
  Decision pick;
  for (EdgeId e : in_->edges_of_task(v)) {
    const Edge& edge = in_->edge(e);
    if (!s.usable(edge.machine)) continue;
    for (LevelId l = 0; l < in_->levels(); ++l) {
      const double score = greedy_score(*in_, e, l, key_);
      if (!found || score > best || (score == best && edge.machine < pick.machine)) {
        found = true;
        best = score;
        pick = Decision::to(edge, l);
      }
    }
  }
  if (!found) return {};
  return {{pick, 1.0}};
}

LevelMask best_level_mask(const Instance& in, GreedyPolicy::Key key) {
  const int L = in.levels();
  LevelMask mask;
  mask.allowed.assign(static_cast<std::size_t>(in.edge_count()) * L, 0);
  for (EdgeId e = 0; e < in.edge_count(); ++e) {
    LevelId best = 0;
    for (LevelId l = 1; l < L; ++l)
      if (greedy_score(in, e, l, key) > greedy_score(in, e, best, key)) best = l;
    mask.allowed[static_cast<std::size_t>(e) * L + best] = 1;
  }
  return mask;
}

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"omla", "random", "ug", "eg", "ug+", "eg+"};
  return names;
}

std::shared_ptr<const OmlaArtifacts> PolicyFactory::omla() {
  if (!omla_) omla_ = build_omla_artifacts(*in_);
  return omla_;
}

std::shared_ptr<const OmlaArtifacts> PolicyFactory::ug_plus() {
  if (!ug_plus_) {
    const LevelMask mask = best_level_mask(*in_, GreedyPolicy::Key::utility);
    ug_plus_ = build_omla_artifacts(*in_, &mask);
  }
  return ug_plus_;
}

std::shared_ptr<const OmlaArtifacts> PolicyFactory::eg_plus() {
  if (!eg_plus_) {
    const LevelMask mask = best_level_mask(*in_, GreedyPolicy::Key::efficiency);
    eg_plus_ = build_omla_artifacts(*in_, &mask);
  }
  return eg_plus_;
}

std::unique_ptr<Policy> PolicyFactory::make(const std::string& name) {
  if (name == "omla") return std::make_unique<OmlaPolicy>(*in_, omla());
  if (name == "random") return std::make_unique<RandomPolicy>(*in_);
  if (name == "ug") return std::make_unique<GreedyPolicy>(*in_, GreedyPolicy::Key::utility);
  if (name == "eg") return std::make_unique<GreedyPolicy>(*in_, GreedyPolicy::Key::efficiency);
  if (name == "ug+") return std::make_unique<OmlaPolicy>(*in_, ug_plus(), "ug+");
  if (name == "eg+") return std::make_unique<OmlaPolicy>(*in_, eg_plus(), "eg+");
  fail(ErrorKind::invalid_argument, "unknown policy '" + name + "' (expected omla, random, ug, eg, ug+, eg+)");
}

}  // namespace omla
