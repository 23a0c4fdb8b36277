#include "omla/instance_io.hpp"

#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "omla/error.hpp"

namespace omla {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { fail(ErrorKind::invalid_argument, "instance json: " + what); }

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) bad(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : obj.items())
    if (!ok.count(k)) bad("unknown key '" + k + "' in " + where);
  for (const char* k : allowed)
    if (!obj.contains(k)) bad("missing key '" + std::string(k) + "' in " + where);
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where + " must be an integer");
  return j.get<int>();
}

double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) bad(where + " must be a number");
  return j.get<double>();
}

int parse_key_int(const std::string& key, const std::string& where) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(key, &pos);
  } catch (const std::exception&) {
    bad(where + " key '" + key + "' is not an integer");
  }
  if (pos != key.size()) bad(where + " key '" + key + "' is not an integer");
  return value;
}

}  // namespace

Instance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("parse error: ") + e.what());
  }
  only_keys(doc, {"T", "L", "machines", "tasks", "edges", "rewards", "theta", "arrivals", "delays"}, "document");

  InstanceData d;
  d.horizon = as_int(doc["T"], "T");
  d.levels = as_int(doc["L"], "L");
  if (d.horizon < 1 || d.levels < 1) bad("T and L must be positive");

  const auto& machines = doc["machines"];
  if (!machines.is_array()) bad("machines must be an array");
  for (std::size_t i = 0; i < machines.size(); ++i) {
    const auto& m = machines[i];
    only_keys(m, {"id", "budget"}, "machine");
    if (as_int(m["id"], "machine id") != static_cast<int>(i)) bad("machine ids must be dense 0..|U|-1 in order");
    const auto& b = m["budget"];
    if (b.is_string()) {
      if (b.get<std::string>() != "inf") bad("budget string must be \"inf\"");
      d.budgets.push_back(Budget::unlimited());
    } else {
      d.budgets.push_back(Budget::finite(as_int(b, "budget")));
    }
  }

  const auto& tasks = doc["tasks"];
  if (!tasks.is_array()) bad("tasks must be an array");
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    only_keys(tasks[i], {"id"}, "task");
    if (as_int(tasks[i]["id"], "task id") != static_cast<int>(i)) bad("task ids must be dense 0..|V|-1 in order");
  }
  d.task_count = static_cast<int>(tasks.size());

  const auto& edges = doc["edges"];
  if (!edges.is_array()) bad("edges must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    only_keys(e, {"id", "u", "v", "q"}, "edge");
    Edge edge;
    edge.id = as_int(e["id"], "edge id");
    if (edge.id != static_cast<int>(i)) bad("edge ids must be dense 0..|E|-1 in order");
    edge.machine = as_int(e["u"], "edge u");
    edge.task = as_int(e["v"], "edge v");
    edge.accept_prob = as_real(e["q"], "edge q");
    d.edges.push_back(edge);
  }

  const auto& rewards = doc["rewards"];
  if (!rewards.is_object()) bad("rewards must be an object");
  const std::size_t E = d.edges.size();
  d.rewards.assign(E * d.levels, 0.0);
  std::vector<char> seen(E * d.levels, 0);
  for (const auto& [ek, levels] : rewards.items()) {
    const int e = parse_key_int(ek, "rewards");
    if (e < 0 || static_cast<std::size_t>(e) >= E) bad("rewards for unknown edge " + ek);
    if (!levels.is_object()) bad("rewards of edge " + ek + " must be an object");
    for (const auto& [lk, r] : levels.items()) {
      const int l = parse_key_int(lk, "rewards level");
      if (l < 1 || l > d.levels) bad("reward level " + lk + " outside 1..L");
      const std::size_t idx = static_cast<std::size_t>(e) * d.levels + (l - 1);
      d.rewards[idx] = as_real(r, "reward");
      seen[idx] = 1;
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      bad("missing reward for edge " + std::to_string(i / d.levels) + " level " + std::to_string(i % d.levels + 1));

  const auto& theta = doc["theta"];
  if (!theta.is_array() || static_cast<int>(theta.size()) != d.levels) bad("theta must list one penalty per level");
  for (const auto& th : theta) d.penalties.push_back(as_int(th, "theta"));

  const auto& arrivals = doc["arrivals"];
  if (!arrivals.is_array() || static_cast<int>(arrivals.size()) != d.task_count) bad("arrivals must have one row per task");
  for (const auto& row : arrivals) {
    if (!row.is_array() || static_cast<int>(row.size()) != d.horizon) bad("each arrivals row must have T entries");
    for (const auto& p : row) d.arrivals.push_back(as_real(p, "arrival"));
  }

  const auto& delays = doc["delays"];
  if (!delays.is_array() || static_cast<int>(delays.size()) != d.levels) bad("delays must list one distribution per level");
  for (const auto& dd : delays) {
    only_keys(dd, {"pmf"}, "delay");
    if (!dd["pmf"].is_object()) bad("delay pmf must be an object");
    std::map<int, double> pmf;
    for (const auto& [k, p] : dd["pmf"].items()) pmf[parse_key_int(k, "pmf")] += as_real(p, "pmf mass");
    d.delays.push_back(DelayDist::from_pmf(pmf));
  }
  return Instance(std::move(d));
}

std::string instance_to_json(const Instance& in) {
  ojson doc;
  doc["T"] = in.horizon();
  doc["L"] = in.levels();
  ojson machines = ojson::array();
  for (MachineId u = 0; u < in.machine_count(); ++u) {
    ojson m;
    m["id"] = u;
    if (in.budget(u).is_unlimited())
      m["budget"] = "inf";
    else
      m["budget"] = in.budget(u).value();
    machines.push_back(m);
  }
  doc["machines"] = machines;
  ojson tasks = ojson::array();
  for (TaskId v = 0; v < in.task_count(); ++v) tasks.push_back({{"id", v}});
  doc["tasks"] = tasks;
  ojson edges = ojson::array();
  ojson rewards = ojson::object();
  for (const Edge& e : in.edges()) {
    edges.push_back({{"id", e.id}, {"u", e.machine}, {"v", e.task}, {"q", e.accept_prob}});
    ojson levels = ojson::object();
    for (LevelId l = 0; l < in.levels(); ++l) levels[std::to_string(l + 1)] = in.reward(e.id, l);
    rewards[std::to_string(e.id)] = levels;
  }
  doc["edges"] = edges;
  doc["rewards"] = rewards;
  ojson theta = ojson::array();
  for (LevelId l = 0; l < in.levels(); ++l) theta.push_back(in.penalty(l));
  doc["theta"] = theta;
  ojson arrivals = ojson::array();
  for (TaskId v = 0; v < in.task_count(); ++v) {
    ojson row = ojson::array();
    for (int t = 1; t <= in.horizon(); ++t) row.push_back(in.arrival(v, t));
    arrivals.push_back(row);
  }
  doc["arrivals"] = arrivals;
  ojson delays = ojson::array();
  for (LevelId l = 0; l < in.levels(); ++l) {
    ojson pmf = ojson::object();
    const auto& p = in.delay(l).pmf();
    for (std::size_t k = 1; k < p.size(); ++k)
      if (p[k] > 0.0) pmf[std::to_string(k)] = p[k];
    delays.push_back({{"pmf", pmf}});
  }
  doc["delays"] = delays;
  return doc.dump(1) + "\n";
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::invalid_argument, "cannot read instance file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::invalid_argument, "cannot write instance file " + path.string());
  out << instance_to_json(instance);
}

}  // namespace omla
