#include "omla/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "omla/error.hpp"
#include "omla/gen.hpp"
#include "omla/ingest.hpp"
#include "omla/instance_io.hpp"
#include "omla/lp.hpp"
#include "omla/oracle.hpp"
#include "omla/policies.hpp"
#include "omla/sim.hpp"
#include "omla/tables.hpp"
#include "omla/verify.hpp"

namespace omla {

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string instance_id_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

std::string budget_label(const Instance& in) {
  return in.all_unlimited() ? "inf" : std::to_string(in.max_finite_budget());
}

Budget parse_budget(const std::string& s) {
  if (s == "inf" || s == "unlimited") return Budget::unlimited();
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size() && v >= 1) return Budget::finite(v);
  } catch (const std::exception&) {
  }
  fail(ErrorKind::invalid_argument, "budget must be a positive integer or 'inf', got '" + s + "'");
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write '" + path + "'");
  f << text;
}

// Sinks spdlog into `err` at the level named by OMLA_LOG (default warn).
std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("omla", sink);
  log->set_pattern("[%l] %v");
  const char* env = std::getenv("OMLA_LOG");
  log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  return log;
}

struct SynthFlags {
  int machines = 10;
  int tasks = 25;
  int horizon = 100;
  int levels = 6;
  double edge_prob = 0.1;
  std::string delta = "20";
  std::uint64_t seed = 1;

  void add(CLI::App* app) {
    app->add_option("--machines", machines, "number of machines |U|")->check(CLI::PositiveNumber);
    app->add_option("--tasks", tasks, "number of task types |V|")->check(CLI::PositiveNumber);
    app->add_option("--horizon,-T", horizon, "number of time slots T")->check(CLI::PositiveNumber);
    app->add_option("--edge-prob", edge_prob, "edge probability")->check(CLI::Range(0.0, 1.0));
  }
  gen::SyntheticConfig config(int L, const std::string& delta_s, std::uint64_t s) const {
    gen::SyntheticConfig c;
    c.machines = machines;
    c.tasks = tasks;
    c.horizon = horizon;
    c.levels = L;
    c.edge_prob = edge_prob;
    c.delta_cap = parse_budget(delta_s);
    c.seed = s;
    return c;
  }
};

std::string summary_row(const std::string& id, const SimSummary& s) {
  return id + "," + s.policy + "," + std::to_string(s.n) + "," + std::to_string(s.seed) + "," + fmt_num(s.mean) + "," +
         fmt_num(s.std_error);
}

struct BenchRow {
  std::string instance_id, policy, delta, group;
  int levels = 0;
  long n = 0;
  std::uint64_t seed = 0;
  double mean = 0.0, se = 0.0, lp = 0.0, ratio = 0.0, bound = 0.0;
};

std::string bench_svg(const std::vector<BenchRow>& rows) {
  // Mean ratio per (group, policy), drawn as grouped bars with the bound as a tick.
  std::vector<std::string> groups;
  std::map<std::string, std::map<std::string, std::pair<double, int>>> acc;
  std::map<std::string, double> bound;
  for (const auto& r : rows) {
    if (!acc.count(r.group)) groups.push_back(r.group);
    auto& a = acc[r.group][r.policy];
    a.first += r.ratio;
    ++a.second;
    bound[r.group] = r.bound;
  }
  const auto& pols = policy_names();
  const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"};
  const int bar = 14, gap = 24, h = 240, top = 20, left = 40;
  const int width = left + static_cast<int>(groups.size()) * (bar * static_cast<int>(pols.size()) + gap) + 140;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << h + top + 60 << "\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top + h << "\" x2=\"" << width - 140 << "\" y2=\"" << top + h
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = top + h - k * h / 4.0;
    s << "<text x=\"4\" y=\"" << y + 4 << "\" font-size=\"10\">" << fmt_num(k / 4.0) << "</text>\n";
  }
  int x = left + gap / 2;
  for (const auto& g : groups) {
    for (std::size_t p = 0; p < pols.size(); ++p) {
      const auto it = acc[g].find(pols[p]);
      const double ratio = it == acc[g].end() ? 0.0 : it->second.first / it->second.second;
      const double bh = std::clamp(ratio, 0.0, 1.0) * h;
      s << "<rect x=\"" << x + static_cast<int>(p) * bar << "\" y=\"" << top + h - bh << "\" width=\"" << bar - 2
        << "\" height=\"" << bh << "\" fill=\"" << colors[p % 6] << "\"/>\n";
    }
    const double by = top + h - bound[g] * h;
    s << "<line x1=\"" << x << "\" y1=\"" << by << "\" x2=\"" << x + bar * static_cast<int>(pols.size()) << "\" y2=\""
      << by << "\" stroke=\"black\" stroke-dasharray=\"3,2\"/>\n";
    s << "<text x=\"" << x << "\" y=\"" << top + h + 16 << "\" font-size=\"10\">" << g << "</text>\n";
    x += bar * static_cast<int>(pols.size()) + gap;
  }
  for (std::size_t p = 0; p < pols.size(); ++p) {
    s << "<rect x=\"" << width - 120 << "\" y=\"" << top + 14 * p << "\" width=\"10\" height=\"10\" fill=\"" << colors[p % 6]
      << "\"/><text x=\"" << width - 105 << "\" y=\"" << top + 9 + 14 * p << "\" font-size=\"10\">" << pols[p]
      << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  CLI::App app{"Online machine and level assignment: LP, value tables, simulation and bound checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "omla 1.0");

  // validate
  std::string inst_path;
  auto* validate_cmd = app.add_subcommand("validate", "check an instance against the model assumptions");
  validate_cmd->add_option("instance", inst_path, "instance JSON")->required();

  // solve-lp
  auto* lp_cmd = app.add_subcommand("solve-lp", "solve the offline LP");
  std::string sol_out, lp_dump, solver = "revised";
  double lp_tol = 1e-7;
  lp_cmd->add_option("--instance,-i", inst_path, "instance JSON")->required();
  lp_cmd->add_option("--out,-o", sol_out, "write the solution JSON here");
  lp_cmd->add_option("--dump", lp_dump, "write the LP rows in text form here");
  lp_cmd->add_option("--solver", solver, "revised or dense")->check(CLI::IsMember({"revised", "dense"}));
  lp_cmd->add_option("--tol", lp_tol, "residual tolerance");

  // tables
  auto* tables_cmd = app.add_subcommand("tables", "build activation and baseline tables");
  std::string sol_in, csv_out;
  tables_cmd->add_option("--instance,-i", inst_path, "instance JSON")->required();
  tables_cmd->add_option("--solution", sol_in, "LP solution JSON (solved if omitted)");
  tables_cmd->add_option("--csv", csv_out, "write delta,u,t,R rows here");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo evaluation of policies");
  std::vector<std::string> policies{"omla"};
  long episodes = 1000;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string trace_out, results_out;
  sim_cmd->add_option("--instance,-i", inst_path, "instance JSON")->required();
  sim_cmd->add_option("--policy,-p", policies, "policy names (comma separated or repeated)");
  sim_cmd->add_option("--n", episodes, "episodes")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed, "simulation seed");
  sim_cmd->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--trace", trace_out, "write the first episode's trace (JSON lines) here");
  sim_cmd->add_option("--out,-o", results_out, "append CSV rows here instead of stdout");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "all policies against LP(Off), common random numbers");
  SynthFlags synth;
  std::vector<std::string> bench_instances, deltas{"1", "5", "20"};
  std::vector<int> level_list{2, 6};
  int instance_count = 1;
  std::uint64_t gen_seed = 1;
  std::string svg_out;
  episodes = 1000;
  bench_cmd->add_option("--instance,-i", bench_instances, "instance JSON files (otherwise synthetic)");
  synth.add(bench_cmd);
  bench_cmd->add_option("--levels,-L", level_list, "level counts for synthetic instances")->delimiter(',');
  bench_cmd->add_option("--delta", deltas, "budget caps for synthetic instances (integer or inf)")->delimiter(',');
  bench_cmd->add_option("--instances", instance_count, "synthetic instances per (L, delta)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--gen-seed", gen_seed, "seed of the first synthetic instance");
  bench_cmd->add_option("--n", episodes, "episodes per policy")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed, "simulation seed");
  bench_cmd->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out,-o", results_out, "write the CSV here instead of stdout");
  bench_cmd->add_option("--svg", svg_out, "also write a bar chart");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "check every bound of the analysis on an instance");
  double verify_tol = 1e-7;
  bool json = false, no_oracle = false;
  verify_cmd->add_option("--instance,-i", inst_path, "instance JSON")->required();
  verify_cmd->add_option("--solution", sol_in, "use this LP solution instead of solving");
  verify_cmd->add_option("--tol", verify_tol, "tolerance on normalized slacks");
  verify_cmd->add_flag("--json", json, "print the report as JSON");
  verify_cmd->add_flag("--no-oracle", no_oracle, "skip the exact-OPT check");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic instance");
  std::string gen_out, gen_delta = "20";
  int gen_levels = 6;
  bool small = false;
  synth.add(gen_cmd);
  gen_cmd->add_option("--levels,-L", gen_levels, "number of levels")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--delta", gen_delta, "budget cap (integer or inf)");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_flag("--small", small, "tiny random instance within the exact-oracle caps");
  gen_cmd->add_option("--out,-o", gen_out, "write here instead of stdout");

  // hardness
  auto* hard_cmd = app.add_subcommand("hardness", "the two-slot instance on which no online rule beats 1/(2-eps)");
  double eps = 0.1;
  hard_cmd->add_option("--eps", eps, "epsilon in (0,1)")->check(CLI::Range(0.0, 1.0));
  hard_cmd->add_option("--out,-o", gen_out, "write here instead of stdout");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "build an instance from taxi trip records");
  std::string trips_path, report_out, sidecar;
  ingest::GridConfig grid;
  ingest::BuildConfig build;
  std::string ingest_delta = "5";
  std::string window = "19:00";
  ingest_cmd->add_option("--trips", trips_path, "trip CSV")->required();
  ingest_cmd->add_option("--out,-o", gen_out, "instance JSON output")->required();
  ingest_cmd->add_option("--report", report_out, "ingest report JSON (stdout if omitted)");
  ingest_cmd->add_option("--sidecar", sidecar, "per-level delay pmfs JSON");
  ingest_cmd->add_option("--cell", grid.cell, "grid cell size in degrees");
  ingest_cmd->add_option("--lon-min", grid.lon_min);
  ingest_cmd->add_option("--lon-max", grid.lon_max);
  ingest_cmd->add_option("--lat-min", grid.lat_min);
  ingest_cmd->add_option("--lat-max", grid.lat_max);
  ingest_cmd->add_option("--window-start", window, "window start HH:MM");
  ingest_cmd->add_option("--slot-minutes", grid.slot_minutes)->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--slots", grid.slots)->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--days", grid.days, "day count (0: distinct pickup dates)");
  ingest_cmd->add_option("--min-trips", build.min_trips)->check(CLI::PositiveNumber);
  ingest_cmd->add_option("--sample-machines", build.sample_machines, "keep this many random taxis (0: all)");
  ingest_cmd->add_option("--delta", ingest_delta, "budget cap (integer or inf)");
  ingest_cmd->add_option("--seed", build.seed, "seed for sampling, acceptance probabilities and budgets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) {
      const Instance in = load_instance(inst_path);
      const auto rep = validate(in);
      if (rep.ok()) {
        out << "ok: " << in.machine_count() << " machines, " << in.task_count() << " tasks, " << in.edge_count()
            << " edges, T=" << in.horizon() << ", L=" << in.levels() << ", budget " << budget_label(in) << "\n";
        return kExitOk;
      }
      for (const auto& issue : rep.issues) out << issue.code << ": " << issue.message << "\n";
      return kExitContract;
    }

    if (lp_cmd->parsed()) {
      const Instance in = load_instance(inst_path);
      const LpProblem prob = build_off(in);
      log->info("LP has {} columns and {} rows", prob.columns, prob.rows.size());
      if (!lp_dump.empty()) {
        std::ofstream f(lp_dump);
        require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write '" + lp_dump + "'");
        write_lp(prob, f);
      }
      const LpSolution sol = solve(prob, lp_tol, solver == "dense" ? SolverKind::dense : SolverKind::revised);
      require(sol.status == LpStatus::optimal, ErrorKind::contract_violation, "LP solve ended " + to_string(sol.status));
      const Residual res = residual(in, sol);
      out << "status " << to_string(sol.status) << "\nobjective " << fmt_num(sol.objective) << "\niterations "
          << sol.iterations << "\nmax_violation " << fmt_num(res.max_violation) << "\n";
      require(res.max_violation <= lp_tol, ErrorKind::contract_violation, "LP residual above tolerance");
      if (!sol_out.empty()) write_text(sol_out, solution_to_json(sol));
      return kExitOk;
    }

    if (tables_cmd->parsed()) {
      const Instance in = load_instance(inst_path);
      LpSolution sol;
      if (sol_in.empty()) {
        sol = solve_off(in);
      } else {
        std::ifstream f(sol_in);
        require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot read '" + sol_in + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        sol = solution_from_json(ss.str());
      }
      const TableSet tables(in, sol);
      for (MachineId u = 0; u < in.machine_count(); ++u)
        out << "u=" << u << " R_1=" << fmt_num(tables.initial_value(in, u)) << "\n";
      out << "expected_reward " << fmt_num(tables.expected_reward(in)) << "\nlp_off " << fmt_num(lp_objective(in, sol))
          << "\n";
      if (!in.all_unlimited()) {
        const auto diag = diagnose(tables.finite(), in.machine_count());
        out << "time_monotonicity_violation " << fmt_num(diag.time_violation) << "\nbudget_monotonicity_violation "
            << fmt_num(diag.budget_violation) << "\n";
        if (diag.budget_violation > 1e-9) log->warn("R decreases with budget somewhere (worst {})", diag.budget_violation);
      }
      if (!csv_out.empty()) {
        std::ofstream f(csv_out);
        require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write '" + csv_out + "'");
        write_baseline_csv(in, tables, f);
      }
      return kExitOk;
    }

    if (sim_cmd->parsed()) {
      const Instance in = load_instance(inst_path);
      const std::string id = instance_id_of(inst_path);
      PolicyFactory factory(in);
      std::ostringstream rows;
      const bool header = results_out.empty() || !std::filesystem::exists(results_out);
      if (header) rows << "instance_id,policy,n,seed,mean,stderr\n";
      bool first = true;
      for (const auto& name : split_list(policies)) {
        const auto policy = factory.make(name);
        if (first && !trace_out.empty()) {
          EpisodeTrace trace;
          run_episode(in, *policy, seed, 0, &trace);
          std::ofstream f(trace_out);
          require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write '" + trace_out + "'");
          write_trace_jsonl(trace, f);
        }
        first = false;
        rows << summary_row(id, monte_carlo(in, *policy, episodes, seed, jobs)) << "\n";
      }
      if (results_out.empty()) {
        out << rows.str();
      } else {
        std::ofstream f(results_out, std::ios::app | std::ios::binary);
        require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot write '" + results_out + "'");
        f << rows.str();
      }
      return kExitOk;
    }

    if (bench_cmd->parsed()) {
      std::vector<std::pair<std::string, Instance>> work;
      std::vector<std::string> groups;
      if (!bench_instances.empty()) {
        for (const auto& p : bench_instances) {
          work.emplace_back(instance_id_of(p), load_instance(p));
          groups.push_back("L" + std::to_string(work.back().second.levels()) + " D" + budget_label(work.back().second));
        }
      } else {
        for (int L : level_list)
          for (const auto& d : split_list(deltas))
            for (int k = 0; k < instance_count; ++k) {
              const std::uint64_t s = gen_seed + static_cast<std::uint64_t>(k);
              work.emplace_back("syn-L" + std::to_string(L) + "-D" + d + "-s" + std::to_string(s),
                                gen::synthetic(synth.config(L, d, s)));
              groups.push_back("L" + std::to_string(L) + " D" + d);
            }
      }
      std::vector<BenchRow> rows;
      for (std::size_t w = 0; w < work.size(); ++w) {
        const auto& [id, in] = work[w];
        log->info("bench {}: |E|={}", id, in.edge_count());
        PolicyFactory factory(in);
        const double lp = factory.omla()->x.objective;
        const double bound = competitive_constant(in);
        for (const auto& name : policy_names()) {
          const auto policy = factory.make(name);
          const SimSummary s = monte_carlo(in, *policy, episodes, seed, jobs);
          rows.push_back({id, name, budget_label(in), groups[w], in.levels(), episodes, seed, s.mean, s.std_error, lp,
                          lp > 0.0 ? s.mean / lp : 0.0, bound});
        }
      }
      std::ostringstream csv;
      csv << "instance_id,policy,delta_max,L,n,seed,mean,stderr,lp_off,ratio,bound\n";
      for (const auto& r : rows)
        csv << r.instance_id << ',' << r.policy << ',' << r.delta << ',' << r.levels << ',' << r.n << ',' << r.seed << ','
            << fmt_num(r.mean) << ',' << fmt_num(r.se) << ',' << fmt_num(r.lp) << ',' << fmt_num(r.ratio) << ','
            << fmt_num(r.bound) << '\n';
      if (results_out.empty())
        out << csv.str();
      else
        write_text(results_out, csv.str());
      if (!svg_out.empty()) write_text(svg_out, bench_svg(rows));
      return kExitOk;
    }

    if (verify_cmd->parsed()) {
      const Instance in = load_instance(inst_path);
      VerifyOptions opt;
      opt.tol = verify_tol;
      opt.oracle = !no_oracle;
      BoundReport rep;
      if (sol_in.empty()) {
        rep = check_all(in, opt);
      } else {
        std::ifstream f(sol_in);
        require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot read '" + sol_in + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        rep = check_all(in, solution_from_json(ss.str()), opt);
      }
      out << (json ? rep.to_json() + "\n" : rep.to_table());
      if (!json && rep.opt_value) out << "exact_opt " << fmt_num(*rep.opt_value) << "\n";
      return rep.pass ? kExitOk : kExitCheck;
    }

    if (gen_cmd->parsed()) {
      Instance in = [&] {
        if (small) {
          gen::SmallConfig c;
          c.seed = gen_seed;
          c.delta_cap = parse_budget(gen_delta);
          return gen::small_random(c);
        }
        gen::SyntheticStats stats;
        Instance i = gen::synthetic(synth.config(gen_levels, gen_delta, gen_seed), &stats);
        if (stats.reward_redraws > 0 || stats.reward_sorted_fallbacks > 0)
          log->info("reward vectors redrawn {} times, sorted {} times", stats.reward_redraws, stats.reward_sorted_fallbacks);
        return i;
      }();
      const std::string text = instance_to_json(in);
      if (gen_out.empty())
        out << text << "\n";
      else
        write_text(gen_out, text);
      return kExitOk;
    }

    if (hard_cmd->parsed()) {
      require(eps > 0.0 && eps < 1.0, ErrorKind::invalid_argument, "--eps must lie strictly between 0 and 1");
      const Instance in = gen::hardness(eps);
      const std::string text = instance_to_json(in);
      if (gen_out.empty())
        out << text << "\n";
      else
        write_text(gen_out, text);
      err << "exact_opt " << fmt_num(exact_opt(in).value) << "  online ceiling 1  ratio ceiling "
          << fmt_num(1.0 / (2.0 - eps)) << "\n";
      return kExitOk;
    }

    if (ingest_cmd->parsed()) {
      int hh = 0, mm = 0;
      require(std::sscanf(window.c_str(), "%d:%d", &hh, &mm) == 2 && hh >= 0 && hh < 24 && mm >= 0 && mm < 60,
              ErrorKind::invalid_argument, "--window-start must look like HH:MM");
      grid.window_start = hh * 60 + mm;
      build.budget_cap = parse_budget(ingest_delta);
      ingest::LevelSpec levels;
      if (!sidecar.empty()) levels.sidecar = ingest::load_sidecar(sidecar);
      const auto load = ingest::load_trips(trips_path, grid);
      log->info("read {} rows, kept {} trips", load.rows, load.trips.size());
      const auto built = ingest::build_instance(load.trips, grid, levels, build);
      write_text(gen_out, instance_to_json(built.instance));
      const std::string report = built.report.to_json(&load);
      if (report_out.empty())
        out << report << "\n";
      else
        write_text(report_out, report);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::contract_violation ? kExitContract : kExitUsage;
  }
  return kExitUsage;
}

}  // namespace omla
