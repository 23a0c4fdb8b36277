#include "omla/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "omla/error.hpp"
#include "omla/rng.hpp"

namespace omla::ingest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

// "YYYY-MM-DD[T ]HH:MM[:SS]" -> date string and minute of day.
bool parse_timestamp(const std::string& s, std::string& date, int& minute) {
  int y, mo, d, h, mi, sec = 0;
  char sep;
  const int n = std::sscanf(s.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (n < 6 || (sep != 'T' && sep != ' ')) return false;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59) return false;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, mo, d);
  date = buf;
  minute = h * 60 + mi;
  return true;
}

bool in_box(const GridConfig& g, double lon, double lat) {
  return lon >= g.lon_min && lon < g.lon_max && lat >= g.lat_min && lat < g.lat_max;
}

using Cell = std::pair<int, int>;

Cell cell_of(const GridConfig& g, double lon, double lat) {
  return {static_cast<int>(std::floor((lon - g.lon_min) / g.cell)), static_cast<int>(std::floor((lat - g.lat_min) / g.cell))};
}

void check_grid(const GridConfig& g) {
  require(g.cell > 0.0 && g.lon_min < g.lon_max && g.lat_min < g.lat_max, ErrorKind::invalid_argument,
          "grid needs a positive cell size and non-degenerate bounds");
  require(g.slot_minutes >= 1 && g.slots >= 1 && g.days >= 0, ErrorKind::invalid_argument,
          "time window needs positive slot length and count");
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"taxi_id",    "driver_id",   "pickup_lon", "pickup_lat",
                                             "dropoff_lon", "dropoff_lat", "pickup_ts",  "dropoff_ts",
                                             "duration_s",  "fare",        "toll"};
  return cols;
}

LoadResult parse_trips(const std::string& text, const GridConfig& grid) {
  check_grid(grid);
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::invalid_argument, "trip CSV is empty (no header)");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < header.size(); ++i) pos[header[i]] = i;
  for (const auto& c : csv_columns())
    require(pos.count(c) > 0, ErrorKind::invalid_argument, "trip CSV is missing column '" + c + "'");

  LoadResult out;
  const int window_end = grid.window_start + grid.slots * grid.slot_minutes;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++out.rows;
    const auto f = split_csv(line);
    if (f.size() < header.size()) {
      ++out.skipped_malformed;
      continue;
    }
    auto col = [&](const char* name) -> const std::string& { return f[pos[name]]; };
    TripRecord r;
    r.taxi_id = col("taxi_id");
    r.driver_id = col("driver_id");
    r.pickup_ts = col("pickup_ts");
    r.dropoff_ts = col("dropoff_ts");
    int minute = 0;
    std::string drop_date;
    int drop_minute = 0;
    const bool ok = !r.taxi_id.empty() && parse_double(col("pickup_lon"), r.pickup_lon) &&
                    parse_double(col("pickup_lat"), r.pickup_lat) && parse_double(col("dropoff_lon"), r.dropoff_lon) &&
                    parse_double(col("dropoff_lat"), r.dropoff_lat) && parse_double(col("duration_s"), r.duration_s) &&
                    parse_double(col("fare"), r.fare) && parse_double(col("toll"), r.toll) &&
                    parse_timestamp(r.pickup_ts, r.date, minute) && parse_timestamp(r.dropoff_ts, drop_date, drop_minute) &&
                    r.duration_s > 0.0;
    if (!ok) {
      ++out.skipped_malformed;
      continue;
    }
    if (!in_box(grid, r.pickup_lon, r.pickup_lat) || !in_box(grid, r.dropoff_lon, r.dropoff_lat)) {
      ++out.skipped_bounds;
      continue;
    }
    if (minute < grid.window_start || minute >= window_end) {
      ++out.skipped_window;
      continue;
    }
    r.slot = (minute - grid.window_start) / grid.slot_minutes + 1;
    out.trips.push_back(std::move(r));
  }
  return out;
}

LoadResult load_trips(const std::string& path, const GridConfig& grid) {
  std::ifstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot read trip file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_trips(ss.str(), grid);
}

std::vector<DelayDist> load_sidecar(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot read sidecar '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("sidecar is not valid JSON: ") + e.what());
  }
  require(j.is_array(), ErrorKind::invalid_argument, "sidecar must be an array of {\"pmf\": {...}} objects");
  std::vector<DelayDist> out;
  for (const auto& level : j) {
    require(level.is_object() && level.contains("pmf") && level["pmf"].is_object(), ErrorKind::invalid_argument,
            "sidecar entries must carry a pmf object");
    std::map<int, double> pmf;
    for (const auto& [k, v] : level["pmf"].items()) pmf[std::stoi(k)] = v.get<double>();
    out.push_back(DelayDist::from_pmf(pmf));
  }
  return out;
}

BuildResult build_instance(const std::vector<TripRecord>& trips, const GridConfig& grid, const LevelSpec& lv,
                           const BuildConfig& cfg) {
  check_grid(grid);
  const int L = static_cast<int>(lv.tolls.size());
  require(L >= 1 && static_cast<int>(lv.penalties.size()) == L && static_cast<int>(lv.duration_scale.size()) == L,
          ErrorKind::invalid_argument, "toll, penalty and duration-scale lists must have one entry per level");
  require(!lv.sidecar || static_cast<int>(lv.sidecar->size()) == L, ErrorKind::invalid_argument,
          "sidecar must list one delay pmf per level");
  require(std::is_sorted(lv.tolls.rbegin(), lv.tolls.rend()) &&
              std::adjacent_find(lv.tolls.begin(), lv.tolls.end()) == lv.tolls.end(),
          ErrorKind::invalid_argument, "tolls must strictly decrease with level");
  require(cfg.min_trips >= 1 && cfg.sample_machines >= 0, ErrorKind::invalid_argument, "bad machine filter settings");
  require(!trips.empty(), ErrorKind::invalid_argument, "no trips to build from");

  IngestReport rep;
  rep.trips_in = static_cast<long>(trips.size());

  // Taxi filter.
  std::map<std::string, int> per_taxi;
  for (const auto& t : trips) ++per_taxi[t.taxi_id];
  rep.taxis_seen = static_cast<int>(per_taxi.size());
  std::vector<const TripRecord*> used;
  for (const auto& t : trips)
    if (per_taxi[t.taxi_id] >= cfg.min_trips) used.push_back(&t);
  rep.trips_used = static_cast<long>(used.size());

  std::set<std::string> dates;
  for (const auto* t : used) dates.insert(t->date);
  rep.days = grid.days > 0 ? grid.days : static_cast<int>(dates.size());

  // Taxi locations: most frequent pickup cell, smallest cell on ties.
  std::map<std::string, std::map<Cell, int>> pickups;
  for (const auto* t : used) ++pickups[t->taxi_id][cell_of(grid, t->pickup_lon, t->pickup_lat)];
  std::vector<std::string> taxis;
  std::map<std::string, Cell> location;
  for (const auto& [id, counts] : pickups) {
    taxis.push_back(id);
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
      if (it->second > best->second) best = it;
    location[id] = best->first;
  }

  Rng rng(cfg.seed);
  if (cfg.sample_machines > 0 && cfg.sample_machines < static_cast<int>(taxis.size())) {
    for (int i = 0; i < cfg.sample_machines; ++i)
      std::swap(taxis[i], taxis[rng.uniform_int(i, static_cast<int>(taxis.size()) - 1)]);
    taxis.resize(cfg.sample_machines);
    std::sort(taxis.begin(), taxis.end());
  }
  rep.taxis_kept = static_cast<int>(taxis.size());
  std::set<Cell> machine_cells;
  for (const auto& id : taxis) machine_cells.insert(location[id]);

  // Trip types with mean fare and per-slot counts.
  struct TypeStats {
    double fare_sum = 0.0;
    int count = 0;
    std::vector<int> per_slot;
  };
  std::map<std::pair<Cell, Cell>, TypeStats> types;
  for (const auto* t : used) {
    auto& s = types[{cell_of(grid, t->pickup_lon, t->pickup_lat), cell_of(grid, t->dropoff_lon, t->dropoff_lat)}];
    if (s.per_slot.empty()) s.per_slot.assign(grid.slots, 0);
    s.fare_sum += t->fare;
    ++s.count;
    ++s.per_slot[t->slot - 1];
  }

  InstanceData d;
  d.horizon = grid.slots;
  d.levels = L;
  d.penalties = lv.penalties;
  std::vector<double> mean_fare;
  std::vector<const TypeStats*> kept_types;
  std::vector<Cell> origins;
  for (const auto& [key, s] : types) {
    if (!machine_cells.count(key.first)) continue;
    const double fare = s.fare_sum / s.count;
    if (fare <= lv.tolls.front()) {
      ++rep.tasks_dropped_low_fare;
      continue;
    }
    kept_types.push_back(&s);
    mean_fare.push_back(fare);
    origins.push_back(key.first);
  }
  d.task_count = static_cast<int>(kept_types.size());
  rep.tasks = d.task_count;

  // Arrivals: frequency per day, rescaled globally so every slot has mass <= 1.
  d.arrivals.assign(static_cast<std::size_t>(d.task_count) * grid.slots, 0.0);
  double peak = 0.0;
  for (int t = 0; t < grid.slots; ++t) {
    double mass = 0.0;
    for (int v = 0; v < d.task_count; ++v) {
      const double p = static_cast<double>(kept_types[v]->per_slot[t]) / rep.days;
      d.arrivals[static_cast<std::size_t>(v) * grid.slots + t] = p;
      mass += p;
    }
    peak = std::max(peak, mass);
  }
  rep.rescale_factor = std::max(1.0, peak);
  if (rep.rescale_factor > 1.0)
    for (double& p : d.arrivals) p /= rep.rescale_factor;

  for (MachineId u = 0; u < static_cast<int>(taxis.size()); ++u)
    for (TaskId v = 0; v < d.task_count; ++v)
      if (location[taxis[u]] == origins[v]) d.edges.push_back({static_cast<EdgeId>(d.edges.size()), u, v, 0.0});
  rep.edges = static_cast<int>(d.edges.size());
  require(!d.edges.empty(), ErrorKind::invalid_argument,
          "degenerate instance: no taxi shares a cell with any trip origin (after the " + std::to_string(cfg.min_trips) +
              "-trip filter)");
  for (Edge& e : d.edges) {
    e.accept_prob = rng.uniform(0.5, 1.0);
    for (int l = 0; l < L; ++l) d.rewards.push_back(mean_fare[e.task] - lv.tolls[l]);
  }
  for (std::size_t u = 0; u < taxis.size(); ++u)
    d.budgets.push_back(cfg.budget_cap.is_unlimited() ? Budget::unlimited()
                                                      : Budget::finite(rng.uniform_int(1, cfg.budget_cap.value())));

  if (lv.sidecar) {
    rep.sidecar = true;
    d.delays = *lv.sidecar;
  } else {
    const double slot_seconds = 60.0 * grid.slot_minutes;
    for (int l = 0; l < L; ++l) {
      std::map<int, double> pmf;
      for (const auto* t : used)
        pmf[std::max(1, static_cast<int>(std::ceil(lv.duration_scale[l] * t->duration_s / slot_seconds)))] += 1.0;
      DelayDist dist = DelayDist::from_pmf(pmf);
      // Bucketing can merge scaled histograms; shift by whole slots until E[d] strictly increases.
      while (l > 0 && !(d.delays.back().expected() < dist.expected())) {
        std::map<int, double> shifted;
        for (int k = 1; k <= dist.support_max(); ++k)
          if (dist.prob(k) > 0.0) shifted[k + 1] = dist.prob(k);
        dist = DelayDist::from_pmf(shifted);
        ++rep.delay_repairs;
      }
      d.delays.push_back(std::move(dist));
    }
  }

  Instance inst(std::move(d));
  const auto vr = validate(inst);
  require(vr.ok(), ErrorKind::contract_violation, "ingested instance is invalid: " + vr.summary());
  return {std::move(inst), rep};
}

std::string IngestReport::to_json(const LoadResult* load) const {
  nlohmann::ordered_json j;
  if (load) {
    j["rows"] = load->rows;
    j["skipped_malformed"] = load->skipped_malformed;
    j["skipped_bounds"] = load->skipped_bounds;
    j["skipped_window"] = load->skipped_window;
  }
  j["trips_in"] = trips_in;
  j["trips_used"] = trips_used;
  j["days"] = days;
  j["taxis_seen"] = taxis_seen;
  j["taxis_kept"] = taxis_kept;
  j["tasks"] = tasks;
  j["tasks_dropped_low_fare"] = tasks_dropped_low_fare;
  j["edges"] = edges;
  j["rescale_factor"] = rescale_factor;
  j["delay_repairs"] = delay_repairs;
  j["sidecar"] = sidecar;
  return j.dump(2);
}

}  // namespace omla::ingest
