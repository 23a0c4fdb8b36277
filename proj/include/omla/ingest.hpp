#pragma once

// Builds instances from taxi trip records.
//
// Trips are bucketed onto a lon/lat grid and a slotted time window. A task
// type is an (origin cell, destination cell) pair; a machine is a taxi with
// enough trips in the window, located at its most frequent pickup cell.
// Levels are toll choices: reward = mean fare of the type minus the toll, and
// each level gets its own trip-duration distribution.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omla/model.hpp"

namespace omla::ingest {

struct GridConfig {
  double lon_min = -75.0;
  double lon_max = -73.0;
  double lat_min = 40.4;
  double lat_max = 41.0;
  double cell = 0.02;         // degrees
  int window_start = 19 * 60;  // minute of day
  int slot_minutes = 1;
  int slots = 60;
  int days = 0;  // 0: number of distinct pickup dates among the kept trips
};

struct TripRecord {
  std::string taxi_id;
  std::string driver_id;
  double pickup_lon = 0.0;
  double pickup_lat = 0.0;
  double dropoff_lon = 0.0;
  double dropoff_lat = 0.0;
  std::string pickup_ts;
  std::string dropoff_ts;
  double duration_s = 0.0;
  double fare = 0.0;
  double toll = 0.0;
  std::string date;  // YYYY-MM-DD of pickup
  int slot = 0;      // 1-based slot of pickup within the window
};

struct LoadResult {
  std::vector<TripRecord> trips;
  long rows = 0;
  long skipped_malformed = 0;
  long skipped_bounds = 0;
  long skipped_window = 0;
  long skipped() const { return skipped_malformed + skipped_bounds + skipped_window; }
};

/// Header columns, in the documented order; they may appear in any order.
const std::vector<std::string>& csv_columns();

LoadResult load_trips(const std::string& path, const GridConfig& grid);
LoadResult parse_trips(const std::string& csv_text, const GridConfig& grid);

struct LevelSpec {
  std::vector<double> tolls{4.8, 2.2, 0.0};
  std::vector<int> penalties{3, 5, 10};
  std::vector<double> duration_scale{0.85, 0.92, 1.0};
  /// Per-level delay pmfs (in slots) replacing the scaled empirical ones.
  std::optional<std::vector<DelayDist>> sidecar;
};

struct BuildConfig {
  int min_trips = 6;
  int sample_machines = 0;  // 0 keeps every eligible taxi
  Budget budget_cap = Budget::finite(5);
  std::uint64_t seed = 1;
};

struct IngestReport {
  long trips_in = 0;
  long trips_used = 0;
  int days = 0;
  int taxis_seen = 0;
  int taxis_kept = 0;
  int tasks = 0;
  int tasks_dropped_low_fare = 0;
  int edges = 0;
  double rescale_factor = 1.0;
  int delay_repairs = 0;
  bool sidecar = false;

  std::string to_json(const LoadResult* load = nullptr) const;
};

struct BuildResult {
  Instance instance;
  IngestReport report;
};

/// Throws invalid_argument when the result would have no edges.
BuildResult build_instance(const std::vector<TripRecord>& trips, const GridConfig& grid, const LevelSpec& levels = {},
                           const BuildConfig& config = {});

/// Reads per-level pmfs from JSON: [{"pmf": {"1": 0.5, "2": 0.5}}, ...].
std::vector<DelayDist> load_sidecar(const std::string& path);

}  // namespace omla::ingest
