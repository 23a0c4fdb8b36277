#include <doctest.h>

#include <sstream>

#include "omla/error.hpp"
#include "omla/ingest.hpp"

using namespace omla;
using namespace omla::ingest;

namespace {

const char* kHeader = "taxi_id,driver_id,pickup_lon,pickup_lat,dropoff_lon,dropoff_lat,pickup_ts,dropoff_ts,duration_s,fare,toll\n";

std::string trip_row(const std::string& taxi, const std::string& ts, double plon = -73.99, double plat = 40.75,
                     double fare = 20.0) {
  std::ostringstream s;
  s << taxi << ",d" << taxi << ',' << plon << ',' << plat << ",-73.95,40.78," << ts << ",2020-01-01 20:30:00,600," << fare
    << ",0\n";
  return s.str();
}

std::string six_trips() {
  std::string csv = kHeader;
  for (int m = 0; m < 6; ++m) csv += trip_row("T1", "2020-01-01 19:0" + std::to_string(m) + ":10");
  return csv;
}

}  // namespace

TEST_SUITE("ingest") {
  TEST_CASE("header only") {
    const LoadResult r = parse_trips(kHeader, {});
    CHECK(r.trips.empty());
    CHECK(r.rows == 0);
    CHECK(r.skipped() == 0);
  }

  TEST_CASE("out of bounds pickup is skipped and counted") {
    const std::string csv = std::string(kHeader) + trip_row("A", "2020-01-01 19:10:00", -80.0) +
                            trip_row("B", "2020-01-01 19:10:00");
    const LoadResult r = parse_trips(csv, {});
    CHECK(r.trips.size() == 1);
    CHECK(r.skipped_bounds == 1);
    CHECK(r.skipped_malformed == 0);
  }

  TEST_CASE("window and malformed rows") {
    const std::string csv = std::string(kHeader) + trip_row("A", "2020-01-01 18:59:59") +
                            trip_row("B", "2020-01-01 20:00:00") + "C,dC,x,40.7,-73.9,40.7,2020-01-01 19:10:00,,1,1,0\n" +
                            "short,row\n";
    const LoadResult r = parse_trips(csv, {});
    CHECK(r.trips.empty());
    CHECK(r.skipped_window == 2);
    CHECK(r.skipped_malformed == 2);
    CHECK(r.rows == 4);
  }

  TEST_CASE("three rows round trip") {
    const std::string csv = std::string(kHeader) + trip_row("A", "2020-01-01 19:00:00") +
                            trip_row("B", "2020-01-02 19:30:59", -73.9, 40.7, 31.5) +
                            trip_row("C", "2020-01-03 19:59:00");
    const LoadResult r = parse_trips(csv, {});
    REQUIRE(r.trips.size() == 3);
    CHECK(r.trips[0].taxi_id == "A");
    CHECK(r.trips[0].slot == 1);
    CHECK(r.trips[1].slot == 31);
    CHECK(r.trips[1].date == "2020-01-02");
    CHECK(r.trips[1].pickup_lon == -73.9);
    CHECK(r.trips[1].fare == 31.5);
    CHECK(r.trips[2].slot == 60);
    CHECK(r.trips[2].duration_s == 600.0);
  }

  TEST_CASE("columns may come in any order") {
    const std::string csv =
        "fare,toll,taxi_id,driver_id,pickup_lon,pickup_lat,dropoff_lon,dropoff_lat,pickup_ts,dropoff_ts,duration_s\n"
        "12,0,Z,dz,-73.99,40.75,-73.95,40.78,2020-01-01 19:05:00,2020-01-01 19:20:00,900\n";
    const LoadResult r = parse_trips(csv, {});
    REQUIRE(r.trips.size() == 1);
    CHECK(r.trips[0].taxi_id == "Z");
    CHECK(r.trips[0].fare == 12.0);
  }

  TEST_CASE("missing column is an error") {
    CHECK_THROWS_AS(parse_trips("taxi_id,fare\nA,1\n", {}), Error);
  }

  TEST_CASE("one trip falls below the trip filter") {
    const std::string csv = std::string(kHeader) + trip_row("A", "2020-01-01 19:00:00");
    const LoadResult r = parse_trips(csv, {});
    try {
      build_instance(r.trips, {});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_argument);
      CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
    }
  }

  TEST_CASE("one taxi, one cell pair, six trips") {
    const LoadResult r = parse_trips(six_trips(), {});
    REQUIRE(r.trips.size() == 6);
    const BuildResult b = build_instance(r.trips, {});
    const Instance& in = b.instance;
    CHECK(in.machine_count() == 1);
    CHECK(in.task_count() == 1);
    CHECK(in.edge_count() == 1);
    CHECK(in.horizon() == 60);
    CHECK(in.levels() == 3);
    for (int t = 1; t <= 60; ++t) CHECK(in.arrival(0, t) == (t <= 6 ? 1.0 : 0.0));
    CHECK(b.report.days == 1);
    CHECK(b.report.rescale_factor == 1.0);
    CHECK(in.reward(0, 0) == doctest::Approx(15.2).epsilon(1e-12));
    CHECK(in.reward(0, 1) == doctest::Approx(17.8).epsilon(1e-12));
    CHECK(in.reward(0, 2) == 20.0);
    // 600 s scaled by 0.85, 0.92, 1.0 gives 9, 10, 10 slots; the tie is shifted to 11.
    CHECK(in.delay(0).prob(9) == 1.0);
    CHECK(in.delay(1).prob(10) == 1.0);
    CHECK(in.delay(2).prob(11) == 1.0);
    CHECK(b.report.delay_repairs == 1);
    CHECK(validate(in).ok());
  }

  TEST_CASE("crowded slots are rescaled to unit mass") {
    std::string csv = kHeader;
    for (int k = 0; k < 6; ++k) {
      csv += trip_row("T1", "2020-01-01 19:00:0" + std::to_string(k));
      csv += trip_row("T1", "2020-01-01 19:00:1" + std::to_string(k), -73.99, 40.75, 25.0);
    }
    // Second cell pair at the same origin with a different destination.
    for (int k = 0; k < 3; ++k) {
      std::string row = trip_row("T1", "2020-01-01 19:00:2" + std::to_string(k));
      row.replace(row.find("-73.95,40.78"), 12, "-73.85,40.70");
      csv += row;
    }
    const BuildResult b = build_instance(parse_trips(csv, {}).trips, {});
    CHECK(b.report.rescale_factor == 15.0);
    for (int t = 1; t <= b.instance.horizon(); ++t) {
      double mass = 0.0;
      for (TaskId v = 0; v < b.instance.task_count(); ++v) mass += b.instance.arrival(v, t);
      CHECK(mass <= 1.0 + 1e-12);
    }
    for (EdgeId e = 0; e < b.instance.edge_count(); ++e)
      for (LevelId l = 1; l < b.instance.levels(); ++l) CHECK(b.instance.reward(e, l) > b.instance.reward(e, l - 1));
  }

  TEST_CASE("low-fare types are dropped") {
    std::string csv = kHeader;
    for (int m = 0; m < 6; ++m) csv += trip_row("T1", "2020-01-01 19:0" + std::to_string(m) + ":10", -73.99, 40.75, 3.0);
    try {
      build_instance(parse_trips(csv, {}).trips, {});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_argument);
    }
  }

  TEST_CASE("sidecar delays replace the empirical ones") {
    LevelSpec lv;
    lv.sidecar = std::vector<DelayDist>{DelayDist::point_mass(1), DelayDist::point_mass(2), DelayDist::point_mass(4)};
    const BuildResult b = build_instance(parse_trips(six_trips(), {}).trips, {}, lv);
    CHECK(b.report.sidecar);
    CHECK(b.instance.delay(2).prob(4) == 1.0);
  }

  TEST_CASE("budget cap and seed") {
    BuildConfig cfg;
    cfg.budget_cap = Budget::unlimited();
    const auto trips = parse_trips(six_trips(), {}).trips;
    CHECK(build_instance(trips, {}, {}, cfg).instance.all_unlimited());
    cfg.budget_cap = Budget::finite(1);
    const BuildResult a = build_instance(trips, {}, {}, cfg);
    const BuildResult b = build_instance(trips, {}, {}, cfg);
    CHECK(a.instance.budget(0).value() == 1);
    CHECK(a.instance.edge(0).accept_prob == b.instance.edge(0).accept_prob);
  }
}
