#include "doctest.h"

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "ringchaos/errors.hpp"
#include "ringchaos/ingestion.hpp"
#include "ringchaos/rng.hpp"

using namespace ringchaos;
using oracle::kPi;

namespace {

constexpr double kLat0 = 22.55, kLon0 = 88.35;
constexpr double kSide = 0.02;  // degrees

// Square loop, counter-clockwise, closed.
RoutePolyline square() {
  return RoutePolyline({{kLat0, kLon0},
                        {kLat0, kLon0 + kSide},
                        {kLat0 + kSide, kLon0 + kSide},
                        {kLat0 + kSide, kLon0},
                        {kLat0, kLon0}});
}

double rad(double deg) { return deg * kPi / 180.0; }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::UsageError;
}

}  // namespace

TEST_CASE("iso8601") {
  CHECK(parse_iso8601("1970-01-01T00:00:00Z") == 0.0);
  CHECK(parse_iso8601("2024-03-01T08:15:00.250+05:30") == doctest::Approx(1709261100.25));
  CHECK(parse_iso8601("2024-03-01T02:45:00.250Z") == parse_iso8601("2024-03-01T08:15:00.250+0530"));
  CHECK(format_iso8601(1709261100.25) == "2024-03-01T02:45:00.250Z");
  CHECK(format_iso8601(-0.5) == "1969-12-31T23:59:59.500Z");
  CHECK(kind_of([] { parse_iso8601("2024-03-01T08:15:00"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_iso8601("2024-13-01T08:15:00Z"); }) == ErrorKind::ParseError);
}

TEST_CASE("parse gps") {
  CHECK(parse_gps("", GpsFormat::Csv).records.empty());
  CHECK(parse_gps("", GpsFormat::Json).records.empty());
  CHECK(parse_gps("[]", GpsFormat::Json).records.empty());

  const std::string one = "timestamp_iso8601,bus_id,lat,lon\n2024-03-01T02:45:00.250Z,WB-1,22.5726,88.3639\n";
  const auto r = parse_gps(one, GpsFormat::Csv);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].bus_id == "WB-1");
  CHECK(r.records[0].latitude == 22.5726);
  CHECK(r.records[0].longitude == 88.3639);
  CHECK(r.records[0].timestamp == 1709261100.25);

  const std::string bad = std::string(kGpsCsvHeader) +
                          "\n2024-03-01T02:45:00Z,a,95,88\n2024-03-01T02:45:00Z,b,22,190\nnot-a-time,c,1,1\n"
                          "2024-03-01T02:45:00Z,d,1,1\n";
  const auto lenient = parse_gps(bad, GpsFormat::Csv);
  CHECK(lenient.records.size() == 1);
  REQUIRE(lenient.errors.size() == 3);
  CHECK(lenient.errors[0].row == 2);
  CHECK(lenient.errors[0].reason == "latitude out of range");
  CHECK(lenient.errors[1].reason == "longitude out of range");
  CHECK(lenient.errors[2].row == 4);
  try {
    parse_gps(bad, GpsFormat::Csv, true);
    FAIL("strict mode accepted a bad row");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  CHECK(kind_of([] { parse_gps("time,bus,lat,lon\n", GpsFormat::Csv); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_gps("{", GpsFormat::Json); }) == ErrorKind::ParseError);

  const auto js = parse_gps(R"([{"t": "2024-03-01T02:45:05Z", "id": "x", "lat": 1, "lon": 2},
                               {"t": "2024-03-01T02:45:00Z", "id": "y", "lat": 95, "lon": 2},
                               {"t": "2024-03-01T02:45:00Z", "id": "z", "lat": 3, "lon": 4}])",
                            GpsFormat::Json);
  REQUIRE(js.records.size() == 2);
  CHECK(js.records[0].bus_id == "z");  // sorted by timestamp
  REQUIRE(js.errors.size() == 1);
  CHECK(js.errors[0].row == 2);
}

TEST_CASE("duplicate fixes keep the last one") {
  const std::string dup = std::string(kGpsCsvHeader) +
                          "\n2024-03-01T02:45:00Z,a,1,1\n2024-03-01T02:45:00Z,a,2,2\n";
  const auto r = parse_gps(dup, GpsFormat::Csv);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].latitude == 2.0);
  CHECK(!r.warnings.empty());
}

TEST_CASE("serialize round trip") {
  Rng rng(4);
  std::vector<GpsRecord> recs;
  for (int i = 0; i < 2000; ++i) {
    const double ms = std::floor(rng.uniform(1.6e12, 1.8e12));
    recs.push_back({ms / 1000.0, "bus," + std::to_string(i % 37) + (i % 5 ? "" : "\"q\""), rng.uniform(-90, 90),
                    rng.uniform(-180, 180)});
  }
  const auto sorted = parse_gps(serialize_gps(recs, GpsFormat::Csv), GpsFormat::Csv).records;
  CHECK(parse_gps(serialize_gps(sorted, GpsFormat::Csv), GpsFormat::Csv).records == sorted);
  CHECK(parse_gps(serialize_gps(sorted, GpsFormat::Json), GpsFormat::Json).records == sorted);
  CHECK(sorted.size() == recs.size());
}

TEST_CASE("polyline geometry") {
  const auto p = square();
  // Independent equirectangular lengths: horizontal sides scale by cos(centroid latitude).
  const double c = std::cos(rad(kLat0 + kSide / 2));
  const double ew = kEarthRadius * rad(kSide) * c, ns = kEarthRadius * rad(kSide);
  CHECK(p.total_length() == doctest::Approx(2 * ew + 2 * ns).epsilon(1e-12));
  CHECK(p.cumulative_arc()[1] == doctest::Approx(ew).epsilon(1e-12));

  CHECK(kind_of([] { RoutePolyline({{0, 0}, {0, 1}, {0, 0}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { RoutePolyline({{0, 0}, {0, 1}, {1, 1}, {1, 0}}); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { RoutePolyline({{0, 0}, {0, 1}, {0, 1}, {1, 1}, {0, 0}}); }) == ErrorKind::ConfigError);

  const RingRoute close(p.total_length() * 1.01, {}, {10.0});
  const RingRoute far(p.total_length() * 1.05, {}, {10.0});
  CHECK_NOTHROW(p.check_consistent(close));
  CHECK(kind_of([&] { p.check_consistent(far); }) == ErrorKind::ConfigError);
}

TEST_CASE("map matching") {
  const auto p = square();
  const double ew = kEarthRadius * rad(kSide) * std::cos(rad(kLat0 + kSide / 2));

  const auto v = map_match(LatLon{kLat0 + kSide, kLon0 + kSide}, p);
  CHECK(v.arc == doctest::Approx(p.cumulative_arc()[2]).epsilon(1e-12));
  CHECK(v.cross_track_error <= 1e-6);
  CHECK(map_match(LatLon{kLat0, kLon0}, p).arc == 0.0);

  // Midpoint of the southern side, 10 m south of it (outside the loop).
  const LatLon off{kLat0 - 10.0 / kEarthRadius * 180.0 / kPi, kLon0 + kSide / 2};
  const auto m = map_match(off, p);
  CHECK(m.arc == doctest::Approx(ew / 2).epsilon(1e-9));
  CHECK(m.cross_track_error == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(!m.off_route);

  const auto far = map_match(LatLon{kLat0 - 0.05, kLon0}, p);
  CHECK(far.off_route);

  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const LatLon fix{kLat0 + rng.uniform(-0.005, kSide + 0.005), kLon0 + rng.uniform(-0.005, kSide + 0.005)};
    const auto first = map_match(fix, p);
    const auto again = map_match(p.point_at(first.arc), p);
    CHECK(std::abs(again.arc - first.arc) <= 1e-6);
    CHECK(again.cross_track_error <= 1e-6);
  }
}

TEST_CASE("snapshots") {
  const auto p = square();
  const double t = 1.7e9;
  const LatLon on = p.point_at(1000.0);
  const LatLon later = p.point_at(1500.0);

  const auto one = snapshot_at({{t, "a", on.lat, on.lon}}, t, p);
  REQUIRE(one.snapshot.size() == 1);
  CHECK(one.snapshot.buses[0].position == doctest::Approx(1000.0).epsilon(1e-9));
  CHECK(one.snapshot.time == t);

  CHECK(kind_of([&] { snapshot_at({{t - 301, "a", on.lat, on.lon}}, t, p); }) == ErrorKind::EmptySnapshot);

  const std::vector<GpsRecord> two = {{t - 10, "a", on.lat, on.lon}, {t - 5, "a", later.lat, later.lon}};
  CHECK(snapshot_at(two, t, p).snapshot.buses[0].position == doctest::Approx(1500.0).epsilon(1e-9));

  const std::vector<GpsRecord> mixed = {{t - 400, "old", on.lat, on.lon},
                                        {t - 20, "ok", on.lat, on.lon},
                                        {t - 20, "lost", kLat0 - 0.05, kLon0},
                                        {t + 5, "future", on.lat, on.lon}};
  const auto rep = snapshot_at(mixed, t, p);
  CHECK(rep.snapshot.size() == 1);
  CHECK(rep.off_route == std::vector<std::string>{"lost"});
  CHECK(std::find(rep.stale.begin(), rep.stale.end(), "old") != rep.stale.end());

  for (double st : {30.0, 100.0, 500.0}) {
    const auto small = snapshot_at(mixed, t, p, st).snapshot.size();
    const auto big = snapshot_at(mixed, t, p, st * 2).snapshot.size();
    CHECK(big >= small);
  }

  const RingRoute ring(p.total_length() * 1.01, {}, {10.0});
  const auto scaled = snapshot_at({{t, "a", on.lat, on.lon}}, t, p, kDefaultStaleness, &ring);
  CHECK(scaled.snapshot.buses[0].position == doctest::Approx(1010.0).epsilon(1e-9));
}
