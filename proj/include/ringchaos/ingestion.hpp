#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringchaos/errors.hpp"
#include "ringchaos/ring_model.hpp"

namespace ringchaos {

struct GpsRecord {
  double timestamp = 0.0;  // seconds since epoch, millisecond resolution
  std::string bus_id;
  double latitude = 0.0;
  double longitude = 0.0;

  friend bool operator==(const GpsRecord&, const GpsRecord&) = default;
};

enum class GpsFormat { Csv, Json };

inline constexpr std::string_view kGpsCsvHeader = "timestamp_iso8601,bus_id,lat,lon";

// "2024-03-01T08:15:00.250+05:30" -> seconds since epoch. An offset or Z is
// required. Throws ParseError.
double parse_iso8601(std::string_view text);
// UTC with milliseconds, e.g. "2024-03-01T02:45:00.250Z".
std::string format_iso8601(double timestamp);

struct RowError {
  std::size_t row = 0;  // CSV: line number (header is 1). JSON: 1-based element.
  std::string reason;
};

struct GpsParseResult {
  std::vector<GpsRecord> records;  // sorted by (timestamp, bus_id)
  std::vector<RowError> errors;
  Warnings warnings;
};

/// Reads a GPS export. Bad rows are collected in `errors` unless `strict`,
/// in which case the first one raises ParseError. A missing or wrong CSV
/// header and unparseable JSON always fail. For duplicate (bus, timestamp)
/// fixes the last one in the file wins.
GpsParseResult parse_gps(std::istream& in, GpsFormat format, bool strict = false);
GpsParseResult parse_gps(std::string_view text, GpsFormat format, bool strict = false);
// Format from the extension (.csv / .json). IoError if unreadable.
GpsParseResult read_gps_file(const std::filesystem::path& path, bool strict = false);
GpsFormat gps_format_for(const std::filesystem::path& path);

std::string serialize_gps(const std::vector<GpsRecord>& records, GpsFormat format);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

inline constexpr double kEarthRadius = 6371008.8;  // meters, mean radius

/// Closed route loop with arc length measured in a local equirectangular
/// projection centered on the vertex centroid.
class RoutePolyline {
 public:
  // `vertices` must repeat the first vertex at the end. Throws ConfigError.
  explicit RoutePolyline(std::vector<LatLon> vertices);

  const std::vector<LatLon>& vertices() const noexcept { return vertices_; }
  const std::vector<double>& cumulative_arc() const noexcept { return arc_; }
  double total_length() const noexcept { return arc_.back(); }

  struct Point {
    double x = 0.0;
    double y = 0.0;
  };
  Point project(LatLon p) const noexcept;
  LatLon unproject(Point p) const noexcept;

  // Point on the loop at arc length `arc` (wrapped).
  LatLon point_at(double arc) const;

  // ConfigError unless total_length is within `tolerance` (relative) of
  // the route circumference.
  void check_consistent(const RingRoute& route, double tolerance = 0.02) const;

 private:
  std::vector<LatLon> vertices_;
  std::vector<Point> projected_;
  std::vector<double> arc_;
  double lat0_ = 0.0;
  double lon0_ = 0.0;
  double cos_lat0_ = 1.0;
};

inline constexpr double kOffRouteThreshold = 100.0;  // meters

struct MatchResult {
  double arc = 0.0;                // meters along the polyline, [0, total_length)
  double cross_track_error = 0.0;  // meters
  bool off_route = false;
};

MatchResult map_match(LatLon fix, const RoutePolyline& polyline, double threshold = kOffRouteThreshold);
MatchResult map_match(const GpsRecord& record, const RoutePolyline& polyline,
                      double threshold = kOffRouteThreshold);

struct SnapshotReport {
  FleetSnapshot snapshot;
  std::vector<std::string> stale;      // no fix within the staleness window
  std::vector<std::string> off_route;  // latest eligible fix off the route
};

inline constexpr double kDefaultStaleness = 300.0;  // seconds

/// Last-known position of every bus at time t.
///
/// Uses each bus's latest fix with timestamp <= t and t - timestamp <=
/// staleness. When `route` is given, polyline arc is rescaled to the route
/// circumference after the consistency check. Throws EmptySnapshot when no
/// bus qualifies.
SnapshotReport snapshot_at(const std::vector<GpsRecord>& records, double t, const RoutePolyline& polyline,
                           double staleness = kDefaultStaleness, const RingRoute* route = nullptr,
                           double threshold = kOffRouteThreshold);

}  // namespace ringchaos
