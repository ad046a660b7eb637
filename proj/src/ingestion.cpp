#include "ringchaos/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace ringchaos {
namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

struct Cursor {
  std::string_view s;
  std::size_t i = 0;

  bool done() const { return i >= s.size(); }
  char peek() const { return done() ? '\0' : s[i]; }

  // Exactly `width` decimal digits.
  int digits(int width) {
    int v = 0;
    for (int k = 0; k < width; ++k) {
      if (done() || s[i] < '0' || s[i] > '9') throw Error(ErrorKind::ParseError, "bad timestamp '" + std::string(s) + "'");
      v = v * 10 + (s[i++] - '0');
    }
    return v;
  }
  void expect(char c) {
    if (peek() != c) throw Error(ErrorKind::ParseError, "bad timestamp '" + std::string(s) + "'");
    ++i;
  }
};

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Reason string, or empty when the record is valid.
std::string check_record(const GpsRecord& r) {
  if (r.bus_id.empty()) return "empty bus_id";
  if (!std::isfinite(r.timestamp)) return "timestamp not finite";
  if (!(r.latitude >= -90.0 && r.latitude <= 90.0)) return "latitude out of range";
  if (!(r.longitude >= -180.0 && r.longitude <= 180.0)) return "longitude out of range";
  return {};
}

// RFC 4180 field splitting for one line (no embedded newlines).
bool split_csv(std::string_view line, std::vector<std::string>& fields) {
  fields.clear();
  std::string cur;
  std::size_t i = 0;
  while (true) {
    cur.clear();
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (true) {
        if (i >= line.size()) return false;
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          cur += line[i++];
        }
      }
      if (i < line.size() && line[i] != ',') return false;
    } else {
      while (i < line.size() && line[i] != ',') cur += line[i++];
    }
    fields.push_back(cur);
    if (i >= line.size()) return true;
    ++i;  // comma
  }
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void fail_or_collect(GpsParseResult& result, bool strict, std::size_t row, const std::string& reason) {
  if (strict) throw Error(ErrorKind::ParseError, "row " + std::to_string(row) + ": " + reason);
  result.errors.push_back({row, reason});
}

void parse_csv(std::istream& in, GpsParseResult& result, std::vector<GpsRecord>& rows, bool strict) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
      if (line != kGpsCsvHeader) {
        throw Error(ErrorKind::ParseError, "expected header '" + std::string(kGpsCsvHeader) + "'");
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    if (!split_csv(line, fields)) {
      fail_or_collect(result, strict, lineno, "unbalanced quotes");
      continue;
    }
    if (fields.size() != 4) {
      fail_or_collect(result, strict, lineno, "expected 4 fields, got " + std::to_string(fields.size()));
      continue;
    }
    GpsRecord r;
    try {
      r.timestamp = parse_iso8601(fields[0]);
    } catch (const Error&) {
      fail_or_collect(result, strict, lineno, "bad timestamp");
      continue;
    }
    r.bus_id = fields[1];
    if (!parse_double(fields[2], r.latitude)) {
      fail_or_collect(result, strict, lineno, "latitude is not a number");
      continue;
    }
    if (!parse_double(fields[3], r.longitude)) {
      fail_or_collect(result, strict, lineno, "longitude is not a number");
      continue;
    }
    if (auto why = check_record(r); !why.empty()) {
      fail_or_collect(result, strict, lineno, why);
      continue;
    }
    rows.push_back(std::move(r));
  }
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed");
}

void parse_json(std::istream& in, GpsParseResult& result, std::vector<GpsRecord>& rows, bool strict) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed");
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorKind::ParseError, "GPS JSON must be an array");
  std::size_t row = 0;
  for (const json& item : doc) {
    ++row;
    if (!item.is_object()) {
      fail_or_collect(result, strict, row, "element is not an object");
      continue;
    }
    const auto t = item.find("t");
    const auto id = item.find("id");
    const auto lat = item.find("lat");
    const auto lon = item.find("lon");
    if (t == item.end() || !t->is_string()) {
      fail_or_collect(result, strict, row, "missing or non-string 't'");
      continue;
    }
    if (id == item.end() || !id->is_string()) {
      fail_or_collect(result, strict, row, "missing or non-string 'id'");
      continue;
    }
    if (lat == item.end() || !lat->is_number() || lon == item.end() || !lon->is_number()) {
      fail_or_collect(result, strict, row, "missing or non-numeric 'lat'/'lon'");
      continue;
    }
    GpsRecord r;
    try {
      r.timestamp = parse_iso8601(t->get<std::string>());
    } catch (const Error&) {
      fail_or_collect(result, strict, row, "bad timestamp");
      continue;
    }
    r.bus_id = id->get<std::string>();
    r.latitude = lat->get<double>();
    r.longitude = lon->get<double>();
    if (auto why = check_record(r); !why.empty()) {
      fail_or_collect(result, strict, row, why);
      continue;
    }
    rows.push_back(std::move(r));
  }
}

}  // namespace

double parse_iso8601(std::string_view text) {
  Cursor c{text};
  const int year = c.digits(4);
  c.expect('-');
  const int month = c.digits(2);
  c.expect('-');
  const int day = c.digits(2);
  c.expect('T');
  const int hour = c.digits(2);
  c.expect(':');
  const int minute = c.digits(2);
  c.expect(':');
  const int second = c.digits(2);

  long long millis = 0;
  if (c.peek() == '.') {
    ++c.i;
    int n = 0;
    double frac = 0.0, scale = 0.1;
    while (!c.done() && c.peek() >= '0' && c.peek() <= '9') {
      frac += scale * (c.s[c.i++] - '0');
      scale *= 0.1;
      ++n;
    }
    if (n == 0) throw Error(ErrorKind::ParseError, "bad timestamp '" + std::string(text) + "'");
    millis = std::llround(frac * 1000.0);
  }

  int offset_minutes = 0;
  if (c.peek() == 'Z') {
    ++c.i;
  } else if (c.peek() == '+' || c.peek() == '-') {
    const int sign = c.peek() == '-' ? -1 : 1;
    ++c.i;
    const int oh = c.digits(2);
    if (c.peek() == ':') ++c.i;
    const int om = c.digits(2);
    if (oh > 23 || om > 59) throw Error(ErrorKind::ParseError, "bad UTC offset in '" + std::string(text) + "'");
    offset_minutes = sign * (oh * 60 + om);
  } else {
    throw Error(ErrorKind::ParseError, "timestamp needs a UTC offset: '" + std::string(text) + "'");
  }
  if (!c.done()) throw Error(ErrorKind::ParseError, "trailing characters in '" + std::string(text) + "'");

  const std::chrono::year_month_day ymd{std::chrono::year(year), std::chrono::month(static_cast<unsigned>(month)),
                                        std::chrono::day(static_cast<unsigned>(day))};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
    throw Error(ErrorKind::ParseError, "timestamp out of range: '" + std::string(text) + "'");
  }
  const long long days = std::chrono::sys_days(ymd).time_since_epoch().count();
  const long long secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_minutes * 60LL;
  return static_cast<double>(secs * 1000 + millis) / 1000.0;
}

std::string format_iso8601(double timestamp) {
  const long long total_ms = std::llround(timestamp * 1000.0);
  const long long secs = floor_div(total_ms, 1000);
  const long long ms = total_ms - secs * 1000;
  const long long days = floor_div(secs, 86400);
  const long long sod = secs - days * 86400;
  const std::chrono::year_month_day ymd{std::chrono::sys_days(std::chrono::days(days))};
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), sod / 3600, (sod / 60) % 60,
                sod % 60, ms);
  return buf;
}

GpsParseResult parse_gps(std::istream& in, GpsFormat format, bool strict) {
  if (!in) throw Error(ErrorKind::IoError, "GPS stream is not readable");
  GpsParseResult result;
  std::vector<GpsRecord> rows;
  if (format == GpsFormat::Csv) {
    parse_csv(in, result, rows, strict);
  } else {
    parse_json(in, result, rows, strict);
  }

  // Stable, so among equal keys file order survives and the last one wins.
  std::stable_sort(rows.begin(), rows.end(), [](const GpsRecord& a, const GpsRecord& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.bus_id < b.bus_id;
  });
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i + 1;
    while (j < rows.size() && rows[j].timestamp == rows[i].timestamp && rows[j].bus_id == rows[i].bus_id) ++j;
    if (j - i > 1) {
      result.warnings.push_back("DuplicateFix: bus " + rows[i].bus_id + " has " + std::to_string(j - i) +
                                " fixes at " + format_iso8601(rows[i].timestamp) + "; kept the last in file");
    }
    result.records.push_back(std::move(rows[j - 1]));
    i = j;
  }
  return result;
}

GpsParseResult parse_gps(std::string_view text, GpsFormat format, bool strict) {
  std::istringstream in{std::string(text)};
  return parse_gps(in, format, strict);
}

GpsFormat gps_format_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv" || ext == ".CSV") return GpsFormat::Csv;
  if (ext == ".json" || ext == ".JSON") return GpsFormat::Json;
  throw Error(ErrorKind::UsageError, "cannot infer GPS format from '" + path.string() + "'");
}

GpsParseResult read_gps_file(const std::filesystem::path& path, bool strict) {
  const GpsFormat format = gps_format_for(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return parse_gps(in, format, strict);
}

std::string serialize_gps(const std::vector<GpsRecord>& records, GpsFormat format) {
  if (format == GpsFormat::Csv) {
    std::string out(kGpsCsvHeader);
    out += '\n';
    for (const auto& r : records) {
      out += format_iso8601(r.timestamp);
      out += ',';
      out += csv_field(r.bus_id);
      out += ',';
      out += fmt_double(r.latitude);
      out += ',';
      out += fmt_double(r.longitude);
      out += '\n';
    }
    return out;
  }
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"t", format_iso8601(r.timestamp)}, {"id", r.bus_id}, {"lat", r.latitude}, {"lon", r.longitude}});
  }
  return arr.dump(2) + "\n";
}

RoutePolyline::RoutePolyline(std::vector<LatLon> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 4) {
    throw Error(ErrorKind::ConfigError, "polyline needs at least 3 distinct vertices plus the closing vertex");
  }
  const LatLon& first = vertices_.front();
  const LatLon& last = vertices_.back();
  if (first.lat != last.lat || first.lon != last.lon) {
    throw Error(ErrorKind::ConfigError, "polyline is not closed: first and last vertex differ");
  }
  for (const auto& v : vertices_) {
    if (!(v.lat >= -90.0 && v.lat <= 90.0) || !(v.lon >= -180.0 && v.lon <= 180.0)) {
      throw Error(ErrorKind::ConfigError, "polyline vertex out of range");
    }
  }
  const std::size_t distinct = vertices_.size() - 1;
  for (std::size_t i = 0; i < distinct; ++i) {
    lat0_ += vertices_[i].lat;
    lon0_ += vertices_[i].lon;
  }
  lat0_ /= static_cast<double>(distinct);
  lon0_ /= static_cast<double>(distinct);
  cos_lat0_ = std::cos(lat0_ * kDeg);

  projected_.reserve(vertices_.size());
  for (const auto& v : vertices_) projected_.push_back(project(v));
  arc_.assign(vertices_.size(), 0.0);
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const double len = std::hypot(projected_[i].x - projected_[i - 1].x, projected_[i].y - projected_[i - 1].y);
    if (!(len > 0.0)) {
      throw Error(ErrorKind::ConfigError, "polyline has a zero-length segment at vertex " + std::to_string(i));
    }
    arc_[i] = arc_[i - 1] + len;
  }
}

RoutePolyline::Point RoutePolyline::project(LatLon p) const noexcept {
  return {kEarthRadius * (p.lon - lon0_) * kDeg * cos_lat0_, kEarthRadius * (p.lat - lat0_) * kDeg};
}

LatLon RoutePolyline::unproject(Point p) const noexcept {
  return {lat0_ + p.y / (kEarthRadius * kDeg), lon0_ + p.x / (kEarthRadius * kDeg * cos_lat0_)};
}

LatLon RoutePolyline::point_at(double arc) const {
  const double total = total_length();
  double a = std::fmod(arc, total);
  if (a < 0.0) a += total;
  auto it = std::upper_bound(arc_.begin(), arc_.end(), a);
  std::size_t k = static_cast<std::size_t>(it - arc_.begin());
  k = std::clamp<std::size_t>(k, 1, arc_.size() - 1);
  const double f = (a - arc_[k - 1]) / (arc_[k] - arc_[k - 1]);
  const Point& p = projected_[k - 1];
  const Point& q = projected_[k];
  return unproject({p.x + f * (q.x - p.x), p.y + f * (q.y - p.y)});
}

void RoutePolyline::check_consistent(const RingRoute& route, double tolerance) const {
  const double rel = std::abs(total_length() - route.circumference()) / route.circumference();
  if (rel > tolerance) {
    throw Error(ErrorKind::ConfigError, "polyline length " + fmt_double(total_length()) +
                                            " m differs from route circumference " +
                                            fmt_double(route.circumference()) + " m by more than " +
                                            fmt_double(tolerance * 100.0) + "%");
  }
}

MatchResult map_match(LatLon fix, const RoutePolyline& polyline, double threshold) {
  const auto p = polyline.project(fix);
  const auto& arc = polyline.cumulative_arc();
  const std::size_t nseg = polyline.vertices().size() - 1;

  double best = std::numeric_limits<double>::infinity();
  double best_arc = 0.0;
  for (std::size_t k = 0; k < nseg; ++k) {
    const auto a = polyline.project(polyline.vertices()[k]);
    const auto b = polyline.project(polyline.vertices()[k + 1]);
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double f = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    f = std::clamp(f, 0.0, 1.0);
    const double d = std::hypot(p.x - (a.x + f * dx), p.y - (a.y + f * dy));
    if (d < best) {
      best = d;
      best_arc = arc[k] + f * (arc[k + 1] - arc[k]);
    }
  }
  if (best_arc >= polyline.total_length()) best_arc -= polyline.total_length();
  return {best_arc, best, best > threshold};
}

MatchResult map_match(const GpsRecord& record, const RoutePolyline& polyline, double threshold) {
  return map_match(LatLon{record.latitude, record.longitude}, polyline, threshold);
}

SnapshotReport snapshot_at(const std::vector<GpsRecord>& records, double t, const RoutePolyline& polyline,
                           double staleness, const RingRoute* route, double threshold) {
  if (!(staleness >= 0.0)) throw Error(ErrorKind::DomainError, "staleness must be non-negative");
  double scale = 1.0;
  if (route) {
    polyline.check_consistent(*route);
    scale = route->circumference() / polyline.total_length();
  }

  // Latest fix at or before t per bus; ordered map keeps output deterministic.
  std::map<std::string, const GpsRecord*> latest;
  std::set<std::string> seen;
  for (const auto& r : records) {
    seen.insert(r.bus_id);
    if (r.timestamp > t) continue;
    auto& slot = latest[r.bus_id];
    if (!slot || r.timestamp >= slot->timestamp) slot = &r;
  }

  SnapshotReport report;
  report.snapshot.time = t;
  for (const auto& id : seen) {
    const auto it = latest.find(id);
    if (it == latest.end() || t - it->second->timestamp > staleness) {
      report.stale.push_back(id);
      continue;
    }
    const MatchResult m = map_match(*it->second, polyline, threshold);
    if (m.off_route) {
      report.off_route.push_back(id);
      continue;
    }
    double pos = m.arc * scale;
    if (route) pos = wrap_position(pos, route->circumference());
    report.snapshot.buses.push_back({id, pos});
  }
  if (report.snapshot.buses.empty()) {
    throw Error(ErrorKind::EmptySnapshot, "no bus has a fresh on-route fix at t = " + format_iso8601(t));
  }
  return report;
}

}  // namespace ringchaos
