#include "ringchaos/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ringchaos/errors.hpp"

namespace ringchaos::io {
namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Wraps nlohmann type and key errors into the given kind.
template <class F>
auto guarded(ErrorKind kind, const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(kind, what + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed for '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path.string() + "'");
}

json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RingRoute route_from_json(const json& j) {
  return guarded(ErrorKind::ConfigError, "route", [&] {
    std::vector<Stop> stops;
    for (const json& s : j.at("stops")) {
      stops.push_back({s.at("arc_position_m").get<double>(), s.at("mean_stop_time_s").get<double>(),
                       s.at("max_stop_time_s").get<double>(), s.value("min_stop_time_s", 0.0)});
    }
    return RingRoute(j.at("circumference_m").get<double>(), std::move(stops),
                     j.at("segment_velocities_mps").get<std::vector<double>>());
  });
}

json to_json(const RingRoute& route) {
  json stops = json::array();
  for (const Stop& s : route.stops()) {
    stops.push_back({{"arc_position_m", s.arc_position},
                     {"mean_stop_time_s", s.mean_stop_time},
                     {"max_stop_time_s", s.max_stop_time},
                     {"min_stop_time_s", s.min_stop_time}});
  }
  return {{"circumference_m", route.circumference()},
          {"stops", stops},
          {"segment_velocities_mps", route.segment_velocities()}};
}

RingRoute load_route(const std::filesystem::path& path) { return route_from_json(read_json_file(path)); }

FleetSnapshot snapshot_from_json(const json& j) {
  return guarded(ErrorKind::ParseError, "snapshot", [&] {
    FleetSnapshot snap;
    snap.time = j.value("time_s", 0.0);
    for (const json& b : j.at("buses")) {
      const json& id = b.at("id");
      snap.buses.push_back({id.is_string() ? id.get<std::string>() : id.dump(), b.at("position_m").get<double>()});
    }
    return snap;
  });
}

json to_json(const FleetSnapshot& snapshot) {
  json buses = json::array();
  for (const auto& b : snapshot.buses) buses.push_back({{"id", b.bus_id}, {"position_m", b.position}});
  return {{"time_s", snapshot.time}, {"buses", buses}};
}

FleetSnapshot load_snapshot(const std::filesystem::path& path) { return snapshot_from_json(read_json_file(path)); }

RoutePolyline polyline_from_json(const json& j) {
  return guarded(ErrorKind::ParseError, "polyline", [&] {
    std::vector<LatLon> v;
    for (const json& p : j.at("vertices")) {
      if (!p.is_array() || p.size() != 2) throw Error(ErrorKind::ParseError, "polyline vertex must be [lat, lon]");
      v.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return RoutePolyline(std::move(v));
  });
}

RoutePolyline load_polyline(const std::filesystem::path& path) { return polyline_from_json(read_json_file(path)); }

json to_json(const Histogram& hist) {
  return {{"bin_edges", hist.bin_edges}, {"counts", hist.counts}, {"total", hist.total}};
}

json to_json(const BrodyFit& fit) {
  return {{"q_hat", fit.q_hat}, {"log_likelihood", fit.log_likelihood}, {"warnings", fit.warnings}};
}

json to_json(const DisplacementPlan& plan, const FleetSnapshot& snapshot) {
  json deltas = json::array();
  for (std::size_t i = 0; i < plan.deltas.size(); ++i) {
    deltas.push_back({{"bus_id", snapshot.buses[i].bus_id}, {"delta_m", plan.deltas[i]}});
  }
  return {{"deltas", deltas},
          {"objective_before", plan.objective_before},
          {"objective_after", plan.objective_after},
          {"iterations_used", plan.iterations_used},
          {"clamped", plan.clamped},
          {"rotation", plan.rotation}};
}

json schedule_to_json(const Schedule& schedule, const std::string& generated_at) {
  json entries = json::array();
  for (const auto& e : schedule.entries) {
    entries.push_back({{"bus_id", e.bus_id},
                       {"stop_index", e.stop_index},
                       {"stop_duration_s", e.stop_duration},
                       {"carryover_m", e.carryover}});
  }
  return {{"generated_at", generated_at}, {"entries", entries}};
}

std::string schedule_to_csv(const Schedule& schedule) {
  std::string out = "bus_id,stop_index,stop_duration_s,carryover_m\n";
  for (const auto& e : schedule.entries) {
    std::string id = e.bus_id;
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : id) {
        if (c == '"') q += '"';
        q += c;
      }
      id = q + '"';
    }
    out += id + ',' + std::to_string(e.stop_index) + ',' + fmt(e.stop_duration) + ',' + fmt(e.carryover) + '\n';
  }
  return out;
}

}  // namespace ringchaos::io
