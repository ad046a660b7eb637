#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ringchaos/dyson_gas.hpp"
#include "ringchaos/ingestion.hpp"
#include "ringchaos/optimizer.hpp"
#include "ringchaos/ring_model.hpp"
#include "ringchaos/spectral_statistics.hpp"

namespace ringchaos::io {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories. IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);
json read_json_file(const std::filesystem::path& path);
// Pretty-printed, trailing newline, stable key order.
std::string dump(const json& j);

// {circumference_m, stops: [{arc_position_m, mean_stop_time_s, max_stop_time_s,
//  min_stop_time_s}], segment_velocities_mps}
RingRoute route_from_json(const json& j);
json to_json(const RingRoute& route);
RingRoute load_route(const std::filesystem::path& path);

// {time_s, buses: [{id, position_m}]}
FleetSnapshot snapshot_from_json(const json& j);
json to_json(const FleetSnapshot& snapshot);
FleetSnapshot load_snapshot(const std::filesystem::path& path);

// {vertices: [[lat, lon], ...]}
RoutePolyline polyline_from_json(const json& j);
RoutePolyline load_polyline(const std::filesystem::path& path);

json to_json(const Histogram& hist);
json to_json(const BrodyFit& fit);
json to_json(const DisplacementPlan& plan, const FleetSnapshot& snapshot);

// {generated_at, entries: [{bus_id, stop_index, stop_duration_s, carryover_m}]}
json schedule_to_json(const Schedule& schedule, const std::string& generated_at);
// bus_id,stop_index,stop_duration_s,carryover_m
std::string schedule_to_csv(const Schedule& schedule);

}  // namespace ringchaos::io
