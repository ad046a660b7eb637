#include "ringchaos/ring_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "ringchaos/errors.hpp"

namespace ringchaos {

RingRoute::RingRoute(double circumference, std::vector<Stop> stops, std::vector<double> segment_velocities)
    : circumference_(circumference), stops_(std::move(stops)), velocities_(std::move(segment_velocities)) {
  if (!(circumference_ > 0.0) || !std::isfinite(circumference_)) {
    throw Error(ErrorKind::ConfigError, "circumference must be positive");
  }
  for (std::size_t k = 0; k < stops_.size(); ++k) {
    const Stop& s = stops_[k];
    if (!(s.arc_position >= 0.0 && s.arc_position < circumference_)) {
      throw Error(ErrorKind::ConfigError, "stop " + std::to_string(k) + " lies outside [0, circumference)");
    }
    if (k > 0 && !(s.arc_position > stops_[k - 1].arc_position)) {
      throw Error(ErrorKind::ConfigError, "stop positions must be strictly increasing");
    }
    if (!(0.0 <= s.min_stop_time && s.min_stop_time <= s.mean_stop_time &&
          s.mean_stop_time <= s.max_stop_time)) {
      throw Error(ErrorKind::ConfigError,
                  "stop " + std::to_string(k) + " violates 0 <= min <= mean <= max stop time");
    }
  }
  const std::size_t expected = stops_.empty() ? 1 : stops_.size();
  if (velocities_.size() != expected) {
    throw Error(ErrorKind::ConfigError, "expected " + std::to_string(expected) +
                                            " segment velocities, got " + std::to_string(velocities_.size()));
  }
  for (double v : velocities_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::ConfigError, "segment velocities must be positive");
  }
}

std::size_t RingRoute::next_stop(double position) const {
  if (stops_.empty()) throw Error(ErrorKind::ConfigError, "route has no stops");
  auto it = std::lower_bound(stops_.begin(), stops_.end(), position,
                             [](const Stop& s, double x) { return s.arc_position < x; });
  if (it == stops_.end()) return 0;
  return static_cast<std::size_t>(it - stops_.begin());
}

std::size_t RingRoute::segment_index(double position) const {
  if (stops_.empty()) return 0;
  const std::size_t next = next_stop(position);
  return next == 0 ? stops_.size() - 1 : next - 1;
}

double RingRoute::velocity_at(double position) const { return velocities_[segment_index(position)]; }

double RingRoute::forward_distance(double from, double to) const noexcept {
  return wrap_position(to - from, circumference_);
}

std::vector<double> FleetSnapshot::positions() const {
  std::vector<double> out;
  out.reserve(buses.size());
  for (const auto& b : buses) out.push_back(b.position);
  return out;
}

void validate(const FleetSnapshot& snapshot, const RingRoute& route) {
  std::unordered_set<std::string> seen;
  for (const auto& bus : snapshot.buses) {
    if (!(bus.position >= 0.0 && bus.position < route.circumference())) {
      throw Error(ErrorKind::InvalidPosition, "bus " + bus.bus_id + " at " + std::to_string(bus.position) +
                                                  " is outside [0, circumference)");
    }
    if (!seen.insert(bus.bus_id).second) {
      throw Error(ErrorKind::ConfigError, "duplicate bus id " + bus.bus_id);
    }
  }
}

double wrap_position(double x, double circumference) noexcept {
  double r = std::fmod(x, circumference);
  if (r < 0.0) r += circumference;
  // fmod of a tiny negative number plus L can round up to L itself.
  if (r >= circumference) r = 0.0;
  return r;
}

double ring_difference(double from, double to, double circumference) noexcept {
  double d = wrap_position(to - from, circumference);
  if (d > 0.5 * circumference) d -= circumference;
  return d;
}

namespace {

SpacingSample spacings_in_order(std::span<const double> positions, std::vector<std::size_t> order,
                                double circumference) {
  const std::size_t n = positions.size();
  SpacingSample out;
  out.order = std::move(order);
  out.raw.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.raw[i] = positions[out.order[i + 1]] - positions[out.order[i]];
  }
  out.raw[n - 1] = circumference - positions[out.order[n - 1]] + positions[out.order[0]];
  out.mean_spacing = circumference / static_cast<double>(n);
  out.normalized.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.normalized[i] = out.raw[i] / out.mean_spacing;
  return out;
}

void check_positions(std::span<const double> positions, double circumference) {
  if (positions.size() < 2) {
    throw Error(ErrorKind::InsufficientFleet, "need at least 2 buses, got " + std::to_string(positions.size()));
  }
  for (double x : positions) {
    if (!(x >= 0.0 && x < circumference)) {
      throw Error(ErrorKind::InvalidPosition, "position " + std::to_string(x) + " outside [0, circumference)");
    }
  }
}

}  // namespace

SpacingSample spacings(std::span<const double> positions, double circumference) {
  check_positions(positions, circumference);
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
  return spacings_in_order(positions, std::move(order), circumference);
}

SpacingSample spacings(const FleetSnapshot& snapshot, const RingRoute& route) {
  const std::vector<double> positions = snapshot.positions();
  check_positions(positions, route.circumference());
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (positions[a] != positions[b]) return positions[a] < positions[b];
    return snapshot.buses[a].bus_id < snapshot.buses[b].bus_id;
  });
  return spacings_in_order(positions, std::move(order), route.circumference());
}

FleetSnapshot advance(const FleetSnapshot& snapshot, const RingRoute& route,
                      std::span<const double> displacements) {
  if (displacements.size() != snapshot.size()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(snapshot.size()) +
                                                  " displacements, got " + std::to_string(displacements.size()));
  }
  FleetSnapshot out = snapshot;
  for (std::size_t i = 0; i < out.buses.size(); ++i) {
    out.buses[i].position = wrap_position(out.buses[i].position + displacements[i], route.circumference());
  }
  return out;
}

}  // namespace ringchaos
