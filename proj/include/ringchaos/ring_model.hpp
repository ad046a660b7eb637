#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ringchaos {

struct Stop {
  double arc_position = 0.0;    // meters, [0, circumference)
  double mean_stop_time = 0.0;  // seconds
  double max_stop_time = 0.0;   // seconds
  double min_stop_time = 0.0;   // seconds
};

/// A closed bus route parameterized by arc length.
///
/// Segment k runs from stop k to stop k+1 (cyclically) and carries
/// segment_velocities[k]. A route without stops has a single velocity for
/// the whole ring.
class RingRoute {
 public:
  RingRoute(double circumference, std::vector<Stop> stops, std::vector<double> segment_velocities);

  double circumference() const noexcept { return circumference_; }
  const std::vector<Stop>& stops() const noexcept { return stops_; }
  const std::vector<double>& segment_velocities() const noexcept { return velocities_; }

  // First stop at or ahead of `position` in ring order. Requires stops.
  std::size_t next_stop(double position) const;

  // Segment the bus at `position` is currently traversing, i.e. the segment
  // that ends at next_stop(position).
  std::size_t segment_index(double position) const;
  double velocity_at(double position) const;

  // Forward (counter-clockwise) distance from a to b in [0, circumference).
  double forward_distance(double from, double to) const noexcept;

 private:
  double circumference_;
  std::vector<Stop> stops_;
  std::vector<double> velocities_;
};

struct BusPosition {
  std::string bus_id;
  double position = 0.0;  // arc-length meters
};

struct FleetSnapshot {
  double time = 0.0;  // seconds since epoch
  std::vector<BusPosition> buses;

  std::size_t size() const noexcept { return buses.size(); }
  std::vector<double> positions() const;
};

// Throws InvalidPosition or ConfigError on violated invariants.
void validate(const FleetSnapshot& snapshot, const RingRoute& route);

struct SpacingSample {
  std::vector<double> raw;         // meters, ring order
  std::vector<double> normalized;  // raw / mean_spacing
  double mean_spacing = 0.0;
  std::vector<std::size_t> order;  // snapshot indices sorted around the ring
};

SpacingSample spacings(const FleetSnapshot& snapshot, const RingRoute& route);
SpacingSample spacings(std::span<const double> positions, double circumference);

FleetSnapshot advance(const FleetSnapshot& snapshot, const RingRoute& route,
                      std::span<const double> displacements);

// Canonical representative of x in [0, circumference).
double wrap_position(double x, double circumference) noexcept;

// Signed shortest displacement from `from` to `to`, in (-L/2, L/2].
double ring_difference(double from, double to, double circumference) noexcept;

}  // namespace ringchaos
