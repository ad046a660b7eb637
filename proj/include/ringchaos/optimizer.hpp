#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ringchaos/dyson_gas.hpp"
#include "ringchaos/ring_model.hpp"
#include "ringchaos/spectral_statistics.hpp"

namespace ringchaos {

// KS distance of the normalized ring spacings to a target law.
struct SpacingKS {
  EnsembleKind target = EnsembleKind::gue();
};
// |mean r of the ring spacings - target_r|.
struct RRatio {
  double target_r = kGueMeanR;
};
// KS distance of the unfolded fleet-Hamiltonian spectrum to a target law.
struct SpectralKS {
  HamiltonianSpec spec;
  EnsembleKind target = EnsembleKind::gue();
};

struct Objective {
  std::variant<SpacingKS, RRatio, SpectralKS> criterion = SpacingKS{};
  double epsilon = 0.1;
};

// Throws DomainError for epsilon <= 0 or target_r outside (0, 1).
void validate(const Objective& objective);
double evaluate_objective(const Objective& objective, const FleetSnapshot& snapshot, const RingRoute& route);

struct DisplacementPlan {
  std::vector<double> deltas;  // meters, snapshot order
  double objective_before = 0.0;
  double objective_after = 0.0;
  std::size_t iterations_used = 0;
  bool clamped = false;        // some delta hit +-max_shift
  std::size_t rotation = 0;    // matching only: chosen cyclic offset
};

// Sorted positions drawn from the target law on the route's ring.
std::vector<double> target_configuration(const FleetSnapshot& snapshot, const RingRoute& route,
                                         const EnsembleKind& target, std::uint64_t seed,
                                         std::size_t gas_sweeps = 2000);

/// Order-preserving cyclic assignment of sorted `current` onto sorted
/// `target`: the rotation minimizing the sum of ring-shortest |delta| wins,
/// smallest rotation index on ties. Deltas are in `current` order.
DisplacementPlan displacement_plan_matching(std::span<const double> current, std::span<const double> target,
                                            double circumference, double max_shift);

// Sample a target configuration, match it to the fleet and evaluate the
// objective before and after. Falls back to a zero plan when the matched
// plan does not improve the objective.
DisplacementPlan plan_by_matching(const FleetSnapshot& snapshot, const RingRoute& route, const Objective& objective,
                                  const EnsembleKind& target, double max_shift, std::uint64_t seed,
                                  std::size_t gas_sweeps = 2000);

struct TemperatureSchedule {
  std::optional<double> initial;  // defaults to the starting objective value
  double ratio = 0.995;           // per iteration
};

/// Simulated annealing over displacement vectors.
///
/// Each iteration perturbs one delta by U(-step, step), clipped to
/// [-max_shift, max_shift]; step defaults to max_shift. The best visited
/// plan is returned, and the search stops as soon as it reaches epsilon.
DisplacementPlan local_search_optimize(const FleetSnapshot& snapshot, const RingRoute& route,
                                       const Objective& objective, double max_shift, std::size_t iterations,
                                       const TemperatureSchedule& schedule, std::uint64_t seed,
                                       std::optional<double> step = std::nullopt);

struct ScheduleEntry {
  std::string bus_id;
  std::size_t stop_index = 0;
  double stop_duration = 0.0;  // seconds
  double carryover = 0.0;      // signed meters deferred to later stops
  double requested = 0.0;      // delta asked of this stop
  double achieved = 0.0;       // (mean_stop_time - stop_duration) * velocity
};

struct Schedule {
  std::vector<ScheduleEntry> entries;
};

struct DwellDecision {
  double duration = 0.0;
  double achieved = 0.0;
  double carryover = 0.0;
};

// t = <t_s> - delta / v, clamped to [min_stop_time, max_stop_time]; the
// unrealized part of delta becomes carryover.
DwellDecision dwell_for_shift(double delta, const Stop& stop, double velocity);

Schedule schedule_from_displacements(const DisplacementPlan& plan, const FleetSnapshot& snapshot,
                                     const RingRoute& route);

// Kinematic forward simulation: buses move at segment speed, dwell per
// schedule at their next stop, then keep reconciling carryover at later
// stops and dwell <t_s> otherwise.
FleetSnapshot simulate_round(const FleetSnapshot& snapshot, const RingRoute& route, const Schedule& schedule,
                             double horizon);

}  // namespace ringchaos
