#include "ringchaos/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "ringchaos/errors.hpp"
#include "ringchaos/hermitian.hpp"
#include "ringchaos/rng.hpp"

namespace ringchaos {
namespace {

FleetSnapshot shifted(const FleetSnapshot& snapshot, const RingRoute& route, std::span<const double> deltas) {
  return advance(snapshot, route, deltas);
}

}  // namespace

void validate(const Objective& objective) {
  if (!(objective.epsilon > 0.0)) throw Error(ErrorKind::DomainError, "objective epsilon must be positive");
  if (const auto* r = std::get_if<RRatio>(&objective.criterion)) {
    if (!(r->target_r > 0.0 && r->target_r < 1.0)) {
      throw Error(ErrorKind::DomainError, "target r must lie in (0, 1)");
    }
  }
}

double evaluate_objective(const Objective& objective, const FleetSnapshot& snapshot, const RingRoute& route) {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SpacingKS>) {
          return ks_distance(spacings(snapshot, route).normalized, c.target);
        } else if constexpr (std::is_same_v<T, RRatio>) {
          return std::abs(mean_r(spacings(snapshot, route).normalized) - c.target_r);
        } else {
          const HermitianMatrix h = build_hamiltonian(snapshot, route, c.spec);
          const Spectrum spectrum = eigenvalues(h);
          const UnfoldMethod method =
              spectrum.size() >= 7 ? UnfoldMethod::polynomial(5) : UnfoldMethod::global_mean();
          const Spectrum unfolded = unfold(spectrum, method);
          return ks_distance(*unfolded.unfolded_spacings, c.target);
        }
      },
      objective.criterion);
}

std::vector<double> target_configuration(const FleetSnapshot& snapshot, const RingRoute& route,
                                         const EnsembleKind& target, std::uint64_t seed, std::size_t gas_sweeps) {
  const std::size_t n = snapshot.size();
  if (n < 2) throw Error(ErrorKind::InsufficientFleet, "target configuration needs at least 2 buses");
  const double L = route.circumference();
  std::vector<double> out;

  switch (target.family()) {
    case EnsembleKind::Family::WignerDyson: {
      const GasSample gas = sample_circular_gas(n, L, static_cast<double>(target.beta()), gas_sweeps,
                                                derive_seed(seed, "optimizer.target.gas"));
      out = gas.configuration.positions;
      break;
    }
    case EnsembleKind::Family::Poisson: {
      Rng rng(seed, "optimizer.target.poisson");
      out.resize(n);
      for (double& x : out) x = rng.uniform(0.0, L);
      break;
    }
    case EnsembleKind::Family::Brody: {
      Rng rng(seed, "optimizer.target.brody");
      const std::vector<double> s = sample_spacings(target, n, rng);
      const double total = std::accumulate(s.begin(), s.end(), 0.0);
      const SpacingSample current = spacings(snapshot, route);
      double x = snapshot.buses[current.order.front()].position;
      out.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = wrap_position(x, L);
        x += s[i] * L / total;
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DisplacementPlan displacement_plan_matching(std::span<const double> current, std::span<const double> target,
                                            double circumference, double max_shift) {
  if (current.size() != target.size()) {
    throw Error(ErrorKind::DimensionMismatch, "current and target configurations differ in size");
  }
  if (!(max_shift >= 0.0)) throw Error(ErrorKind::DomainError, "max_shift must be non-negative");
  const std::size_t n = current.size();
  DisplacementPlan plan;
  plan.deltas.assign(n, 0.0);
  if (n == 0) return plan;

  double best_cost = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) cost += std::abs(ring_difference(current[i], target[(i + r) % n], circumference));
    if (r == 0 || cost < best_cost) {
      best_cost = cost;
      plan.rotation = r;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ring_difference(current[i], target[(i + plan.rotation) % n], circumference);
    const double c = std::clamp(d, -max_shift, max_shift);
    if (c != d) plan.clamped = true;
    plan.deltas[i] = c;
  }
  return plan;
}

DisplacementPlan plan_by_matching(const FleetSnapshot& snapshot, const RingRoute& route, const Objective& objective,
                                  const EnsembleKind& target, double max_shift, std::uint64_t seed,
                                  std::size_t gas_sweeps) {
  validate(objective);
  const SpacingSample ring = spacings(snapshot, route);
  std::vector<double> current(snapshot.size());
  for (std::size_t k = 0; k < current.size(); ++k) current[k] = snapshot.buses[ring.order[k]].position;
  const std::vector<double> goal = target_configuration(snapshot, route, target, seed, gas_sweeps);

  DisplacementPlan sorted_plan = displacement_plan_matching(current, goal, route.circumference(), max_shift);
  DisplacementPlan plan = sorted_plan;
  for (std::size_t k = 0; k < current.size(); ++k) plan.deltas[ring.order[k]] = sorted_plan.deltas[k];

  plan.iterations_used = 1;
  plan.objective_before = evaluate_objective(objective, snapshot, route);
  plan.objective_after = evaluate_objective(objective, shifted(snapshot, route, plan.deltas), route);
  if (plan.objective_after >= plan.objective_before) {
    plan.deltas.assign(snapshot.size(), 0.0);
    plan.objective_after = plan.objective_before;
    plan.clamped = false;
  }
  return plan;
}

DisplacementPlan local_search_optimize(const FleetSnapshot& snapshot, const RingRoute& route,
                                       const Objective& objective, double max_shift, std::size_t iterations,
                                       const TemperatureSchedule& schedule, std::uint64_t seed,
                                       std::optional<double> step) {
  validate(objective);
  if (iterations < 1) throw Error(ErrorKind::UsageError, "iterations must be at least 1");
  if (!(max_shift > 0.0)) throw Error(ErrorKind::DomainError, "max_shift must be positive");
  if (!(schedule.ratio > 0.0 && schedule.ratio <= 1.0)) {
    throw Error(ErrorKind::DomainError, "temperature ratio must lie in (0, 1]");
  }
  const std::size_t n = snapshot.size();
  const double width = step.value_or(max_shift);

  DisplacementPlan plan;
  plan.deltas.assign(n, 0.0);
  plan.objective_before = evaluate_objective(objective, snapshot, route);
  plan.objective_after = plan.objective_before;
  if (plan.objective_before <= objective.epsilon) return plan;

  Rng rng(seed, "optimizer.anneal");
  std::vector<double> deltas(n, 0.0);
  FleetSnapshot state = snapshot;
  double current = plan.objective_before;
  double temperature = schedule.initial.value_or(plan.objective_before);

  for (std::size_t it = 1; it <= iterations; ++it) {
    const auto i = static_cast<std::size_t>(rng.below(n));
    const double old_delta = deltas[i];
    const double proposal = std::clamp(old_delta + rng.uniform(-width, width), -max_shift, max_shift);
    state.buses[i].position = wrap_position(snapshot.buses[i].position + proposal, route.circumference());
    const double value = evaluate_objective(objective, state, route);
    const double u = rng.uniform();
    const bool accept = value <= current || (temperature > 0.0 && u < std::exp(-(value - current) / temperature));
    if (accept) {
      deltas[i] = proposal;
      current = value;
      if (value < plan.objective_after) {
        plan.objective_after = value;
        plan.deltas = deltas;
      }
    } else {
      state.buses[i].position = wrap_position(snapshot.buses[i].position + old_delta, route.circumference());
    }
    temperature *= schedule.ratio;
    plan.iterations_used = it;
    if (plan.objective_after <= objective.epsilon) break;
  }
  for (double d : plan.deltas) {
    if (std::abs(d) >= max_shift) plan.clamped = true;
  }
  return plan;
}

DwellDecision dwell_for_shift(double delta, const Stop& stop, double velocity) {
  // Positive delta: the bus must advance, so it dwells less.
  const double t = stop.mean_stop_time - delta / velocity;
  DwellDecision d;
  if (t > stop.max_stop_time) {
    d.duration = stop.max_stop_time;
  } else if (t < stop.min_stop_time) {
    d.duration = stop.min_stop_time;
  } else {
    d.duration = t;
    d.achieved = delta;
    d.carryover = 0.0;
    return d;
  }
  d.achieved = (stop.mean_stop_time - d.duration) * velocity;
  d.carryover = delta - d.achieved;
  return d;
}

Schedule schedule_from_displacements(const DisplacementPlan& plan, const FleetSnapshot& snapshot,
                                     const RingRoute& route) {
  if (plan.deltas.size() != snapshot.size()) {
    throw Error(ErrorKind::DimensionMismatch, "plan has " + std::to_string(plan.deltas.size()) +
                                                  " deltas for " + std::to_string(snapshot.size()) + " buses");
  }
  if (route.stops().empty()) throw Error(ErrorKind::ConfigError, "route has no stops to schedule");
  validate(snapshot, route);
  Schedule schedule;
  schedule.entries.reserve(snapshot.size());
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    const double x = snapshot.buses[i].position;
    const std::size_t stop_index = route.next_stop(x);
    const double v = route.velocity_at(x);
    const DwellDecision d = dwell_for_shift(plan.deltas[i], route.stops()[stop_index], v);
    schedule.entries.push_back({snapshot.buses[i].bus_id, stop_index, d.duration, d.carryover, plan.deltas[i],
                                d.achieved});
  }
  return schedule;
}

FleetSnapshot simulate_round(const FleetSnapshot& snapshot, const RingRoute& route, const Schedule& schedule,
                             double horizon) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::DomainError, "horizon must be positive");
  validate(snapshot, route);
  const double L = route.circumference();
  const auto& stops = route.stops();
  const auto& velocities = route.segment_velocities();

  std::map<std::string, const ScheduleEntry*> by_bus;
  for (const auto& e : schedule.entries) by_bus[e.bus_id] = &e;

  FleetSnapshot out = snapshot;
  out.time = snapshot.time + horizon;
  for (auto& bus : out.buses) {
    double x = bus.position;
    double remaining = horizon;
    if (stops.empty()) {
      bus.position = wrap_position(x + velocities[0] * remaining, L);
      continue;
    }
    const auto found = by_bus.find(bus.bus_id);
    const ScheduleEntry* entry = found == by_bus.end() ? nullptr : found->second;
    double carry = 0.0;
    std::size_t next = route.next_stop(x);
    bool departed = false;

    while (remaining > 0.0) {
      const std::size_t segment = next == 0 ? stops.size() - 1 : next - 1;
      const double v = velocities[segment];
      double distance = route.forward_distance(x, stops[next].arc_position);
      if (distance == 0.0 && departed) distance = L;  // single-stop ring
      const double travel = distance / v;
      if (travel >= remaining) {
        x += v * remaining;
        break;
      }
      remaining -= travel;
      x = stops[next].arc_position;

      double dwell;
      if (entry && entry->stop_index == next) {
        dwell = entry->stop_duration;
        carry = entry->carryover;
        entry = nullptr;
      } else if (carry != 0.0) {
        const DwellDecision d = dwell_for_shift(carry, stops[next], v);
        dwell = d.duration;
        carry = d.carryover;
      } else {
        dwell = stops[next].mean_stop_time;
      }
      if (dwell >= remaining) break;
      remaining -= dwell;
      next = (next + 1) % stops.size();
      departed = true;
    }
    bus.position = wrap_position(x, L);
  }
  return out;
}

}  // namespace ringchaos
