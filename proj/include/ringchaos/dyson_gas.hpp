#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ringchaos/errors.hpp"
#include "ringchaos/hermitian.hpp"
#include "ringchaos/ring_model.hpp"

namespace ringchaos {

enum class DistanceMode { Chord, Arc };

/// Particle positions of a log-gas: line coordinates for the confined gas,
/// arc length for the circular gas (circumference present).
struct GasConfiguration {
  std::vector<double> positions;
  std::optional<double> circumference;

  bool circular() const noexcept { return circumference.has_value(); }
};

// Chord: (L/pi)|sin(pi (a-b)/L)|. Arc: min(|a-b|, L-|a-b|).
double ring_distance(double a, double b, double circumference, DistanceMode mode) noexcept;

// V = -sum_{i<j} log|x_i - x_j| + 1/2 sum_i x_i^2
double confined_log_gas_energy(const GasConfiguration& config);

// V = -sum_{i<j} log d(x_i, x_j)
double circular_log_gas_energy(const GasConfiguration& config, DistanceMode mode = DistanceMode::Chord);

struct GasSample {
  GasConfiguration configuration;  // positions sorted ascending
  double step = 0.0;               // proposal half-width after burn-in
  double acceptance_rate = 0.0;    // measured after burn-in
};

/// Metropolis sampler for the circular log-gas with density exp(-beta V).
///
/// One sweep is n single-particle moves x -> x + U(-h, h) mod L. During the
/// first 20% of sweeps h is tuned multiplicatively toward 50% acceptance;
/// afterwards it is frozen so the chain is reversible.
GasSample sample_circular_gas(std::size_t n, double circumference, double beta, std::size_t sweeps,
                              std::uint64_t seed, DistanceMode mode = DistanceMode::Chord);

struct InversePower {
  double exponent = 2.0;
};
struct LogGas {};
using PotentialKernel = std::variant<InversePower, LogGas>;

double potential(const PotentialKernel& kernel, double distance);

/// Encoding of the fleet Hamiltonian as a dense symmetric matrix.
///
/// Per-bus lists may be empty (default), hold one value (broadcast), or hold
/// one value per bus in snapshot order.
struct HamiltonianSpec {
  PotentialKernel potential = InversePower{2.0};
  std::vector<double> masses;      // kg, default 1
  std::vector<double> velocities;  // m/s, default 0
  std::vector<double> lengths;     // m, default 0
  double coupling = 1.0;
  DistanceMode distance_mode = DistanceMode::Chord;
  bool neighbor_only = false;
};

inline constexpr double kDistanceFloor = 0.1;  // meters

/// M(i,i) = m_i v_i^2 / 2 and, for coupled pairs,
/// M(i,j) = coupling * V(max(d_ij - (l_i + l_j)/2, d_floor)).
/// Clamped pairs are reported through `warnings` when given.
HermitianMatrix build_hamiltonian(const FleetSnapshot& snapshot, const RingRoute& route,
                                  const HamiltonianSpec& spec, Warnings* warnings = nullptr);

struct UnfoldMethod {
  enum class Kind { GlobalMean, Polynomial };
  Kind kind = Kind::Polynomial;
  int degree = 5;

  static UnfoldMethod global_mean() { return {Kind::GlobalMean, 0}; }
  static UnfoldMethod polynomial(int degree = 5) { return {Kind::Polynomial, degree}; }
};

// Returns a copy of `spectrum` with unfolded_spacings set (mean 1).
Spectrum unfold(const Spectrum& spectrum, UnfoldMethod method);

}  // namespace ringchaos
