#include "ringchaos/dyson_gas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ringchaos/rng.hpp"

namespace ringchaos {
namespace {

constexpr double kPi = std::numbers::pi;

void check_circular(const GasConfiguration& config) {
  if (!config.circular()) throw Error(ErrorKind::DomainError, "configuration has no circumference");
  const double L = *config.circumference;
  if (!(L > 0.0)) throw Error(ErrorKind::DomainError, "circumference must be positive");
  for (double x : config.positions) {
    if (!(x >= 0.0 && x < L)) throw Error(ErrorKind::InvalidPosition, "position outside [0, circumference)");
  }
}

double per_bus(const std::vector<double>& values, std::size_t i, double fallback) {
  if (values.empty()) return fallback;
  return values.size() == 1 ? values[0] : values[i];
}

// Least-squares polynomial fit y ~ sum_k c_k t^k via Householder QR.
std::vector<double> polyfit(std::span<const double> t, std::span<const double> y, int degree) {
  const std::size_t rows = t.size();
  const auto cols = static_cast<std::size_t>(degree + 1);
  std::vector<double> a(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double p = 1.0;
    for (std::size_t k = 0; k < cols; ++k) {
      a[i * cols + k] = p;
      p *= t[i];
    }
  }
  std::vector<double> b(y.begin(), y.end());
  for (std::size_t k = 0; k < cols; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += a[i * cols + k] * a[i * cols + k];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = a[k * cols + k] > 0 ? -norm : norm;
    std::vector<double> v(rows - k);
    for (std::size_t i = k; i < rows; ++i) v[i - k] = a[i * cols + k];
    v[0] -= alpha;
    double vv = 0.0;
    for (double x : v) vv += x * x;
    if (vv == 0.0) continue;
    for (std::size_t j = k; j < cols; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * a[i * cols + j];
      const double f = 2.0 * dot / vv;
      for (std::size_t i = k; i < rows; ++i) a[i * cols + j] -= f * v[i - k];
    }
    double dot = 0.0;
    for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * b[i];
    const double f = 2.0 * dot / vv;
    for (std::size_t i = k; i < rows; ++i) b[i] -= f * v[i - k];
  }
  std::vector<double> c(cols, 0.0);
  for (std::size_t kk = cols; kk-- > 0;) {
    double s = b[kk];
    for (std::size_t j = kk + 1; j < cols; ++j) s -= a[kk * cols + j] * c[j];
    const double diag = a[kk * cols + kk];
    c[kk] = diag != 0.0 ? s / diag : 0.0;
  }
  return c;
}

}  // namespace

double ring_distance(double a, double b, double circumference, DistanceMode mode) noexcept {
  const double delta = std::abs(a - b);
  if (mode == DistanceMode::Arc) return std::min(delta, circumference - delta);
  return circumference / kPi * std::abs(std::sin(kPi * delta / circumference));
}

double confined_log_gas_energy(const GasConfiguration& config) {
  if (config.circular()) throw Error(ErrorKind::DomainError, "confined energy needs a line configuration");
  const auto& x = config.positions;
  double energy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    energy += 0.5 * x[i] * x[i];
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = std::abs(x[i] - x[j]);
      if (d == 0.0) throw Error(ErrorKind::SingularConfiguration, "coincident particles");
      energy -= std::log(d);
    }
  }
  return energy;
}

double circular_log_gas_energy(const GasConfiguration& config, DistanceMode mode) {
  check_circular(config);
  const double L = *config.circumference;
  const auto& x = config.positions;
  double energy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = ring_distance(x[i], x[j], L, mode);
      if (!(d > 0.0)) throw Error(ErrorKind::SingularConfiguration, "coincident particles");
      energy -= std::log(d);
    }
  }
  return energy;
}

GasSample sample_circular_gas(std::size_t n, double circumference, double beta, std::size_t sweeps,
                              std::uint64_t seed, DistanceMode mode) {
  if (n < 2) throw Error(ErrorKind::InsufficientFleet, "gas needs at least 2 particles");
  if (sweeps < 1) throw Error(ErrorKind::UsageError, "sweeps must be at least 1");
  if (!(circumference > 0.0)) throw Error(ErrorKind::DomainError, "circumference must be positive");
  if (!(beta > 0.0)) throw Error(ErrorKind::DomainError, "beta must be positive");

  Rng rng(seed, "dyson_gas.circular");
  const double L = circumference;
  const double to_angle = 2.0 * kPi / L;

  std::vector<double> x(n);
  for (auto& xi : x) xi = rng.uniform(0.0, L);
  // Chord distances are |z_a - z_b| up to a constant factor.
  std::vector<Complex> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::polar(1.0, to_angle * x[i]);

  // log prod_j d(new, x_j) / d(old, x_j), blocked to bound over/underflow.
  auto log_ratio = [&](std::size_t k, double x_new, const Complex& z_new) {
    double total = 0.0;
    if (mode == DistanceMode::Arc) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        total += std::log(ring_distance(x_new, x[j], L, mode)) - std::log(ring_distance(x[k], x[j], L, mode));
      }
      return total;
    }
    double block = 1.0;
    int in_block = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      block *= std::norm(z_new - z[j]) / std::norm(z[k] - z[j]);
      if (++in_block == 8) {
        total += std::log(block);
        block = 1.0;
        in_block = 0;
      }
    }
    total += std::log(block);
    return 0.5 * total;
  };

  const std::size_t burn_in = sweeps / 5;
  double h = std::min(0.5 * L, L / static_cast<double>(n));
  const double h_min = 1e-12 * L;
  std::size_t accepted_after = 0;
  std::size_t proposed_after = 0;

  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    std::size_t accepted = 0;
    for (std::size_t move = 0; move < n; ++move) {
      const auto k = static_cast<std::size_t>(rng.below(n));
      const double x_new = wrap_position(x[k] + rng.uniform(-h, h), L);
      const Complex z_new = std::polar(1.0, to_angle * x_new);
      // Delta V = -log_ratio; accept with probability min(1, exp(-beta dV)).
      const double log_accept = beta * log_ratio(k, x_new, z_new);
      const double u = rng.uniform();
      if (std::isfinite(log_accept) && (log_accept >= 0.0 || std::log(u) < log_accept)) {
        x[k] = x_new;
        z[k] = z_new;
        ++accepted;
      }
    }
    if (sweep < burn_in) {
      const double rate = static_cast<double>(accepted) / static_cast<double>(n);
      h = std::clamp(h * std::exp(rate - 0.5), h_min, 0.5 * L);
    } else {
      accepted_after += accepted;
      proposed_after += n;
    }
  }

  std::sort(x.begin(), x.end());
  GasSample out;
  out.configuration.positions = std::move(x);
  out.configuration.circumference = L;
  out.step = h;
  out.acceptance_rate =
      proposed_after > 0 ? static_cast<double>(accepted_after) / static_cast<double>(proposed_after) : 0.0;
  return out;
}

double potential(const PotentialKernel& kernel, double distance) {
  if (const auto* inv = std::get_if<InversePower>(&kernel)) return std::pow(distance, -inv->exponent);
  return -std::log(distance);
}

HermitianMatrix build_hamiltonian(const FleetSnapshot& snapshot, const RingRoute& route,
                                  const HamiltonianSpec& spec, Warnings* warnings) {
  const std::size_t n = snapshot.size();
  if (n < 2) throw Error(ErrorKind::InsufficientFleet, "Hamiltonian needs at least 2 buses");
  validate(snapshot, route);
  for (const auto* list : {&spec.masses, &spec.velocities, &spec.lengths}) {
    if (list->size() > 1 && list->size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "per-bus list has " + std::to_string(list->size()) +
                                                    " entries for " + std::to_string(n) + " buses");
    }
  }
  if (const auto* inv = std::get_if<InversePower>(&spec.potential); inv && !(inv->exponent > 0.0)) {
    throw Error(ErrorKind::ConfigError, "inverse-power exponent must be positive");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(per_bus(spec.masses, i, 1.0) > 0.0)) throw Error(ErrorKind::ConfigError, "masses must be positive");
    if (!(per_bus(spec.lengths, i, 0.0) >= 0.0)) throw Error(ErrorKind::ConfigError, "lengths must be >= 0");
  }

  const double L = route.circumference();
  HermitianMatrix m = HermitianMatrix::zeros(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = per_bus(spec.velocities, i, 0.0);
    m.set(i, i, 0.5 * per_bus(spec.masses, i, 1.0) * v * v);
  }

  std::size_t clamped = 0;
  auto couple = [&](std::size_t i, std::size_t j) {
    const double d = ring_distance(snapshot.buses[i].position, snapshot.buses[j].position, L, spec.distance_mode);
    double eff = d - 0.5 * (per_bus(spec.lengths, i, 0.0) + per_bus(spec.lengths, j, 0.0));
    if (eff < kDistanceFloor) {
      eff = kDistanceFloor;
      ++clamped;
    }
    m.set(i, j, spec.coupling * potential(spec.potential, eff));
  };

  if (spec.neighbor_only) {
    const SpacingSample ring = spacings(snapshot, route);
    if (n == 2) {
      couple(ring.order[0], ring.order[1]);
    } else {
      for (std::size_t k = 0; k < n; ++k) couple(ring.order[k], ring.order[(k + 1) % n]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) couple(i, j);
    }
  }
  if (clamped > 0 && warnings) {
    warnings->push_back("ClampedDistance: " + std::to_string(clamped) + " pair distances raised to the 0.1 m floor");
  }
  return m;
}

Spectrum unfold(const Spectrum& spectrum, UnfoldMethod method) {
  const auto& levels = spectrum.eigenvalues;
  const std::size_t n = levels.size();
  Spectrum out = spectrum;
  std::vector<double> gaps;

  if (method.kind == UnfoldMethod::Kind::GlobalMean) {
    if (n < 2) throw Error(ErrorKind::InsufficientData, "unfolding needs at least 2 levels");
    gaps.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = levels[i + 1] - levels[i];
  } else {
    if (method.degree < 0) throw Error(ErrorKind::DomainError, "polynomial degree must be >= 0");
    if (n < static_cast<std::size_t>(method.degree) + 2) {
      throw Error(ErrorKind::InsufficientData, "polynomial unfolding of degree " + std::to_string(method.degree) +
                                                   " needs at least " + std::to_string(method.degree + 2) +
                                                   " levels");
    }
    const double lo = levels.front(), hi = levels.back();
    if (!(hi > lo)) throw Error(ErrorKind::InsufficientData, "spectrum is fully degenerate");
    std::vector<double> t(n), staircase(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = (2.0 * levels[i] - (hi + lo)) / (hi - lo);
      staircase[i] = static_cast<double>(i + 1);
    }
    const std::vector<double> c = polyfit(t, staircase, method.degree);
    std::vector<double> mapped(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * t[i] + c[k];
      mapped[i] = acc;
    }
    gaps.resize(n - 1);
    // A non-monotone fit near the spectrum edges can produce negative gaps.
    for (std::size_t i = 0; i + 1 < n; ++i) gaps[i] = std::max(0.0, mapped[i + 1] - mapped[i]);
  }

  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
  if (!(mean > 0.0)) throw Error(ErrorKind::InsufficientData, "spectrum is fully degenerate");
  for (double& g : gaps) g /= mean;
  out.unfolded_spacings = std::move(gaps);
  return out;
}

}  // namespace ringchaos
