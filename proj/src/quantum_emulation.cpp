#include "ringchaos/quantum_emulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "ringchaos/errors.hpp"
#include "ringchaos/rng.hpp"

namespace ringchaos {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return s;
}

// Number of successes in `shots` Bernoulli(p) trials.
std::uint64_t binomial(Rng& rng, std::uint64_t shots, double p) {
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < shots; ++i) {
    if (rng.uniform() < p) ++k;
  }
  return k;
}

}  // namespace

StateVector::StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.empty()) throw Error(ErrorKind::DomainError, "state vector must have positive dimension");
  if (std::abs(norm2(amps_) - 1.0) > 1e-10) throw Error(ErrorKind::DomainError, "state vector is not normalized");
}

StateVector StateVector::basis(std::size_t dimension, std::size_t index) {
  if (index >= dimension) throw Error(ErrorKind::DimensionMismatch, "basis index out of range");
  std::vector<Complex> a(dimension, Complex(0.0));
  a[index] = 1.0;
  return StateVector(std::move(a));
}

StateVector StateVector::uniform(std::size_t dimension) {
  if (dimension == 0) throw Error(ErrorKind::DomainError, "state vector must have positive dimension");
  return StateVector(std::vector<Complex>(dimension, Complex(1.0 / std::sqrt(static_cast<double>(dimension)))));
}

StateVector StateVector::normalized(std::vector<Complex> amplitudes) {
  const double n = std::sqrt(norm2(amplitudes));
  if (!(n > 0.0)) throw Error(ErrorKind::DomainError, "cannot normalize the zero vector");
  for (auto& z : amplitudes) z /= n;
  return StateVector(std::move(amplitudes));
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.dimension() != dimension()) throw Error(ErrorKind::DimensionMismatch, "state dimensions differ");
  Complex acc = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) acc += std::conj(amps_[i]) * other.amps_[i];
  return acc;
}

Propagator::Propagator(const HermitianMatrix& h) : spectrum_(eigenvalues(h)) {}

Propagator::Propagator(Spectrum spectrum) : spectrum_(std::move(spectrum)) {
  if (!spectrum_.has_vectors()) throw Error(ErrorKind::DomainError, "propagator needs eigenvectors");
}

void Propagator::check(const StateVector& psi) const {
  if (psi.dimension() != dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "state has dimension " + std::to_string(psi.dimension()) +
                                                  ", Hamiltonian " + std::to_string(dimension()));
  }
}

std::vector<double> Propagator::weights(const StateVector& psi) const {
  const std::size_t n = dimension();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = spectrum_.vector(k);
    Complex c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += std::conj(v[i]) * psi[i];
    w[k] = std::norm(c);
  }
  return w;
}

StateVector Propagator::evolve(double t, const StateVector& psi) const {
  check(psi);
  const std::size_t n = dimension();
  std::vector<Complex> out(n, Complex(0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = spectrum_.vector(k);
    Complex c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += std::conj(v[i]) * psi[i];
    c *= std::polar(1.0, -spectrum_.eigenvalues[k] * t);
    for (std::size_t i = 0; i < n; ++i) out[i] += c * v[i];
  }
  return StateVector(std::move(out));
}

Complex Propagator::overlap(double t, const StateVector& psi) const {
  check(psi);
  const std::vector<double> w = weights(psi);
  Complex acc = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k] * std::polar(1.0, -spectrum_.eigenvalues[k] * t);
    total += w[k];
  }
  // Dividing by the captured weight removes rounding drift in the basis.
  return acc / total;
}

double Propagator::survival_probability(double t, const StateVector& psi) const {
  return std::clamp(std::norm(overlap(t, psi)), 0.0, 1.0);
}

std::vector<double> Propagator::survival_curve(std::span<const double> times, const StateVector& psi) const {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(survival_probability(t, psi));
  return out;
}

HadamardEstimate Propagator::hadamard_test_exact(double t, const StateVector& psi) const {
  const Complex z = overlap(t, psi);
  return {z.real(), z.imag()};
}

HadamardEstimate Propagator::hadamard_test(double t, const StateVector& psi, std::uint64_t shots,
                                           std::uint64_t seed) const {
  if (shots == 0) throw Error(ErrorKind::EmptyRequest, "Hadamard test needs at least one shot");
  const HadamardEstimate exact = hadamard_test_exact(t, psi);
  Rng rng(seed, "quantum.hadamard");
  // Ancilla reads 0 with probability (1 + Re)/2, or (1 + Im)/2 with the
  // phase-shifted control.
  const double n = static_cast<double>(shots);
  const double p_re = std::clamp(0.5 * (1.0 + exact.re), 0.0, 1.0);
  const double p_im = std::clamp(0.5 * (1.0 + exact.im), 0.0, 1.0);
  HadamardEstimate est;
  est.re = 2.0 * static_cast<double>(binomial(rng, shots, p_re)) / n - 1.0;
  est.im = 2.0 * static_cast<double>(binomial(rng, shots, p_im)) / n - 1.0;
  return est;
}

std::vector<double> Propagator::qpe_distribution(double t, const StateVector& psi, int n_ancilla) const {
  if (n_ancilla < 1 || n_ancilla > 20) {
    throw Error(ErrorKind::Unsupported, "n_ancilla must lie in [1, 20], got " + std::to_string(n_ancilla));
  }
  check(psi);
  const std::size_t grid = std::size_t{1} << n_ancilla;
  const double m_grid = static_cast<double>(grid);
  const std::vector<double> w = weights(psi);
  std::vector<double> dist(grid, 0.0);
  double captured = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] < 1e-15) continue;
    captured += w[k];
    double theta = std::fmod(spectrum_.eigenvalues[k] * t / kTwoPi, 1.0);
    if (theta < 0.0) theta += 1.0;
    const double x = theta * m_grid;  // phase in grid units
    const double nearest = std::round(x);
    if (std::abs(x - nearest) <= 1e-9) {
      dist[static_cast<std::size_t>(nearest) % grid] += w[k];
      continue;
    }
    const double sin_x = std::sin(std::numbers::pi * (x - nearest));
    for (std::size_t m = 0; m < grid; ++m) {
      // sin(pi (x - m)) = (-1)^(m - nearest) sin(pi (x - nearest)); squared below.
      const double denom = m_grid * std::sin(std::numbers::pi * (x - static_cast<double>(m)) / m_grid);
      const double amp = sin_x / denom;
      dist[m] += w[k] * amp * amp;
    }
  }
  if (captured > 0.0) {
    for (double& p : dist) p /= captured;
  }
  return dist;
}

QpeResult Propagator::qpe(double t, const StateVector& psi, int n_ancilla, std::uint64_t shots,
                          std::uint64_t seed) const {
  if (shots == 0) throw Error(ErrorKind::EmptyRequest, "QPE needs at least one shot");
  const std::vector<double> dist = qpe_distribution(t, psi, n_ancilla);
  const std::size_t grid = dist.size();

  std::vector<double> cumulative(grid);
  double acc = 0.0;
  for (std::size_t m = 0; m < grid; ++m) {
    acc += dist[m];
    cumulative[m] = acc;
  }
  Rng rng(seed, "quantum.qpe");
  std::map<std::size_t, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t m = static_cast<std::size_t>(it - cumulative.begin());
    if (m >= grid) m = grid - 1;
    ++counts[m];
  }

  QpeResult result;
  for (const auto& [m, c] : counts) {
    result.estimates.push_back({static_cast<double>(m) / static_cast<double>(grid),
                                static_cast<double>(c) / static_cast<double>(shots), n_ancilla});
  }
  std::stable_sort(result.estimates.begin(), result.estimates.end(),
                   [](const PhaseEstimate& a, const PhaseEstimate& b) { return a.probability > b.probability; });

  const std::vector<double> w = weights(psi);
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] < 1e-12) continue;
    const double l = spectrum_.eigenvalues[k];
    lo = any ? std::min(lo, l) : l;
    hi = any ? std::max(hi, l) : l;
    any = true;
  }
  result.phase_wraps = any && (hi - lo) * std::abs(t) >= kTwoPi;
  return result;
}

StateVector evolve(const HermitianMatrix& h, double t, const StateVector& psi) {
  return Propagator(h).evolve(t, psi);
}

double survival_probability(const HermitianMatrix& h, double t, const StateVector& psi) {
  return Propagator(h).survival_probability(t, psi);
}

HadamardEstimate hadamard_test(const HermitianMatrix& h, double t, const StateVector& psi, std::uint64_t shots,
                               std::uint64_t seed) {
  return Propagator(h).hadamard_test(t, psi, shots, seed);
}

QpeResult qpe(const HermitianMatrix& h, double t, const StateVector& psi, int n_ancilla, std::uint64_t shots,
              std::uint64_t seed) {
  return Propagator(h).qpe(t, psi, n_ancilla, shots, seed);
}

double ipr(const StateVector& psi) noexcept {
  double s = 0.0;
  for (const Complex& z : psi.amplitudes()) {
    const double p = std::norm(z);
    s += p * p;
  }
  return s;
}

}  // namespace ringchaos
