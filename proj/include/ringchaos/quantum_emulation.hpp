#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ringchaos/hermitian.hpp"

namespace ringchaos {

class StateVector {
 public:
  // Throws DomainError unless sum |amp|^2 = 1 within 1e-10.
  explicit StateVector(std::vector<Complex> amplitudes);

  static StateVector basis(std::size_t dimension, std::size_t index);
  static StateVector uniform(std::size_t dimension);
  // Rescales to unit norm; throws DomainError for the zero vector.
  static StateVector normalized(std::vector<Complex> amplitudes);

  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const noexcept { return amps_; }
  Complex operator[](std::size_t i) const noexcept { return amps_[i]; }

  Complex inner(const StateVector& other) const;  // <this|other>

 private:
  std::vector<Complex> amps_;
};

struct HadamardEstimate {
  double re = 0.0;
  double im = 0.0;
};

struct PhaseEstimate {
  double phase = 0.0;        // multiple of 2^-n_ancilla in [0, 1)
  double probability = 0.0;  // empirical frequency over shots
  int n_ancilla = 0;
};

struct QpeResult {
  std::vector<PhaseEstimate> estimates;  // sorted by probability, descending
  // Set when the populated eigenvalues span 2pi/t or more, so distinct
  // eigenvalues can alias onto the same phase.
  bool phase_wraps = false;
};

/// Time evolution under a diagonalized Hamiltonian.
///
/// U(t) = sum_k exp(-i lambda_k t) |v_k><v_k|. Construct once and reuse for
/// many times t; every free function below builds one internally.
class Propagator {
 public:
  explicit Propagator(const HermitianMatrix& h);
  explicit Propagator(Spectrum spectrum);

  std::size_t dimension() const noexcept { return spectrum_.size(); }
  const Spectrum& spectrum() const noexcept { return spectrum_; }

  StateVector evolve(double t, const StateVector& psi) const;
  Complex overlap(double t, const StateVector& psi) const;  // <psi|U(t)|psi>
  double survival_probability(double t, const StateVector& psi) const;
  std::vector<double> survival_curve(std::span<const double> times, const StateVector& psi) const;

  HadamardEstimate hadamard_test_exact(double t, const StateVector& psi) const;
  HadamardEstimate hadamard_test(double t, const StateVector& psi, std::uint64_t shots, std::uint64_t seed) const;

  // Exact outcome distribution over the 2^n phase grid.
  std::vector<double> qpe_distribution(double t, const StateVector& psi, int n_ancilla) const;
  QpeResult qpe(double t, const StateVector& psi, int n_ancilla, std::uint64_t shots, std::uint64_t seed) const;

 private:
  std::vector<double> weights(const StateVector& psi) const;  // |<v_k|psi>|^2
  void check(const StateVector& psi) const;
  Spectrum spectrum_;
};

StateVector evolve(const HermitianMatrix& h, double t, const StateVector& psi);
double survival_probability(const HermitianMatrix& h, double t, const StateVector& psi);
HadamardEstimate hadamard_test(const HermitianMatrix& h, double t, const StateVector& psi, std::uint64_t shots,
                               std::uint64_t seed);
QpeResult qpe(const HermitianMatrix& h, double t, const StateVector& psi, int n_ancilla, std::uint64_t shots,
              std::uint64_t seed);

// Inverse participation ratio sum |amp|^4.
double ipr(const StateVector& psi) noexcept;

}  // namespace ringchaos
