#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ringchaos/dyson_gas.hpp"
#include "ringchaos/errors.hpp"
#include "ringchaos/spectral_statistics.hpp"

using namespace ringchaos;
using oracle::kPi;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::UsageError;
}

// Eigenphases of a Haar-random unitary (QR of a complex Ginibre matrix with
// the diagonal phase correction), mapped to arc length on a ring of length L.
std::vector<double> cue_positions(std::size_t n, double L, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) z(i, j) = {g(gen), g(gen)};
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  const Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  Eigen::MatrixXcd u = q;
  for (std::size_t j = 0; j < n; ++j) u.col(j) *= r(j, j) / std::abs(r(j, j));
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
  std::vector<double> x;
  for (std::size_t k = 0; k < n; ++k) {
    double phi = std::arg(es.eigenvalues()(k));
    if (phi < 0) phi += 2 * kPi;
    x.push_back(phi / (2 * kPi) * L);
  }
  std::sort(x.begin(), x.end());
  return x;
}

std::vector<double> normalized_ring_spacings(const std::vector<double>& sorted, double L) {
  return spacings(sorted, L).normalized;
}

FleetSnapshot fleet(std::initializer_list<double> xs) {
  FleetSnapshot s;
  int i = 0;
  for (double x : xs) s.buses.push_back({"b" + std::to_string(i++), x});
  return s;
}

}  // namespace

TEST_CASE("confined energy") {
  CHECK(confined_log_gas_energy({{-1.0, 1.0}, std::nullopt}) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(confined_log_gas_energy({{0.0}, std::nullopt}) == 0.0);
  CHECK(kind_of([] { confined_log_gas_energy({{0.0, 0.0}, std::nullopt}); }) == ErrorKind::SingularConfiguration);
  // Permutation invariance.
  const double a = confined_log_gas_energy({{0.3, -1.7, 2.2, 0.9}, std::nullopt});
  const double b = confined_log_gas_energy({{2.2, 0.9, -1.7, 0.3}, std::nullopt});
  CHECK(std::abs(a - b) <= 1e-12);
}

TEST_CASE("circular energy") {
  CHECK(circular_log_gas_energy({{0.0, kPi}, 2 * kPi}) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
  CHECK(circular_log_gas_energy({{0.0, kPi}, 2 * kPi}, DistanceMode::Arc) == doctest::Approx(-std::log(kPi)));
  CHECK(kind_of([] { circular_log_gas_energy({{1.0, 1.0}, 10.0}); }) == ErrorKind::SingularConfiguration);

  const double L = 27000.0;
  const std::vector<double> base = {100.0, 9100.0, 18100.0, 4000.0, 21000.0};
  const double e0 = circular_log_gas_energy({base, L});
  for (double c : {1.0, 1234.5, 26999.0}) {
    std::vector<double> rot;
    for (double x : base) rot.push_back(wrap_position(x + c, L));
    CHECK(std::abs(circular_log_gas_energy({rot, L}) - e0) <= 1e-9);
  }
}

TEST_CASE("ring distance modes") {
  CHECK(ring_distance(0, 25, 100, DistanceMode::Chord) == doctest::Approx(100 / kPi * std::sin(kPi / 4)));
  CHECK(ring_distance(10, 90, 100, DistanceMode::Arc) == doctest::Approx(20));
  CHECK(ring_distance(10, 90, 100, DistanceMode::Chord) == doctest::Approx(ring_distance(90, 10, 100, DistanceMode::Chord)));
}

TEST_CASE("sampler determinism and tuning") {
  const auto a = sample_circular_gas(20, 1000.0, 2.0, 200, 5);
  const auto b = sample_circular_gas(20, 1000.0, 2.0, 200, 5);
  CHECK(a.configuration.positions == b.configuration.positions);
  CHECK(a.step == b.step);
  CHECK(a.configuration.positions != sample_circular_gas(20, 1000.0, 2.0, 200, 6).configuration.positions);
  CHECK(std::is_sorted(a.configuration.positions.begin(), a.configuration.positions.end()));
  for (double x : a.configuration.positions) {
    CHECK(x >= 0.0);
    CHECK(x < 1000.0);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = sample_circular_gas(55, 27000.0, 2.0, 500, seed);
    CHECK(s.acceptance_rate >= 0.3);
    CHECK(s.acceptance_rate <= 0.7);
  }
  CHECK_THROWS_AS(sample_circular_gas(1, 100.0, 2.0, 10, 1), Error);
  CHECK_THROWS_AS(sample_circular_gas(5, 100.0, 2.0, 0, 1), Error);
  CHECK_THROWS_AS(sample_circular_gas(5, 100.0, 0.0, 10, 1), Error);
}

TEST_CASE("circular gas at beta 2 matches the Haar CUE oracle") {
  const std::size_t n = 55, chains = 60;
  const double L = 27000.0;
  std::vector<double> gas, cue;
  std::mt19937_64 gen(2024);
  for (std::size_t c = 0; c < chains; ++c) {
    const auto g = sample_circular_gas(n, L, 2.0, 2000, derive_seed(77, "test.gas", c));
    const auto sg = normalized_ring_spacings(g.configuration.positions, L);
    gas.insert(gas.end(), sg.begin(), sg.end());
    const auto sc = normalized_ring_spacings(cue_positions(n, L, gen), L);
    cue.insert(cue.end(), sc.begin(), sc.end());
  }
  // Two-sample KS critical value at alpha = 0.001 is 1.95 sqrt(2/m).
  const double crit = 1.95 * std::sqrt(2.0 / static_cast<double>(gas.size()));
  CHECK(ks_distance(std::span<const double>(gas), cue) <= crit);
  CHECK(std::abs(mean_r(gas) - mean_r(cue)) <= 0.015);
}

TEST_CASE("vanishing beta gives Poisson statistics") {
  std::vector<double> all;
  for (std::uint64_t c = 0; c < 40; ++c) {
    const auto g = sample_circular_gas(55, 27000.0, 1e-6, 300, derive_seed(3, "test.gas.poisson", c));
    const auto s = normalized_ring_spacings(g.configuration.positions, 27000.0);
    all.insert(all.end(), s.begin(), s.end());
  }
  CHECK(std::abs(mean_r(all) - kPoissonMeanR) <= 0.02);
}

TEST_CASE("hamiltonian construction") {
  const RingRoute ring(27000.0, {}, {10.0});
  SUBCASE("two buses 100 m apart") {
    HamiltonianSpec spec;
    spec.distance_mode = DistanceMode::Arc;
    const auto h = build_hamiltonian(fleet({0.0, 100.0}), ring, spec);
    CHECK(h(0, 0) == 0.0);
    CHECK(h(0, 1).real() == doctest::Approx(1e-4).epsilon(1e-14));
    const auto sp = eigenvalues(h);
    CHECK(sp.eigenvalues[0] == doctest::Approx(-1e-4).epsilon(1e-12));
    CHECK(sp.eigenvalues[1] == doctest::Approx(1e-4).epsilon(1e-12));
  }
  SUBCASE("chord distance") {
    const auto h = build_hamiltonian(fleet({0.0, 100.0}), ring, HamiltonianSpec{});
    const double d = 27000.0 / kPi * std::sin(kPi * 100.0 / 27000.0);
    CHECK(h(0, 1).real() == doctest::Approx(1.0 / (d * d)).epsilon(1e-14));
  }
  SUBCASE("zero coupling leaves the kinetic diagonal") {
    HamiltonianSpec spec;
    spec.coupling = 0.0;
    spec.masses = {2.0, 1.0, 4.0};
    spec.velocities = {3.0, 0.0, 1.0};
    const auto h = build_hamiltonian(fleet({0, 5000, 12000}), ring, spec);
    const auto sp = eigenvalues(h);
    CHECK(sp.eigenvalues == std::vector<double>{0.0, 2.0, 9.0});

    spec.velocities = {};
    CHECK(eigenvalues(build_hamiltonian(fleet({0, 5000, 12000}), ring, spec)).eigenvalues ==
          std::vector<double>(3, 0.0));
  }
  SUBCASE("exact symmetry") {
    HamiltonianSpec spec;
    spec.velocities = {1, 2, 3, 4, 5};
    spec.lengths = {12.0};
    const auto h = build_hamiltonian(fleet({10, 300, 7000, 15000, 26000}), ring, spec);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(h(i, j) == h(j, i));
  }
  SUBCASE("distance floor warns") {
    HamiltonianSpec spec;
    spec.lengths = {12.0};
    Warnings w;
    const auto h = build_hamiltonian(fleet({0.0, 5.0}), ring, spec, &w);
    CHECK(h(0, 1).real() == doctest::Approx(1.0 / (kDistanceFloor * kDistanceFloor)));
    REQUIRE(!w.empty());
    CHECK(w.front().find("ClampedDistance") != std::string::npos);
  }
  SUBCASE("neighbor only") {
    HamiltonianSpec spec;
    spec.neighbor_only = true;
    const auto h = build_hamiltonian(fleet({0, 1000, 2000, 3000, 4000}), ring, spec);
    CHECK(h(0, 2) == Complex(0.0));
    CHECK(h(0, 1) != Complex(0.0));
    CHECK(h(0, 4) != Complex(0.0));  // wraps: first and last are ring neighbors
  }
  SUBCASE("log kernel and bad lists") {
    HamiltonianSpec spec;
    spec.potential = LogGas{};
    spec.distance_mode = DistanceMode::Arc;
    CHECK(build_hamiltonian(fleet({0, 100}), ring, spec)(0, 1).real() == doctest::Approx(-std::log(100.0)));
    spec.masses = {1.0, 2.0, 3.0};
    CHECK(kind_of([&] { build_hamiltonian(fleet({0, 100}), ring, spec); }) == ErrorKind::DimensionMismatch);
    HamiltonianSpec neg;
    neg.potential = InversePower{-1.0};
    CHECK_THROWS_AS(build_hamiltonian(fleet({0, 100}), ring, neg), Error);
  }
}

TEST_CASE("unfolding") {
  Spectrum eq;
  eq.eigenvalues = {0, 1, 2, 3};
  CHECK(*unfold(eq, UnfoldMethod::global_mean()).unfolded_spacings == std::vector<double>{1, 1, 1});

  Spectrum s;
  s.eigenvalues = {0, 1, 2, 4};
  const auto u = *unfold(s, UnfoldMethod::global_mean()).unfolded_spacings;
  CHECK(u[0] == doctest::Approx(0.75));
  CHECK(u[1] == doctest::Approx(0.75));
  CHECK(u[2] == doctest::Approx(1.5));

  CHECK(kind_of([&] { unfold(s, UnfoldMethod::polynomial(5)); }) == ErrorKind::InsufficientData);

  Spectrum poly;
  for (int i = 0; i < 50; ++i) poly.eigenvalues.push_back(std::pow(i / 49.0, 3) + 0.01 * i);
  const auto up = *unfold(poly, UnfoldMethod::polynomial(5)).unfolded_spacings;
  double mean = 0.0;
  for (double x : up) {
    CHECK(x >= 0.0);
    mean += x;
  }
  CHECK(std::abs(mean / up.size() - 1.0) <= 1e-6);
}

TEST_CASE("mean r of levels is affine invariant") {
  Rng rng(9);
  std::vector<double> lv;
  for (int i = 0; i < 100; ++i) lv.push_back(rng.normal());
  std::sort(lv.begin(), lv.end());
  std::vector<double> mapped;
  for (double l : lv) mapped.push_back(3.25 * l - 40.0);
  CHECK(std::abs(mean_r_levels(lv) - mean_r_levels(mapped)) <= 1e-12);
}
