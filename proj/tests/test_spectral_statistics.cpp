#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ringchaos/errors.hpp"
#include "ringchaos/spectral_statistics.hpp"

using namespace ringchaos;
using oracle::kPi;

namespace {

const std::vector<EnsembleKind> kReference = {EnsembleKind::poisson(), EnsembleKind::goe(), EnsembleKind::gue(),
                                              EnsembleKind::gse()};

}  // namespace

TEST_CASE("documented constants") {
  CHECK(wigner_dyson_constants(1).b == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(wigner_dyson_constants(1).a == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(wigner_dyson_constants(2).b == doctest::Approx(32 / (kPi * kPi)).epsilon(1e-15));
  CHECK(wigner_dyson_constants(2).a == doctest::Approx(4 / kPi).epsilon(1e-15));
  CHECK(wigner_dyson_constants(4).b == doctest::Approx(262144 / (729 * kPi * kPi * kPi)).epsilon(1e-15));
  CHECK(wigner_dyson_constants(4).a == doctest::Approx(64 / (9 * kPi)).epsilon(1e-15));
  CHECK(brody_b(1.0) == doctest::Approx(kPi / 4).epsilon(1e-14));
  CHECK(brody_b(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(EnsembleKind::wigner_dyson(3), Error);
  CHECK_THROWS_AS(EnsembleKind::brody(1.5), Error);
}

TEST_CASE("pdf point values") {
  CHECK(pdf(EnsembleKind::poisson(), 0.0) == 1.0);
  CHECK(pdf(EnsembleKind::gue(), 0.0) == 0.0);
  CHECK(pdf(EnsembleKind::gue(), 1.0) == doctest::Approx(32 / (kPi * kPi) * std::exp(-4 / kPi)).epsilon(1e-14));
  CHECK(pdf(EnsembleKind::brody(0.0), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  for (const auto& k : kReference) CHECK_THROWS_AS(pdf(k, -0.1), Error);
  for (int beta : {1, 2, 4}) {
    for (double s = 0.05; s < 6; s += 0.37) {
      CHECK(pdf(EnsembleKind::wigner_dyson(beta), s) == doctest::Approx(oracle::wd_pdf(beta, s)).epsilon(1e-13));
    }
  }
}

TEST_CASE("normalization and unit mean by Simpson quadrature") {
  for (const auto& k : kReference) {
    const double mass = oracle::simpson([&](double s) { return pdf(k, s); }, 0.0, 20.0, 200000);
    const double mean = oracle::simpson([&](double s) { return s * pdf(k, s); }, 0.0, 20.0, 200000);
    CHECK(std::abs(mass - 1.0) <= 1e-6);
    CHECK(std::abs(mean - 1.0) <= 1e-6);
  }
}

TEST_CASE("GUE surmise mode") {
  double best_s = 0.0, best = -1.0;
  for (int i = 0; i <= 2000000; ++i) {
    const double s = 0.5 + 0.8 * i / 2000000.0;
    const double p = pdf(EnsembleKind::gue(), s);
    if (p > best) {
      best = p;
      best_s = s;
    }
  }
  CHECK(std::abs(best_s - std::sqrt(kPi) / 2) <= 1e-6);
}

TEST_CASE("Brody limits pointwise") {
  for (int i = 1; i <= 50; ++i) {
    const double s = 0.1 * i;
    CHECK(std::abs(pdf(EnsembleKind::brody(0.0), s) - pdf(EnsembleKind::poisson(), s)) <= 1e-12);
    CHECK(std::abs(pdf(EnsembleKind::brody(1.0), s) - pdf(EnsembleKind::goe(), s)) <= 1e-12);
  }
}

TEST_CASE("cdf closed forms and quadrature") {
  for (const auto& k : kReference) CHECK(cdf(k, 0.0) == 0.0);
  CHECK(cdf(EnsembleKind::poisson(), std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cdf(EnsembleKind::goe(), std::sqrt(4 * std::log(2.0) / kPi)) == doctest::Approx(0.5).epsilon(1e-14));
  for (double s = 0.0; s < 5.0; s += 0.0731) {
    CHECK(std::abs(cdf(EnsembleKind::gue(), s) - oracle::wd2_cdf(s)) <= 1e-10);
    const double gse = oracle::simpson([](double x) { return oracle::wd_pdf(4, x); }, 0.0, s, 4000);
    CHECK(std::abs(cdf(EnsembleKind::gse(), s) - gse) <= 1e-9);
  }
  for (const auto& k : {EnsembleKind::gue(), EnsembleKind::gse(), EnsembleKind::brody(0.3)}) {
    double prev = 0.0;
    for (double s = 0.0; s < 6.0; s += 0.01) {
      const double c = cdf(k, s);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(cdf(k, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quantile inverts cdf") {
  for (const auto& k : {EnsembleKind::poisson(), EnsembleKind::goe(), EnsembleKind::gue(), EnsembleKind::gse(),
                        EnsembleKind::brody(0.6)}) {
    for (double u = 0.01; u < 1.0; u += 0.049) {
      CHECK(std::abs(cdf(k, quantile(k, u)) - u) <= 1e-6);
    }
  }
}

TEST_CASE("sampler determinism and means") {
  for (const auto& k : {EnsembleKind::poisson(), EnsembleKind::gue()}) {
    const auto a = sample_spacings(k, 100000, 11);
    CHECK(a == sample_spacings(k, 100000, 11));
    double mean = 0.0;
    for (double s : a) mean += s;
    CHECK(std::abs(mean / a.size() - 1.0) <= 0.02);
  }
  CHECK(sample_spacings(EnsembleKind::gue(), 50, 1) != sample_spacings(EnsembleKind::gue(), 50, 2));
  CHECK_THROWS_AS(sample_spacings(EnsembleKind::poisson(), 0, 1), Error);
}

TEST_CASE("KS distance") {
  SUBCASE("quantile grid") {
    for (const auto& k : kReference) {
      const std::size_t n = 400;
      std::vector<double> grid;
      for (std::size_t i = 0; i < n; ++i) grid.push_back(quantile(k, (i + 0.5) / n));
      CHECK(ks_distance(grid, k) <= 1.0 / n);
    }
  }
  SUBCASE("degenerate mass at zero") {
    CHECK(ks_distance(std::vector<double>(20, 0.0), EnsembleKind::poisson()) == doctest::Approx(1.0));
  }
  SUBCASE("large Poisson sample") {
    CHECK(ks_distance(sample_spacings(EnsembleKind::poisson(), 100000, 3), EnsembleKind::poisson()) <= 0.01);
  }
  SUBCASE("two-sample") {
    const auto a = sample_spacings(EnsembleKind::gue(), 20000, 1);
    const auto b = sample_spacings(EnsembleKind::gue(), 20000, 2);
    const auto c = sample_spacings(EnsembleKind::poisson(), 20000, 3);
    CHECK(ks_distance(std::span<const double>(a), b) <= 0.02);
    CHECK(ks_distance(std::span<const double>(a), c) >= 0.2);
  }
  CHECK_THROWS_AS(ks_distance(std::vector<double>{}, EnsembleKind::poisson()), Error);
}

TEST_CASE("histogram and L1 distance") {
  const auto edges = uniform_edges(0.0, 4.0, 8);
  CHECK(edges.size() == 9);
  const Histogram h = make_histogram(std::vector<double>{0.0, 0.49, 0.5, 3.9, 4.0, 4.5, -1.0}, edges);
  CHECK(h.counts.size() == 8);
  CHECK(h.total == 5);  // 4.5 and -1 fall outside
  CHECK(h.counts[0] == 2);
  CHECK(h.counts[1] == 1);
  CHECK(h.counts[7] == 2);  // last bin closed at 4.0

  // Counts proportional to the exact bin masses give distance zero up to
  // the mass outside the range.
  Histogram exact;
  exact.bin_edges = uniform_edges(0.0, 30.0, 30);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < 30; ++i) {
    const double p = std::exp(-double(i)) - std::exp(-double(i + 1));
    exact.counts.push_back(static_cast<std::uint64_t>(std::llround(p * 1e12)));
    total += exact.counts.back();
  }
  exact.total = total;
  CHECK(l1_histogram_distance(exact, EnsembleKind::poisson()) <= 1e-9);
  CHECK_THROWS_AS(l1_histogram_distance(Histogram{edges, std::vector<std::uint64_t>(8, 0), 0}, EnsembleKind::gue()),
                  Error);

  const auto gue = sample_spacings(EnsembleKind::gue(), 100000, 5);
  const Histogram hg = make_histogram(gue, uniform_edges(0.0, 5.0, 50));
  CHECK(l1_histogram_distance(hg, EnsembleKind::gue()) <= 0.03);
  CHECK(l1_histogram_distance(hg, EnsembleKind::poisson()) >= 0.5);
}

TEST_CASE("Brody fit recovers q") {
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto s = sample_spacings(EnsembleKind::brody(q), 100000, 17);
    const BrodyFit fit = fit_brody(s);
    CHECK(std::abs(fit.q_hat - q) <= 0.05);
  }
  CHECK(fit_brody(sample_spacings(EnsembleKind::poisson(), 100000, 8)).q_hat <= 0.05);
  CHECK(fit_brody(sample_spacings(EnsembleKind::goe(), 100000, 9)).q_hat >= 0.95);
  CHECK_THROWS_AS(fit_brody(std::vector<double>(9, 1.0)), Error);

  std::vector<double> with_zero = sample_spacings(EnsembleKind::poisson(), 100, 4);
  with_zero[3] = 0.0;
  const BrodyFit fz = fit_brody(with_zero);
  CHECK(!fz.warnings.empty());
  CHECK(std::isfinite(fz.log_likelihood));
}

TEST_CASE("mean r ratio") {
  CHECK(mean_r(std::vector<double>{1, 1, 1}) == 1.0);
  CHECK(mean_r(std::vector<double>{1, 2, 1}) == 0.5);
  CHECK_THROWS_AS(mean_r(std::vector<double>{1}), Error);
  CHECK(std::abs(mean_r(sample_spacings(EnsembleKind::poisson(), 100000, 21)) - kPoissonMeanR) <= 0.005);

  const std::vector<double> levels = {-3.0, -1.2, 0.4, 0.5, 2.0, 7.5};
  const double r = mean_r_levels(levels);
  std::vector<double> mapped;
  for (double l : levels) mapped.push_back(2.5 * l + 11.0);
  CHECK(std::abs(mean_r_levels(mapped) - r) <= 1e-12);
}

TEST_CASE("r references") {
  CHECK(r_reference(EnsembleKind::poisson()) == 0.38629);
  CHECK(r_reference(EnsembleKind::gue()) == 0.60266);
  try {
    r_reference(EnsembleKind::brody(0.5));
    FAIL("expected Unsupported");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unsupported);
  }
}

TEST_CASE("kind parsing") {
  CHECK(EnsembleKind::parse("wd2") == EnsembleKind::gue());
  CHECK(EnsembleKind::parse("goe") == EnsembleKind::wigner_dyson(1));
  CHECK(EnsembleKind::parse("brody", 0.3) == EnsembleKind::brody(0.3));
  CHECK_THROWS_AS(EnsembleKind::parse("cue"), Error);
}
