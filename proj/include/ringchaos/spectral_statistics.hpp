#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ringchaos/errors.hpp"
#include "ringchaos/rng.hpp"

namespace ringchaos {

/// Target spacing law on normalized spacings s = S/D.
class EnsembleKind {
 public:
  enum class Family { Poisson, WignerDyson, Brody };

  static EnsembleKind poisson() { return EnsembleKind(Family::Poisson, 0, 0.0); }
  static EnsembleKind wigner_dyson(int beta);  // beta in {1, 2, 4}
  static EnsembleKind goe() { return wigner_dyson(1); }
  static EnsembleKind gue() { return wigner_dyson(2); }
  static EnsembleKind gse() { return wigner_dyson(4); }
  static EnsembleKind brody(double q);  // q in [0, 1]

  // Accepts "poisson", "goe"/"wd1", "gue"/"wd2", "gse"/"wd4", "brody" (with q).
  static EnsembleKind parse(const std::string& name, double q = 0.0);

  Family family() const noexcept { return family_; }
  int beta() const noexcept { return beta_; }
  double q() const noexcept { return q_; }
  std::string name() const;

  friend bool operator==(const EnsembleKind&, const EnsembleKind&) = default;

 private:
  EnsembleKind(Family f, int beta, double q) : family_(f), beta_(beta), q_(q) {}
  Family family_;
  int beta_;
  double q_;
};

struct DistributionConstants {
  double b = 0.0;
  double a = 0.0;
};

// Normalization constants of P(s) = b s^beta exp(-a s^2).
DistributionConstants wigner_dyson_constants(int beta);
// b(q) = Gamma((2+q)/(1+q))^(q+1).
double brody_b(double q);

double pdf(const EnsembleKind& kind, double s);
double cdf(const EnsembleKind& kind, double s);
// Inverse of cdf on [0, 1).
double quantile(const EnsembleKind& kind, double u);

std::vector<double> sample_spacings(const EnsembleKind& kind, std::size_t n, std::uint64_t seed);
std::vector<double> sample_spacings(const EnsembleKind& kind, std::size_t n, Rng& rng);

double ks_distance(std::span<const double> samples, const EnsembleKind& kind);
// Two-sample KS statistic.
double ks_distance(std::span<const double> a, std::span<const double> b);

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins);
// Samples outside [front, back] are dropped; the last bin is closed.
Histogram make_histogram(std::span<const double> samples, std::vector<double> edges);

double l1_histogram_distance(const Histogram& hist, const EnsembleKind& kind);

struct BrodyFit {
  double q_hat = 0.0;
  double log_likelihood = 0.0;
  Warnings warnings;
};

BrodyFit fit_brody(std::span<const double> samples);
double brody_log_likelihood(std::span<const double> samples, double q);

// Mean of r_i = min(S_i, S_{i+1}) / max(S_i, S_{i+1}) over consecutive spacings.
double mean_r(std::span<const double> spacings);
// Same statistic computed from sorted levels.
double mean_r_levels(std::span<const double> sorted_levels);

// Reference mean r for Poisson and GUE spacings.
double r_reference(const EnsembleKind& kind);

inline constexpr double kPoissonMeanR = 0.38629;
inline constexpr double kGueMeanR = 0.60266;

}  // namespace ringchaos
