#include "ringchaos/spectral_statistics.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

namespace ringchaos {
namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(double s) {
  if (!(s >= 0.0)) throw Error(ErrorKind::DomainError, "spacing must be non-negative, got " + std::to_string(s));
}

double wd_pdf(int beta, double s) {
  const auto c = wigner_dyson_constants(beta);
  return c.b * std::pow(s, beta) * std::exp(-c.a * s * s);
}

// With x = a s^2 the integral of b s^beta exp(-a s^2) is a regularized
// lower incomplete gamma function of order (beta + 1) / 2.
double wd_cdf(int beta, double s) {
  const double order = 0.5 * (beta + 1);
  return boost::math::gamma_p(order, wigner_dyson_constants(beta).a * s * s);
}

double wd_quantile(int beta, double u) {
  if (u == 0.0) return 0.0;
  const double order = 0.5 * (beta + 1);
  return std::sqrt(boost::math::gamma_p_inv(order, u) / wigner_dyson_constants(beta).a);
}

}  // namespace

EnsembleKind EnsembleKind::wigner_dyson(int beta) {
  if (beta != 1 && beta != 2 && beta != 4) {
    throw Error(ErrorKind::DomainError, "Wigner-Dyson beta must be 1, 2 or 4, got " + std::to_string(beta));
  }
  return EnsembleKind(Family::WignerDyson, beta, 0.0);
}

EnsembleKind EnsembleKind::brody(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorKind::DomainError, "Brody q must lie in [0, 1]");
  return EnsembleKind(Family::Brody, 0, q);
}

EnsembleKind EnsembleKind::parse(const std::string& name, double q) {
  if (name == "poisson") return poisson();
  if (name == "goe" || name == "wd1") return wigner_dyson(1);
  if (name == "gue" || name == "wd2") return wigner_dyson(2);
  if (name == "gse" || name == "wd4") return wigner_dyson(4);
  if (name == "brody") return brody(q);
  throw Error(ErrorKind::UsageError, "unknown ensemble kind '" + name + "'");
}

std::string EnsembleKind::name() const {
  switch (family_) {
    case Family::Poisson: return "poisson";
    case Family::WignerDyson: return "wd" + std::to_string(beta_);
    case Family::Brody: {
      std::string out = "brody(";
      out += std::to_string(q_);
      out += ")";
      return out;
    }
  }
  return "unknown";
}

DistributionConstants wigner_dyson_constants(int beta) {
  switch (beta) {
    case 1: return {kPi / 2.0, kPi / 4.0};
    case 2: return {32.0 / (kPi * kPi), 4.0 / kPi};
    case 4: return {262144.0 / (729.0 * kPi * kPi * kPi), 64.0 / (9.0 * kPi)};
    default: throw Error(ErrorKind::DomainError, "Wigner-Dyson beta must be 1, 2 or 4");
  }
}

double brody_b(double q) { return std::pow(std::tgamma((2.0 + q) / (1.0 + q)), q + 1.0); }

double pdf(const EnsembleKind& kind, double s) {
  require_nonnegative(s);
  switch (kind.family()) {
    case EnsembleKind::Family::Poisson:
      return std::exp(-s);
    case EnsembleKind::Family::WignerDyson:
      return wd_pdf(kind.beta(), s);
    case EnsembleKind::Family::Brody: {
      const double q = kind.q();
      const double b = brody_b(q);
      // s^0 == 1 including s == 0.
      return b * (1.0 + q) * std::pow(s, q) * std::exp(-b * std::pow(s, q + 1.0));
    }
  }
  return 0.0;
}

double cdf(const EnsembleKind& kind, double s) {
  require_nonnegative(s);
  switch (kind.family()) {
    case EnsembleKind::Family::Poisson:
      return -std::expm1(-s);
    case EnsembleKind::Family::Brody: {
      const double q = kind.q();
      return -std::expm1(-brody_b(q) * std::pow(s, q + 1.0));
    }
    case EnsembleKind::Family::WignerDyson:
      if (kind.beta() == 1) return -std::expm1(-kPi * s * s / 4.0);
      return wd_cdf(kind.beta(), s);
  }
  return 0.0;
}

double quantile(const EnsembleKind& kind, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "quantile level must lie in [0, 1)");
  const double tail = -std::log1p(-u);
  switch (kind.family()) {
    case EnsembleKind::Family::Poisson:
      return tail;
    case EnsembleKind::Family::Brody: {
      const double q = kind.q();
      return std::pow(tail / brody_b(q), 1.0 / (1.0 + q));
    }
    case EnsembleKind::Family::WignerDyson:
      if (kind.beta() == 1) return std::sqrt(4.0 * tail / kPi);
      return wd_quantile(kind.beta(), u);
  }
  return 0.0;
}

std::vector<double> sample_spacings(const EnsembleKind& kind, std::size_t n, Rng& rng) {
  if (n == 0) throw Error(ErrorKind::EmptyRequest, "sample count must be positive");
  std::vector<double> out(n);
  for (auto& s : out) s = quantile(kind, rng.uniform());
  return out;
}

std::vector<double> sample_spacings(const EnsembleKind& kind, std::size_t n, std::uint64_t seed) {
  Rng rng(seed, "spectral.sample");
  return sample_spacings(kind, n, rng);
}

double ks_distance(std::span<const double> samples, const EnsembleKind& kind) {
  if (samples.empty()) throw Error(ErrorKind::EmptyRequest, "KS distance of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(kind, sorted[i]);
    d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
  }
  return std::min(d, 1.0);
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyRequest, "KS distance of an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

std::vector<double> uniform_edges(double lo, double hi, std::size_t bins) {
  if (bins == 0 || !(hi > lo)) throw Error(ErrorKind::DomainError, "histogram needs bins > 0 and hi > lo");
  std::vector<double> edges(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k) {
    edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins);
  }
  return edges;
}

Histogram make_histogram(std::span<const double> samples, std::vector<double> edges) {
  if (edges.size() < 2) throw Error(ErrorKind::DomainError, "histogram needs at least two edges");
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (!(edges[k] > edges[k - 1])) throw Error(ErrorKind::DomainError, "histogram edges must increase");
  }
  Histogram h;
  h.counts.assign(edges.size() - 1, 0);
  for (double s : samples) {
    if (s < edges.front() || s > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), s);
    auto bin = static_cast<std::size_t>(it - edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    if (bin >= h.counts.size()) bin = h.counts.size() - 1;
    ++h.counts[bin];
    ++h.total;
  }
  h.bin_edges = std::move(edges);
  return h;
}

double l1_histogram_distance(const Histogram& hist, const EnsembleKind& kind) {
  if (hist.total == 0) throw Error(ErrorKind::EmptyRequest, "histogram is empty");
  if (hist.counts.size() + 1 != hist.bin_edges.size()) {
    throw Error(ErrorKind::DimensionMismatch, "histogram needs one more edge than counts");
  }
  const double total = static_cast<double>(hist.total);
  double d = 0.0;
  double lower = cdf(kind, std::max(0.0, hist.bin_edges.front()));
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    const double upper = cdf(kind, std::max(0.0, hist.bin_edges[k + 1]));
    d += std::abs(static_cast<double>(hist.counts[k]) / total - (upper - lower));
    lower = upper;
  }
  return d;
}

double brody_log_likelihood(std::span<const double> samples, double q) {
  const double b = brody_b(q);
  const double log_norm = std::log(b * (1.0 + q));
  double ll = 0.0;
  for (double s : samples) {
    const double log_s = std::log(s);
    ll += log_norm + q * log_s - b * std::exp((q + 1.0) * log_s);
  }
  return ll;
}

BrodyFit fit_brody(std::span<const double> samples) {
  if (samples.size() < 10) {
    throw Error(ErrorKind::InsufficientData, "Brody fit needs at least 10 samples, got " +
                                                 std::to_string(samples.size()));
  }
  BrodyFit fit;
  std::vector<double> data(samples.begin(), samples.end());
  std::size_t floored = 0;
  for (double& s : data) {
    if (s < 0.0) throw Error(ErrorKind::DomainError, "Brody fit got a negative spacing");
    if (s < DBL_EPSILON) {
      s = DBL_EPSILON;
      ++floored;
    }
  }
  if (floored > 0) {
    fit.warnings.push_back(std::to_string(floored) + " zero spacings floored to machine epsilon");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = brody_log_likelihood(data, x1);
  double f2 = brody_log_likelihood(data, x2);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = brody_log_likelihood(data, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = brody_log_likelihood(data, x1);
    }
  }
  fit.q_hat = 0.5 * (lo + hi);
  fit.log_likelihood = brody_log_likelihood(data, fit.q_hat);
  for (double edge : {0.0, 1.0}) {
    const double ll = brody_log_likelihood(data, edge);
    if (ll > fit.log_likelihood) {
      fit.q_hat = edge;
      fit.log_likelihood = ll;
    }
  }
  return fit;
}

double mean_r(std::span<const double> spacings) {
  if (spacings.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "r-ratio needs at least 2 spacings");
  }
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < spacings.size(); ++i) {
    const double a = spacings[i], b = spacings[i + 1];
    if (a < 0.0 || b < 0.0) throw Error(ErrorKind::DomainError, "spacings must be non-negative");
    const double hi = std::max(a, b);
    if (hi == 0.0) continue;  // 0/0 carries no information
    sum += std::min(a, b) / hi;
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::InsufficientData, "all consecutive spacing pairs are degenerate");
  return sum / static_cast<double>(used);
}

double mean_r_levels(std::span<const double> sorted_levels) {
  if (sorted_levels.size() < 3) throw Error(ErrorKind::InsufficientData, "r-ratio needs at least 3 levels");
  std::vector<double> gaps(sorted_levels.size() - 1);
  for (std::size_t i = 0; i + 1 < sorted_levels.size(); ++i) gaps[i] = sorted_levels[i + 1] - sorted_levels[i];
  return mean_r(gaps);
}

double r_reference(const EnsembleKind& kind) {
  if (kind.family() == EnsembleKind::Family::Poisson) return kPoissonMeanR;
  if (kind.family() == EnsembleKind::Family::WignerDyson && kind.beta() == 2) return kGueMeanR;
  throw Error(ErrorKind::Unsupported, "no reference r-ratio for " + kind.name());
}

}  // namespace ringchaos
