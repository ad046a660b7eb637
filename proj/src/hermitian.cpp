#include "ringchaos/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ringchaos/errors.hpp"

namespace ringchaos {

HermitianMatrix HermitianMatrix::zeros(std::size_t n) { return HermitianMatrix(n); }

HermitianMatrix HermitianMatrix::from_row_major(std::size_t n, std::vector<Complex> entries) {
  if (entries.size() != n * n) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(n * n) + " entries, got " +
                                                  std::to_string(entries.size()));
  }
  double scale = 1.0;
  for (const Complex& z : entries) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
    }
    scale = std::max(scale, std::abs(z));
  }
  const double tol = 1e-12 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (std::abs(entries[i * n + j] - std::conj(entries[j * n + i])) > tol) {
        throw Error(ErrorKind::NotHermitian,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not the conjugate of its mirror");
      }
    }
  }
  HermitianMatrix m(n);
  // Store the exactly Hermitian part.
  for (std::size_t i = 0; i < n; ++i) {
    m.entries_[i * n + i] = entries[i * n + i].real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (entries[i * n + j] + std::conj(entries[j * n + i]));
      m.entries_[i * n + j] = avg;
      m.entries_[j * n + i] = std::conj(avg);
    }
  }
  return m;
}

HermitianMatrix HermitianMatrix::from_real_symmetric(std::size_t n, std::span<const double> entries) {
  return from_row_major(n, std::vector<Complex>(entries.begin(), entries.end()));
}

void HermitianMatrix::set(std::size_t i, std::size_t j, Complex value) noexcept {
  if (i == j) {
    entries_[i * n_ + i] = value.real();
    return;
  }
  entries_[i * n_ + j] = value;
  entries_[j * n_ + i] = std::conj(value);
}

double HermitianMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += entries_[i * n_ + i].real();
  return t;
}

double HermitianMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const Complex& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

std::vector<Complex> HermitianMatrix::multiply(std::span<const Complex> v) const {
  if (v.size() != n_) throw Error(ErrorKind::DimensionMismatch, "vector length does not match matrix dimension");
  std::vector<Complex> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += entries_[i * n_ + j] * v[j];
    out[i] = acc;
  }
  return out;
}

namespace {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<Complex> sub;  // sub[i] = A(i+1, i)
  std::vector<Complex> q;    // row-major unitary with A = Q T Q^*
};

Tridiagonal householder_reduce(const HermitianMatrix& h) {
  const std::size_t n = h.dimension();
  std::vector<Complex> a = h.entries();
  std::vector<Complex> q(n * n, Complex(0.0));
  for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

  std::vector<Complex> v(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = k + 1;
    double tail = 0.0;
    for (std::size_t r = m + 1; r < n; ++r) tail += std::norm(a[r * n + k]);
    if (tail == 0.0) continue;

    const Complex x0 = a[m * n + k];
    const double xnorm = std::sqrt(std::norm(x0) + tail);
    const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex(1.0);
    const Complex alpha = -phase * xnorm;

    std::fill(v.begin(), v.end(), Complex(0.0));
    v[m] = x0 - alpha;
    for (std::size_t r = m + 1; r < n; ++r) v[r] = a[r * n + k];
    double vnorm2 = 0.0;
    for (std::size_t r = m; r < n; ++r) vnorm2 += std::norm(v[r]);
    const double tau = 2.0 / vnorm2;

    // A <- P A with P = I - tau v v^*, rows m..n-1.
    for (std::size_t j = k; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t r = m; r < n; ++r) acc += std::conj(v[r]) * a[r * n + j];
      w[j] = acc;
    }
    for (std::size_t r = m; r < n; ++r) {
      const Complex tv = tau * v[r];
      for (std::size_t j = k; j < n; ++j) a[r * n + j] -= tv * w[j];
    }
    // A <- A P, columns m..n-1.
    for (std::size_t r = k; r < n; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = m; c < n; ++c) acc += a[r * n + c] * v[c];
      acc *= tau;
      for (std::size_t c = m; c < n; ++c) a[r * n + c] -= acc * std::conj(v[c]);
    }
    // Q <- Q P.
    for (std::size_t r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = m; c < n; ++c) acc += q[r * n + c] * v[c];
      acc *= tau;
      for (std::size_t c = m; c < n; ++c) q[r * n + c] -= acc * std::conj(v[c]);
    }
    // Exact zeros below the subdiagonal.
    a[m * n + k] = alpha;
    a[k * n + m] = std::conj(alpha);
    for (std::size_t r = m + 1; r < n; ++r) {
      a[r * n + k] = 0.0;
      a[k * n + r] = 0.0;
    }
  }

  Tridiagonal t;
  t.diag.resize(n);
  t.sub.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) t.diag[i] = a[i * n + i].real();
  for (std::size_t i = 0; i + 1 < n; ++i) t.sub[i] = a[(i + 1) * n + i];
  t.q = std::move(q);
  return t;
}

// Implicit QL on a real symmetric tridiagonal matrix. On entry e[i] couples
// i and i+1 (e[n-1] unused); z is row-major and accumulates rotations.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z, std::size_t n) {
  if (n == 0) return;
  e[n - 1] = 0.0;
  const double eps = std::ldexp(1.0, -52);
  double f = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 100) throw std::runtime_error("tridiagonal QL failed to converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          h = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = h + s * (c * g + s * d[ii]);
          for (std::size_t k = 0; k < n; ++k) {
            double& zi = z[k * n + ii];
            double& zi1 = z[k * n + ii + 1];
            h = zi1;
            zi1 = s * zi + c * h;
            zi = c * zi - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

Spectrum eigenvalues(const HermitianMatrix& h) {
  const std::size_t n = h.dimension();
  Spectrum out;
  if (n == 0) return out;

  Tridiagonal t = householder_reduce(h);

  // Diagonal phases making the subdiagonal real and non-negative.
  std::vector<Complex> phase(n, Complex(1.0));
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mag = std::abs(t.sub[i]);
    e[i] = mag;
    phase[i + 1] = mag > 0.0 ? phase[i] * (t.sub[i] / mag) : phase[i];
  }
  std::vector<double> d = t.diag;
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  tridiagonal_ql(d, e, z, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  // V = Q * diag(phase) * Z, stored eigenvector-major.
  std::vector<Complex> qd(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) qd[r * n + j] = t.q[r * n + j] * phase[j];
  }
  out.eigenvalues.resize(n);
  out.eigenvectors.assign(n * n, Complex(0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = d[src];
    Complex* col = out.eigenvectors.data() + k * n;
    for (std::size_t r = 0; r < n; ++r) {
      Complex acc = 0.0;
      const Complex* qrow = qd.data() + r * n;
      for (std::size_t j = 0; j < n; ++j) acc += qrow[j] * z[j * n + src];
      col[r] = acc;
    }
  }
  return out;
}

}  // namespace ringchaos
