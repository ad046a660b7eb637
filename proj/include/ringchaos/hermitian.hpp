#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ringchaos {

using Complex = std::complex<double>;

/// Dense Hermitian matrix, row-major.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  static HermitianMatrix zeros(std::size_t n);

  // Throws NotHermitian when entry(i,j) and conj(entry(j,i)) differ by more
  // than 1e-12 relative to the largest entry, DimensionMismatch when
  // entries.size() != n*n.
  static HermitianMatrix from_row_major(std::size_t n, std::vector<Complex> entries);
  static HermitianMatrix from_real_symmetric(std::size_t n, std::span<const double> entries);

  std::size_t dimension() const noexcept { return n_; }
  Complex operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  const std::vector<Complex>& entries() const noexcept { return entries_; }

  // Writes entry (i,j) and its mirror; diagonal entries keep only the real part.
  void set(std::size_t i, std::size_t j, Complex value) noexcept;

  double trace() const noexcept;
  double frobenius_norm() const noexcept;
  std::vector<Complex> multiply(std::span<const Complex> v) const;

 private:
  explicit HermitianMatrix(std::size_t n) : n_(n), entries_(n * n) {}
  std::size_t n_ = 0;
  std::vector<Complex> entries_;
};

/// Sorted eigenvalues, with eigenvectors when produced by a decomposition.
struct Spectrum {
  std::vector<double> eigenvalues;
  std::optional<std::vector<double>> unfolded_spacings;
  // Eigenvector k occupies [k*n, (k+1)*n); empty when not computed.
  std::vector<Complex> eigenvectors;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  bool has_vectors() const noexcept { return !eigenvectors.empty(); }
  std::span<const Complex> vector(std::size_t k) const {
    const std::size_t n = eigenvalues.size();
    return std::span<const Complex>(eigenvectors).subspan(k * n, n);
  }
};

// Full eigendecomposition: Householder reduction to real tridiagonal form
// followed by implicit QL with eigenvector accumulation.
Spectrum eigenvalues(const HermitianMatrix& h);

}  // namespace ringchaos
