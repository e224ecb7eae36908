#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ripkit {

/// Dense real matrix stored row-major. Every entry is finite.
class Matrix {
 public:
  Matrix() = default;
  /// rows x cols matrix filled with `value`. Both dimensions must be positive.
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0);
  /// Takes ownership of row-major `entries`; throws ShapeError on a length
  /// mismatch and DomainError on a non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Builds from nested rows, e.g. Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return entries_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return entries_[r * cols_ + c];
  }

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {entries_.data() + r * cols_, cols_};
  }
  std::vector<double> column(std::size_t c) const;

  Matrix transposed() const;
  Matrix scaled(double c) const;

  double max_abs() const noexcept;
  double frobenius_norm_squared() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Eigenvalues of a symmetric matrix, sorted non-increasing.
struct SymmetricSpectrum {
  std::vector<double> eigenvalues;

  double largest() const { return eigenvalues.front(); }
  double smallest() const { return eigenvalues.back(); }
};

/// M = left * diag(singular_values) * right^t with square orthogonal factors.
struct SvdFactorization {
  Matrix left_factor;
  std::vector<double> singular_values;
  Matrix right_factor;
};

/// Jacobi iteration controls shared by the eigenvalue and SVD routines.
struct JacobiOptions {
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
/// a^t * a.
Matrix gram(const Matrix& a);

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi.
SymmetricSpectrum symmetric_eigenvalues(const Matrix& s, const JacobiOptions& opts = {});

/// Eigenvalues of m^t m. Negative values above -1e-10 are clamped to zero.
SymmetricSpectrum gram_eigenvalues(const Matrix& m, const JacobiOptions& opts = {});

/// Full SVD by one-sided (Hestenes) Jacobi on the columns.
SvdFactorization svd(const Matrix& m, const JacobiOptions& opts = {});

/// Singular values only, non-increasing, length min(rows, cols).
std::vector<double> singular_values(const Matrix& m, const JacobiOptions& opts = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double norm2_squared(std::span<const double> v);
double norm1(std::span<const double> v);

}  // namespace ripkit
