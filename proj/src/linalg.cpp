#include "ripkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ripkit/error.hpp"

namespace ripkit {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_nonempty(const Matrix& m, const char* what) {
  if (m.empty()) throw ShapeError(std::string(what) + ": empty matrix");
}

// Columns of a matrix held contiguously, for the one-sided Jacobi sweeps.
using Columns = std::vector<std::vector<double>>;

Columns to_columns(const Matrix& m) {
  Columns cols(m.cols(), std::vector<double>(m.rows()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) cols[c][r] = m(r, c);
  return cols;
}

Matrix from_columns(const Columns& cols) {
  const std::size_t n_rows = cols.front().size();
  Matrix out(n_rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < n_rows; ++r) out(r, c) = cols[c][r];
  return out;
}

void rotate(std::vector<double>& p, std::vector<double>& q, double c, double s) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p[i];
    const double b = q[i];
    p[i] = c * a - s * b;
    q[i] = s * a + c * b;
  }
}

// Hestenes iteration: on return work has mutually orthogonal columns and
// work = m * right. Requires m.rows() >= m.cols().
void one_sided_jacobi(Columns& work, Columns* right, const JacobiOptions& opts) {
  const std::size_t n = work.size();
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norm2_squared(work[p]);
        const double beta = norm2_squared(work[q]);
        const double gamma = dot(work[p], work[q]);
        if (gamma == 0.0 || std::abs(gamma) <= opts.tolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        rotate(work[p], work[q], c, s);
        if (right) rotate((*right)[p], (*right)[q], c, s);
      }
    }
    if (!rotated) return;
  }
}

// Orthogonalizes v against basis (two Gram-Schmidt passes) and normalizes it.
// Returns false when v is numerically inside span(basis).
bool orthonormalize_against(std::vector<double>& v, const Columns& basis) {
  const double initial = norm2(v);
  if (initial == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      const double proj = dot(v, b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * b[i];
    }
  }
  const double remaining = norm2(v);
  if (remaining < 0.5 * initial) return false;
  for (double& x : v) x /= remaining;
  return true;
}

// Standard basis vector with the largest component outside span(basis),
// orthonormalized against it. Some e_i always retains at least 1/sqrt(dim).
std::vector<double> best_completion(const Columns& basis, std::size_t dim) {
  std::vector<double> best;
  double best_norm = -1.0;
  for (std::size_t e = 0; e < dim; ++e) {
    std::vector<double> cand(dim, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        const double proj = dot(cand, b);
        for (std::size_t i = 0; i < dim; ++i) cand[i] -= proj * b[i];
      }
    const double n = norm2(cand);
    if (n > best_norm) {
      best_norm = n;
      best = std::move(cand);
    }
  }
  for (double& x : best) x /= best_norm;
  return best;
}

// SVD for rows >= cols.
SvdFactorization tall_svd(const Matrix& m, const JacobiOptions& opts) {
  const std::size_t n_rows = m.rows();
  const std::size_t n_cols = m.cols();
  Columns work = to_columns(m);
  Columns right(n_cols, std::vector<double>(n_cols, 0.0));
  for (std::size_t i = 0; i < n_cols; ++i) right[i][i] = 1.0;
  one_sided_jacobi(work, &right, opts);

  std::vector<double> norms(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) norms[j] = norm2(work[j]);
  std::vector<std::size_t> order(n_cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  SvdFactorization out;
  out.singular_values.reserve(n_cols);
  Columns left;
  left.reserve(n_rows);
  Columns sorted_right;
  sorted_right.reserve(n_cols);
  for (std::size_t j : order) {
    out.singular_values.push_back(norms[j]);
    sorted_right.push_back(right[j]);
    std::vector<double> u = work[j];
    if (norms[j] > 0.0) {
      for (double& x : u) x /= norms[j];
      if (orthonormalize_against(u, left)) {
        left.push_back(std::move(u));
        continue;
      }
    }
    // Zero or numerically dependent direction: fill from the standard basis.
    left.push_back(best_completion(left, n_rows));
  }
  while (left.size() < n_rows) left.push_back(best_completion(left, n_rows));
  out.left_factor = from_columns(left);
  out.right_factor = from_columns(sorted_right);
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), entries_(rows * cols, value) {
  if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
  if (!std::isfinite(value)) throw DomainError("matrix entries must be finite");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw ShapeError("matrix dimensions must be positive");
  if (entries_.size() != rows * cols)
    throw ShapeError("matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                     std::to_string(rows * cols) + " entries, got " +
                     std::to_string(entries_.size()));
  for (double x : entries_)
    if (!std::isfinite(x)) throw DomainError("matrix entries must be finite");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  if (rows_ == 0 || cols_ == 0) throw ShapeError("matrix dimensions must be positive");
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("ragged matrix literal");
    for (double x : r) {
      if (!std::isfinite(x)) throw DomainError("matrix entries must be finite");
      entries_.push_back(x);
    }
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix out(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) out(i, i) = diag[i];
  return out;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

Matrix Matrix::scaled(double c) const {
  std::vector<double> e(entries_);
  for (double& x : e) x *= c;
  return Matrix(rows_, cols_, std::move(e));
}

double Matrix::max_abs() const noexcept {
  double out = 0.0;
  for (double x : entries_) out = std::max(out, std::abs(x));
  return out;
}

double Matrix::frobenius_norm_squared() const noexcept { return norm2_squared(entries_); }

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("multiply: cannot multiply " + shape_of(a) + " by " + shape_of(b));
  std::vector<double> out(a.rows() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = out.data() + i * b.cols();
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = a(i, l);
      if (ail == 0.0) continue;
      const auto brow = b.row(l);
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += ail * brow[j];
    }
  }
  return Matrix(a.rows(), b.cols(), std::move(out));
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size())
    throw ShapeError("multiply: " + shape_of(a) + " matrix with vector of length " +
                     std::to_string(x.size()));
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(a.row(i), x);
  return out;
}

Matrix gram(const Matrix& a) {
  require_nonempty(a, "gram");
  const std::size_t n = a.cols();
  Matrix out(n, n);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t i = 0; i < n; ++i) {
      if (row[i] == 0.0) continue;
      for (std::size_t j = i; j < n; ++j) out(i, j) += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  return out;
}

SymmetricSpectrum symmetric_eigenvalues(const Matrix& s, const JacobiOptions& opts) {
  require_nonempty(s, "symmetric_eigenvalues");
  if (s.rows() != s.cols())
    throw ShapeError("symmetric_eigenvalues: matrix " + shape_of(s) + " is not square");
  const std::size_t n = s.rows();
  Matrix a = s;
  const double scale = std::sqrt(a.frobenius_norm_squared());

  for (int sweep = 0; sweep < opts.max_sweeps && scale > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= opts.tolerance * scale) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  SymmetricSpectrum out;
  out.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = a(i, i);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
  return out;
}

SymmetricSpectrum gram_eigenvalues(const Matrix& m, const JacobiOptions& opts) {
  SymmetricSpectrum out = symmetric_eigenvalues(gram(m), opts);
  for (double& ev : out.eigenvalues)
    if (ev < 0.0 && ev >= -1e-10) ev = 0.0;
  return out;
}

SvdFactorization svd(const Matrix& m, const JacobiOptions& opts) {
  require_nonempty(m, "svd");
  if (m.rows() >= m.cols()) return tall_svd(m, opts);
  SvdFactorization t = tall_svd(m.transposed(), opts);
  return {std::move(t.right_factor), std::move(t.singular_values), std::move(t.left_factor)};
}

std::vector<double> singular_values(const Matrix& m, const JacobiOptions& opts) {
  require_nonempty(m, "singular_values");
  Columns work = to_columns(m.rows() >= m.cols() ? m : m.transposed());
  one_sided_jacobi(work, nullptr, opts);
  std::vector<double> out(work.size());
  for (std::size_t j = 0; j < work.size(); ++j) out[j] = norm2(work[j]);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2_squared(std::span<const double> v) { return dot(v, v); }

double norm2(std::span<const double> v) { return std::sqrt(norm2_squared(v)); }

double norm1(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

}  // namespace ripkit
