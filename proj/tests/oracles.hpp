#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the Jacobi routines, the support cursor or the ADMM solver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "ripkit/linalg.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const ripkit::Matrix& m) {
  Dense out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

inline Dense naive_multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size(), inner = b.size(), m = b.front().size();
  Dense out(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < inner; ++l) acc += a[i][l] * b[l][j];
      out[i][j] = acc;
    }
  return out;
}

inline Dense naive_gram(const Dense& a) {
  const std::size_t n = a.front().size();
  Dense out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& row : a) out[i][j] += row[i] * row[j];
  return out;
}

inline Dense columns_of(const Dense& a, const std::vector<std::size_t>& t) {
  Dense out(a.size(), std::vector<double>(t.size()));
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t j = 0; j < t.size(); ++j) out[r][j] = a[r][t[j]];
  return out;
}

/// Number of eigenvalues of symmetric s strictly below x, from the inertia of
/// the LDL^t factorization of s - xI (signs of the characteristic-polynomial
/// minor sequence).
inline std::size_t count_below(const Dense& s, double x) {
  const std::size_t n = s.size();
  Dense a = s;
  for (std::size_t i = 0; i < n; ++i) a[i][i] -= x;
  std::size_t negatives = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double pivot = a[k][k];
    if (pivot == 0.0) pivot = -1e-300;
    if (pivot < 0.0) ++negatives;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / pivot;
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return negatives;
}

/// All eigenvalues of symmetric s by bisection on the Sturm count, descending.
inline std::vector<double> bisection_eigenvalues(const Dense& s) {
  const std::size_t n = s.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::abs(s[i][j]);
    lo = std::min(lo, s[i][i] - r);
    hi = std::max(hi, s[i][i] + r);
  }
  lo -= 1.0;
  hi += 1.0;
  std::vector<double> out;
  for (std::size_t idx = 0; idx < n; ++idx) {
    // idx-th smallest eigenvalue: smallest x with count_below(x) > idx.
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (count_below(s, mid) > idx)
        b = mid;
      else
        a = mid;
    }
    out.push_back(0.5 * (a + b));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Solves a x = b by Gaussian elimination with partial pivoting.
inline std::optional<std::vector<double>> solve(Dense a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (a[p][k] == 0.0) return std::nullopt;
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
    x[i] = acc / a[i][i];
  }
  return x;
}

inline std::vector<double> matvec(const Dense& a, const std::vector<double>& x) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  return out;
}

inline double rayleigh(const Dense& s, const std::vector<double>& v) {
  const auto sv = matvec(s, v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num += v[i] * sv[i];
    den += v[i] * v[i];
  }
  return num / den;
}

inline void normalize(std::vector<double>& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
}

/// Extreme eigenvalue of symmetric s by power iteration on s (largest) or on
/// cI - s (smallest), then polished by Rayleigh-quotient iteration.
inline double power_extreme(const Dense& s, bool largest) {
  const std::size_t n = s.size();
  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::abs(s[i][j]);
    shift = std::max(shift, r);
  }
  Dense op = s;
  if (!largest)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) op[i][j] = (i == j ? shift : 0.0) - s[i][j];
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i) + 0.01 * i * i;
  normalize(v);
  for (int it = 0; it < 2000; ++it) {
    v = matvec(op, v);
    normalize(v);
  }
  double mu = rayleigh(s, v);
  for (int it = 0; it < 6; ++it) {
    Dense shifted = s;
    for (std::size_t i = 0; i < n; ++i) shifted[i][i] -= mu;
    auto w = solve(shifted, v);
    if (!w) break;
    double norm = 0.0;
    for (double x : *w) norm += x * x;
    if (!std::isfinite(norm) || norm == 0.0) break;
    v = *w;
    normalize(v);
    mu = rayleigh(s, v);
  }
  return mu;
}

/// Pascal-triangle binomial coefficient.
inline std::uint64_t pascal_binomial(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::uint64_t>> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i].assign(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return k > n ? 0 : t[n][k];
}

/// Every k-subset of [0, n) by recursive inclusion/exclusion.
inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out,
                    std::vector<std::size_t>& cur, std::size_t start = 0) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, out, cur, i + 1);
    cur.pop_back();
  }
}

inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  subsets(n, k, out, cur);
  return out;
}

struct BasisPursuitOptimum {
  std::vector<double> x;
  double l1 = std::numeric_limits<double>::infinity();
};

/// Exact minimizer of ‖x‖₁ s.t. Φx = y on small instances: the optimum of the
/// equivalent linear program sits at a basic solution, i.e. on a support of
/// linearly independent columns of size <= rows. Each support is solved by
/// normal equations and kept if it reproduces y.
inline BasisPursuitOptimum basis_pursuit_by_supports(const Dense& phi, const std::vector<double>& y,
                                                     std::size_t max_support) {
  const std::size_t big_n = phi.front().size();
  double y_norm = 0.0;
  for (double v : y) y_norm += v * v;
  y_norm = std::sqrt(y_norm);
  BasisPursuitOptimum best;
  bool all_zero = y_norm == 0.0;
  if (all_zero) {
    best.x.assign(big_n, 0.0);
    best.l1 = 0.0;
    return best;
  }
  for (std::size_t s = 1; s <= max_support; ++s) {
    for (const auto& t : all_subsets(big_n, s)) {
      const Dense sub = columns_of(phi, t);
      const Dense g = naive_gram(sub);
      std::vector<double> rhs(s, 0.0);
      for (std::size_t j = 0; j < s; ++j)
        for (std::size_t r = 0; r < y.size(); ++r) rhs[j] += sub[r][j] * y[r];
      auto coef = solve(g, rhs);
      if (!coef) continue;
      const auto fit = matvec(sub, *coef);
      double res = 0.0;
      for (std::size_t r = 0; r < y.size(); ++r) res += (fit[r] - y[r]) * (fit[r] - y[r]);
      if (std::sqrt(res) > 1e-9 * std::max(1.0, y_norm)) continue;
      double l1 = 0.0;
      for (double c : *coef) l1 += std::abs(c);
      if (l1 < best.l1 - 1e-12) {
        best.l1 = l1;
        best.x.assign(big_n, 0.0);
        for (std::size_t j = 0; j < s; ++j) best.x[t[j]] = (*coef)[j];
      }
    }
  }
  return best;
}

}  // namespace oracle
