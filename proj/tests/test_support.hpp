#pragma once

#include <cmath>
#include <cstdint>

#include "ripkit/linalg.hpp"
#include "ripkit/random.hpp"

namespace testing {

/// Matrix with independent standard normal entries.
inline ripkit::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  ripkit::Rng rng(seed);
  std::vector<double> e(rows * cols);
  for (double& x : e) x = rng.normal();
  return ripkit::Matrix(rows, cols, std::move(e));
}

inline double max_abs_diff(const ripkit::Matrix& a, const ripkit::Matrix& b) {
  double out = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out = std::max(out, std::abs(a(r, c) - b(r, c)));
  return out;
}

/// max |Q^t Q - I| entry.
inline double orthogonality_defect(const ripkit::Matrix& q) {
  const ripkit::Matrix g = ripkit::gram(q);
  double out = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      out = std::max(out, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return out;
}

}  // namespace testing
