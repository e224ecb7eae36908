#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ripkit/linalg.hpp"
#include "ripkit/parallel.hpp"

namespace ripkit {

/// Strictly increasing, non-empty list of column indices.
class SupportSet {
 public:
  SupportSet() = default;
  /// Throws DomainError unless indices are non-empty and strictly increasing.
  explicit SupportSet(std::vector<std::size_t> indices);

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  std::size_t operator[](std::size_t i) const noexcept { return indices_[i]; }

  /// '+'-joined indices, e.g. "0+3+4".
  std::string to_string() const;
  static SupportSet parse(const std::string& text);

  friend auto operator<=>(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> indices_;
};

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

/// Lexicographic walk over the k-subsets of [0, n).
class SupportCursor {
 public:
  /// Positions on the subset of lexicographic rank `start_rank`.
  SupportCursor(std::size_t n, std::size_t k, std::uint64_t start_rank = 0);

  const std::vector<std::size_t>& current() const noexcept { return idx_; }
  /// Moves to the next subset; false once the last one has been passed.
  bool advance() noexcept;

 private:
  std::size_t n_;
  std::vector<std::size_t> idx_;
};

/// k-subset of [0, n) at lexicographic position `rank`.
std::vector<std::size_t> unrank_support(std::size_t n, std::size_t k, std::uint64_t rank);

/// All C(n_cols, k) supports in lexicographic order. Intended for small cases;
/// large scans go through for_each_support_chunk.
std::vector<SupportSet> enumerate_supports(std::size_t n_cols, std::size_t k);

/// Throws BudgetError when C(n_cols, k) exceeds the budget.
void check_support_budget(std::size_t n_cols, std::size_t k, std::uint64_t budget,
                          const std::string& what);

/// Visits every k-subset of [0, n_cols), partitioned by rank into at most
/// `workers` contiguous chunks: visit(chunk, indices). Returns chunk count.
template <class Visit>
std::size_t for_each_support_chunk(std::size_t n_cols, std::size_t k, unsigned workers,
                                   Visit&& visit) {
  const std::uint64_t total = binomial(n_cols, k);
  return parallel_chunks(total, workers, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    if (begin == end) return;
    SupportCursor cursor(n_cols, k, begin);
    for (std::size_t r = begin; r < end; ++r) {
      visit(chunk, cursor.current());
      cursor.advance();
    }
  });
}

/// Matrix made of columns t[0], t[1], ... of m.
Matrix restrict_columns(const Matrix& m, const SupportSet& t);
Matrix restrict_columns(const Matrix& m, const std::vector<std::size_t>& t);

/// Principal submatrix s[t, t] of a square matrix.
Matrix principal_submatrix(const Matrix& s, const std::vector<std::size_t>& t);

struct RipOptions {
  std::uint64_t budget = 10'000'000;
  /// 0 = hardware concurrency.
  unsigned workers = 1;
};

/// Exact restricted isometry data of one matrix at order k.
struct RipReport {
  std::size_t order = 0;
  double delta = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  SupportSet witness_min;
  SupportSet witness_max;
  std::uint64_t supports_examined = 0;
};

/// delta_k by enumeration of all supports of size exactly k. Extremes over
/// |T| <= k are attained at |T| = k by eigenvalue interlacing. Witnesses are
/// the lexicographically smallest extremal supports.
RipReport exact_ric(const Matrix& m, std::size_t k, const RipOptions& opts = {});

struct RicEstimate {
  std::size_t order = 0;
  double delta_lower_bound = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

/// Lower bound on delta_k from `trials` uniformly drawn supports.
RicEstimate estimate_ric(const Matrix& m, std::size_t k, std::uint64_t trials,
                         std::uint64_t seed, unsigned workers = 1);

/// Report of c*m derived from the report of m (eigenvalues scale by c^2).
RipReport scaled_ric(const RipReport& report, double c);

/// max(lambda_max - 1, 1 - lambda_min).
double isometry_defect(double min_eigenvalue, double max_eigenvalue) noexcept;

std::string to_key_value(const RipReport& r);
std::string rip_csv_header();
std::string to_csv_row(const RipReport& r);

}  // namespace ripkit
