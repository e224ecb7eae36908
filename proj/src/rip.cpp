#include "ripkit/rip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ripkit/error.hpp"
#include "ripkit/matrix_io.hpp"
#include "ripkit/random.hpp"

namespace ripkit {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

SupportSet::SupportSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
  if (indices_.empty()) throw DomainError("support must contain at least one index");
  for (std::size_t i = 1; i < indices_.size(); ++i)
    if (indices_[i] <= indices_[i - 1])
      throw DomainError("support indices must be strictly increasing");
}

std::string SupportSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(indices_[i]);
  }
  return out;
}

SupportSet SupportSet::parse(const std::string& text) {
  std::vector<std::size_t> idx;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find('+', pos), text.size());
    const std::string tok = text.substr(pos, next - pos);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("invalid support '" + text + "'");
    idx.push_back(std::stoull(tok));
    pos = next + 1;
  }
  return SupportSet(std::move(idx));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(result);
}

std::vector<std::size_t> unrank_support(std::size_t n, std::size_t k, std::uint64_t rank) {
  if (k == 0 || k > n) throw DomainError("support size must lie in [1, n]");
  if (rank >= binomial(n, k)) throw DomainError("support rank out of range");
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t candidate = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (;; ++candidate) {
      const std::uint64_t below = binomial(n - candidate - 1, k - i - 1);
      if (rank < below) break;
      rank -= below;
    }
    out.push_back(candidate++);
  }
  return out;
}

SupportCursor::SupportCursor(std::size_t n, std::size_t k, std::uint64_t start_rank)
    : n_(n), idx_(unrank_support(n, k, start_rank)) {}

bool SupportCursor::advance() noexcept {
  const std::size_t k = idx_.size();
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (idx_[i] < n_ - k + i) {
      ++idx_[i];
      for (std::size_t j = i + 1; j < k; ++j) idx_[j] = idx_[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<SupportSet> enumerate_supports(std::size_t n_cols, std::size_t k) {
  if (k == 0 || k > n_cols)
    throw DomainError("enumerate_supports: order " + std::to_string(k) + " outside [1, " +
                      std::to_string(n_cols) + "]");
  std::vector<SupportSet> out;
  out.reserve(binomial(n_cols, k));
  SupportCursor cursor(n_cols, k);
  do {
    out.emplace_back(cursor.current());
  } while (cursor.advance());
  return out;
}

void check_support_budget(std::size_t n_cols, std::size_t k, std::uint64_t budget,
                          const std::string& what) {
  const std::uint64_t count = binomial(n_cols, k);
  if (count > budget)
    throw BudgetError(what + ": C(" + std::to_string(n_cols) + ", " + std::to_string(k) +
                      ") = " + std::to_string(count) + " supports exceeds the budget of " +
                      std::to_string(budget) + "; use estimate_ric for a sampled lower bound");
}

Matrix restrict_columns(const Matrix& m, const std::vector<std::size_t>& t) {
  if (t.empty()) throw DomainError("restrict_columns: empty support");
  Matrix out(m.rows(), t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (t[j] >= m.cols())
      throw DomainError("restrict_columns: index " + std::to_string(t[j]) +
                        " out of range for " + std::to_string(m.cols()) + " columns");
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, j) = m(r, t[j]);
  }
  return out;
}

Matrix restrict_columns(const Matrix& m, const SupportSet& t) {
  return restrict_columns(m, t.indices());
}

Matrix principal_submatrix(const Matrix& s, const std::vector<std::size_t>& t) {
  Matrix out(t.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) out(i, j) = s(t[i], t[j]);
  return out;
}

double isometry_defect(double min_eigenvalue, double max_eigenvalue) noexcept {
  return std::max(max_eigenvalue - 1.0, 1.0 - min_eigenvalue);
}

namespace {

void check_order(const Matrix& m, std::size_t k, const char* what) {
  if (m.empty()) throw ShapeError(std::string(what) + ": empty matrix");
  if (k == 0 || k > m.cols())
    throw DomainError(std::string(what) + ": order " + std::to_string(k) + " outside [1, " +
                      std::to_string(m.cols()) + "]");
}

struct Extremes {
  double min_ev = std::numeric_limits<double>::infinity();
  double max_ev = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> arg_min;
  std::vector<std::size_t> arg_max;
  std::uint64_t count = 0;
};

}  // namespace

RipReport exact_ric(const Matrix& m, std::size_t k, const RipOptions& opts) {
  check_order(m, k, "exact_ric");
  check_support_budget(m.cols(), k, opts.budget, "exact_ric");

  const Matrix g = gram(m);
  const unsigned workers = resolve_workers(opts.workers);
  std::vector<Extremes> partial(workers);
  const std::size_t chunks =
      for_each_support_chunk(m.cols(), k, workers, [&](std::size_t chunk, const auto& t) {
        Extremes& acc = partial[chunk];
        const SymmetricSpectrum spec = symmetric_eigenvalues(principal_submatrix(g, t));
        ++acc.count;
        // Strict comparisons keep the first (lexicographically smallest) extremum.
        if (spec.smallest() < acc.min_ev) {
          acc.min_ev = spec.smallest();
          acc.arg_min = t;
        }
        if (spec.largest() > acc.max_ev) {
          acc.max_ev = spec.largest();
          acc.arg_max = t;
        }
      });

  Extremes total;
  for (std::size_t c = 0; c < chunks; ++c) {
    const Extremes& p = partial[c];
    total.count += p.count;
    if (p.count == 0) continue;
    if (p.min_ev < total.min_ev) {
      total.min_ev = p.min_ev;
      total.arg_min = p.arg_min;
    }
    if (p.max_ev > total.max_ev) {
      total.max_ev = p.max_ev;
      total.arg_max = p.arg_max;
    }
  }

  RipReport out;
  out.order = k;
  out.min_eigenvalue = total.min_ev;
  out.max_eigenvalue = total.max_ev;
  out.delta = isometry_defect(total.min_ev, total.max_ev);
  out.witness_min = SupportSet(total.arg_min);
  out.witness_max = SupportSet(total.arg_max);
  out.supports_examined = total.count;
  return out;
}

RicEstimate estimate_ric(const Matrix& m, std::size_t k, std::uint64_t trials,
                         std::uint64_t seed, unsigned workers) {
  check_order(m, k, "estimate_ric");
  if (trials == 0) throw DomainError("estimate_ric: trials must be at least 1");
  const Matrix g = gram(m);
  const unsigned w = resolve_workers(workers);
  std::vector<double> partial(w, 0.0);
  parallel_chunks(trials, w, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    double best = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed, t));
      const auto support = random_subset(rng, m.cols(), k);
      const SymmetricSpectrum spec = symmetric_eigenvalues(principal_submatrix(g, support));
      best = std::max(best, isometry_defect(spec.smallest(), spec.largest()));
    }
    partial[chunk] = best;
  });
  RicEstimate out;
  out.order = k;
  out.delta_lower_bound = *std::max_element(partial.begin(), partial.end());
  out.trials = trials;
  out.seed = seed;
  return out;
}

RipReport scaled_ric(const RipReport& report, double c) {
  if (c == 0.0 || !std::isfinite(c)) throw DomainError("scaled_ric: scale must be nonzero and finite");
  RipReport out = report;
  const double c2 = c * c;
  out.min_eigenvalue = c2 * report.min_eigenvalue;
  out.max_eigenvalue = c2 * report.max_eigenvalue;
  out.delta = isometry_defect(out.min_eigenvalue, out.max_eigenvalue);
  return out;
}

std::string to_key_value(const RipReport& r) {
  std::ostringstream out;
  out << "order=" << r.order << '\n'
      << "delta=" << format_real(r.delta) << '\n'
      << "min_eig=" << format_real(r.min_eigenvalue) << '\n'
      << "max_eig=" << format_real(r.max_eigenvalue) << '\n'
      << "witness_min=" << r.witness_min.to_string() << '\n'
      << "witness_max=" << r.witness_max.to_string() << '\n'
      << "supports_examined=" << r.supports_examined << '\n';
  return out.str();
}

std::string rip_csv_header() {
  return "order,delta,min_eig,max_eig,witness_min,witness_max,supports_examined";
}

std::string to_csv_row(const RipReport& r) {
  return std::to_string(r.order) + ',' + format_real(r.delta) + ',' +
         format_real(r.min_eigenvalue) + ',' + format_real(r.max_eigenvalue) + ',' +
         r.witness_min.to_string() + ',' + r.witness_max.to_string() + ',' +
         std::to_string(r.supports_examined);
}

}  // namespace ripkit
