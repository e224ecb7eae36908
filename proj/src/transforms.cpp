#include "ripkit/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ripkit/concentration.hpp"
#include "ripkit/error.hpp"

namespace ripkit {

namespace {

void require_delta(double delta, const char* what) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw DomainError(std::string(what) + ": delta_k(phi) must lie in [0, 1)");
}

// Worst signed slack of the interval [lo, hi] inside [lower, upper].
double interval_slack(double lo, double hi, double lower, double upper) {
  return std::min(lo - lower, upper - hi);
}

struct SingularExtremes {
  double lambda_min = std::numeric_limits<double>::infinity();
  double lambda_max = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> arg_min;
  std::vector<std::size_t> arg_max;
  std::uint64_t count = 0;
};

// λ_k(B_T) and λ_1(B_T) extremes over all order-k supports of b's columns.
// When k exceeds b.rows() the smallest singular value of B_T is zero.
SingularExtremes scan_singular_extremes(const Matrix& b, std::size_t k, const RipOptions& opts) {
  const unsigned workers = resolve_workers(opts.workers);
  std::vector<SingularExtremes> partial(workers);
  const std::size_t chunks =
      for_each_support_chunk(b.cols(), k, workers, [&](std::size_t chunk, const auto& t) {
        SingularExtremes& acc = partial[chunk];
        const auto sv = singular_values(restrict_columns(b, t));
        const double smallest = k > b.rows() ? 0.0 : sv.back();
        ++acc.count;
        if (smallest < acc.lambda_min) {
          acc.lambda_min = smallest;
          acc.arg_min = t;
        }
        if (sv.front() > acc.lambda_max) {
          acc.lambda_max = sv.front();
          acc.arg_max = t;
        }
      });
  SingularExtremes total;
  for (std::size_t c = 0; c < chunks; ++c) {
    const auto& p = partial[c];
    total.count += p.count;
    if (p.count == 0) continue;
    if (p.lambda_min < total.lambda_min) {
      total.lambda_min = p.lambda_min;
      total.arg_min = p.arg_min;
    }
    if (p.lambda_max > total.lambda_max) {
      total.lambda_max = p.lambda_max;
      total.arg_max = p.arg_max;
    }
  }
  return total;
}

double bound_value(double delta_b, double delta_phi) noexcept {
  return delta_b + delta_phi * (1.0 + delta_b);
}

}  // namespace

EnvelopeReport make_envelope(std::size_t order, double lower, double upper) {
  EnvelopeReport out;
  out.order = order;
  out.lower = lower;
  out.upper = upper;
  const double sum = lower + upper;
  if (sum > 0.0) {
    out.rescale_c = std::sqrt(2.0 / sum);
    out.delta_effective = (upper - lower) / sum;
    out.rip_valid = out.delta_effective < 1.0 && lower > 0.0;
  }
  return out;
}

std::string_view to_string(LeftFailure f) noexcept {
  switch (f) {
    case LeftFailure::none:
      return "none";
    case LeftFailure::fewer_rows_than_columns:
      return "fewer_rows_than_columns";
    case LeftFailure::rank_deficient:
      return "rank_deficient";
  }
  return "unknown";
}

LeftProductAnalysis analyze_left_product(const Matrix& a, double delta_k_phi, std::size_t k) {
  require_delta(delta_k_phi, "analyze_left_product");
  if (k == 0) throw DomainError("analyze_left_product: order must be at least 1");
  LeftProductAnalysis out;
  out.gram_spectrum = gram_eigenvalues(a);
  const double sigma_1 = out.gram_spectrum.largest();
  const double sigma_n = out.gram_spectrum.smallest();
  if (a.rows() < a.cols())
    out.failure = LeftFailure::fewer_rows_than_columns;
  else if (sigma_n <= kRankTolerance)
    out.failure = LeftFailure::rank_deficient;
  out.full_column_rank = out.failure == LeftFailure::none;
  out.envelope = make_envelope(k, sigma_n * (1.0 - delta_k_phi), sigma_1 * (1.0 + delta_k_phi));
  if (!out.full_column_rank) out.envelope.rip_valid = false;
  return out;
}

VerificationRecord verify_left_envelope(const Matrix& a, const Matrix& phi, std::size_t k,
                                        const RipOptions& opts) {
  if (a.cols() != phi.rows())
    throw ShapeError("verify_left_envelope: A has " + std::to_string(a.cols()) +
                     " columns but phi has " + std::to_string(phi.rows()) + " rows");
  // Rank check first; the spectrum does not depend on delta.
  const LeftProductAnalysis left = analyze_left_product(a, 0.0, k);
  if (!left.full_column_rank)
    throw DomainError("verify_left_envelope: A is not full column rank (" +
                      std::string(to_string(left.failure)) + ")");
  const RipReport phi_report = exact_ric(phi, k, opts);

  // The inequality chain holds for any delta; with delta >= 1 the lower end
  // is nonpositive and only the upper end carries information.
  VerificationRecord out;
  out.lower = left.gram_spectrum.smallest() * (1.0 - phi_report.delta);
  out.upper = left.gram_spectrum.largest() * (1.0 + phi_report.delta);
  out.delta = phi_report.delta;

  const Matrix g = gram(multiply(a, phi));
  struct Worst {
    double slack = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> where;
    std::uint64_t count = 0;
  };
  const unsigned workers = resolve_workers(opts.workers);
  std::vector<Worst> partial(workers);
  const std::size_t chunks =
      for_each_support_chunk(phi.cols(), k, workers, [&](std::size_t chunk, const auto& t) {
        const auto spec = symmetric_eigenvalues(principal_submatrix(g, t));
        const double slack = interval_slack(spec.smallest(), spec.largest(), out.lower, out.upper);
        Worst& w = partial[chunk];
        ++w.count;
        if (slack < w.slack) {
          w.slack = slack;
          w.where = t;
        }
      });
  Worst total;
  for (std::size_t c = 0; c < chunks; ++c) {
    total.count += partial[c].count;
    if (partial[c].count && partial[c].slack < total.slack) {
      total.slack = partial[c].slack;
      total.where = partial[c].where;
    }
  }
  out.worst_slack = total.slack;
  out.witness = SupportSet(total.where);
  out.supports_examined = total.count;
  out.passed = out.worst_slack >= -kSlackTolerance;
  return out;
}

RightProductAnalysis analyze_right_product(const Matrix& b, double delta_k_phi, std::size_t k,
                                           const RipOptions& opts) {
  require_delta(delta_k_phi, "analyze_right_product");
  if (k == 0 || k >= b.rows())
    throw DomainError("analyze_right_product: the per-support SVD analysis assumes 1 <= k < N (N = " +
                      std::to_string(b.rows()) + ")");
  if (k > b.cols())
    throw DomainError("analyze_right_product: order exceeds the number of dictionary columns");
  check_support_budget(b.cols(), k, opts.budget, "analyze_right_product");

  const SingularExtremes ext = scan_singular_extremes(b, k, opts);
  RightProductAnalysis out;
  out.order = k;
  out.lambda_min = ext.lambda_min;
  out.lambda_max = ext.lambda_max;
  out.witness_min = SupportSet(ext.arg_min);
  out.witness_max = SupportSet(ext.arg_max);
  out.supports_examined = ext.count;
  out.envelope = make_envelope(k, ext.lambda_min * ext.lambda_min * (1.0 - delta_k_phi),
                               ext.lambda_max * ext.lambda_max * (1.0 + delta_k_phi));
  if (ext.lambda_min * ext.lambda_min <= kRankTolerance) out.envelope.rip_valid = false;
  return out;
}

ProbabilityBound union_probability(std::size_t q, std::size_t k, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("union_probability: p must lie in [0, 1]");
  if (k == 0 || k > q) throw DomainError("union_probability: requires 1 <= k <= q");
  ProbabilityBound out;
  out.q = q;
  out.k = k;
  out.p = p;
  if (p == 1.0) {
    out.bound = 1.0;
  } else {
    const double log_choose = std::lgamma(static_cast<double>(q) + 1.0) -
                              std::lgamma(static_cast<double>(k) + 1.0) -
                              std::lgamma(static_cast<double>(q - k) + 1.0);
    out.bound = 1.0 - std::exp(log_choose + std::log1p(-p));
  }
  out.vacuous = out.bound <= 0.0;
  out.clamped = std::clamp(out.bound, 0.0, 1.0);
  return out;
}

double concentration_probability(std::size_t n, double epsilon) {
  return std::max(0.0, 1.0 - tail_bound(n, epsilon));
}

DictionaryBound dictionary_bound(double delta_b, double delta_phi) {
  if (!(delta_b >= 0.0) || !std::isfinite(delta_b))
    throw DomainError("dictionary_bound: delta_k(B) must be nonnegative");
  require_delta(delta_phi, "dictionary_bound");
  DictionaryBound out;
  out.delta_b = delta_b;
  out.delta_phi = delta_phi;
  out.bound = bound_value(delta_b, delta_phi);
  out.admissible = delta_b > 0.0 && delta_b < 2.0 / (1.0 + delta_phi);
  return out;
}

LambdaWindowRecord lambda_window_check(const Matrix& b, std::size_t k, const RipOptions& opts) {
  const RipReport report = exact_ric(b, k, opts);
  const SingularExtremes ext = scan_singular_extremes(b, k, opts);
  LambdaWindowRecord out;
  out.delta_b = report.delta;
  out.lambda_min = ext.lambda_min;
  out.lambda_max = ext.lambda_max;
  out.supports_examined = ext.count;
  out.worst_slack = interval_slack(ext.lambda_min * ext.lambda_min, ext.lambda_max * ext.lambda_max,
                                   1.0 - report.delta, 1.0 + report.delta);
  out.passed = out.worst_slack >= -kSlackTolerance;
  return out;
}

DictionaryExperiment dictionary_experiment(const EnsembleSpec& phi_spec, const Matrix& b,
                                           std::size_t k, std::uint64_t trials,
                                           std::uint64_t seed, const RipOptions& opts) {
  if (phi_spec.cols != b.rows())
    throw ShapeError("dictionary_experiment: phi has " + std::to_string(phi_spec.cols) +
                     " columns but B has " + std::to_string(b.rows()) + " rows");
  if (trials == 0) throw DomainError("dictionary_experiment: trials must be at least 1");
  check_support_budget(phi_spec.cols, k, opts.budget, "dictionary_experiment");
  check_support_budget(b.cols(), k, opts.budget, "dictionary_experiment");

  RipOptions inner = opts;
  inner.workers = 1;
  DictionaryExperiment out;
  out.order = k;
  out.delta_b = exact_ric(b, k, inner).delta;
  out.trials = trials;
  out.seed = seed;
  out.per_trial.resize(trials);

  parallel_chunks(trials, resolve_workers(opts.workers),
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t t = begin; t < end; ++t) {
                      EnsembleSpec draw = phi_spec;
                      draw.seed = derive_seed(seed, t);
                      const Matrix phi = draw_ensemble(draw);
                      DictionaryTrial& rec = out.per_trial[t];
                      rec.delta_phi = exact_ric(phi, k, inner).delta;
                      rec.delta_product = exact_ric(multiply(phi, b), k, inner).delta;
                      rec.bound = bound_value(out.delta_b, rec.delta_phi);
                      rec.holds = rec.delta_product <= rec.bound + kBoundComparisonSlack;
                    }
                  });
  for (const auto& rec : out.per_trial) out.holds += rec.holds ? 1 : 0;
  out.pass_fraction = static_cast<double>(out.holds) / static_cast<double>(trials);
  out.half_width =
      1.96 * std::sqrt(out.pass_fraction * (1.0 - out.pass_fraction) / static_cast<double>(trials));
  return out;
}

Matrix concatenated_orthogonal_dictionary(std::size_t n, std::size_t extra, std::uint64_t seed) {
  if (extra == 0 || extra > n)
    throw DomainError("concatenated_orthogonal_dictionary: need 1 <= extra <= n");
  const Matrix g = draw_ensemble({EnsembleKind::gaussian, n, extra, seed});
  const SvdFactorization f = svd(g);
  Matrix out(n, n + extra);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = 1.0;
    for (std::size_t j = 0; j < extra; ++j) out(i, n + j) = f.left_factor(i, j);
  }
  return out;
}

}  // namespace ripkit
