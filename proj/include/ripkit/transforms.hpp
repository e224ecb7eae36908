#pragma once

#include <cstdint>
#include <string>

#include "ripkit/linalg.hpp"
#include "ripkit/random.hpp"
#include "ripkit/rip.hpp"

namespace ripkit {

/// Eigenvalues of A^t A at or below this value count as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Two-sided quadratic-form envelope L‖z‖² <= ‖M_T z‖² <= U‖z‖² over all
/// order-k supports, and the symmetric RIP form it maps to after scaling M
/// by rescale_c (c² = 2/(L+U)).
struct EnvelopeReport {
  std::size_t order = 0;
  double lower = 0.0;
  double upper = 0.0;
  double rescale_c = 0.0;
  double delta_effective = 1.0;
  bool rip_valid = false;
};

EnvelopeReport make_envelope(std::size_t order, double lower, double upper);

enum class LeftFailure { none, fewer_rows_than_columns, rank_deficient };
std::string_view to_string(LeftFailure f) noexcept;

struct LeftProductAnalysis {
  /// Eigenvalues σ_1 >= ... >= σ_n of A^t A (not singular values of A).
  SymmetricSpectrum gram_spectrum;
  bool full_column_rank = false;
  LeftFailure failure = LeftFailure::none;
  EnvelopeReport envelope;
};

/// Envelope [σ_n (1 - δ), σ_1 (1 + δ)] for AΦ given δ = δ_k(Φ). Rank
/// deficiency (including m < n) is reported, not thrown.
LeftProductAnalysis analyze_left_product(const Matrix& a, double delta_k_phi, std::size_t k);

/// Outcome of a deterministic per-support envelope check. Slack is the
/// smallest signed distance of any support eigenvalue inside [lower, upper].
struct VerificationRecord {
  bool passed = false;
  double lower = 0.0;
  double upper = 0.0;
  double worst_slack = 0.0;
  SupportSet witness;
  std::uint64_t supports_examined = 0;
  double delta = 0.0;
};

inline constexpr double kSlackTolerance = 1e-9;

/// Computes δ_k(Φ) exactly, then checks every order-k support of AΦ against
/// the envelope [σ_n (1 - δ), σ_1 (1 + δ)], for any δ. Throws DomainError if
/// A is rank deficient.
VerificationRecord verify_left_envelope(const Matrix& a, const Matrix& phi, std::size_t k,
                                        const RipOptions& opts = {});

struct RightProductAnalysis {
  std::size_t order = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  SupportSet witness_min;
  SupportSet witness_max;
  EnvelopeReport envelope;
  std::uint64_t supports_examined = 0;
};

/// Singular-value extremes of B_T over order-k supports of B's columns and
/// the envelope [λ_min² (1 - δ), λ_max² (1 + δ)] of ΦB. Requires k < N.
RightProductAnalysis analyze_right_product(const Matrix& b, double delta_k_phi, std::size_t k,
                                           const RipOptions& opts = {});

struct ProbabilityBound {
  std::size_t q = 0;
  std::size_t k = 0;
  double p = 0.0;
  double bound = 0.0;
  double clamped = 0.0;
  bool vacuous = false;
};

/// 1 - C(q, k)(1 - p), binomial in log space.
ProbabilityBound union_probability(std::size_t q, std::size_t k, double p);

/// Per-support success probability 1 - 2 exp(-n c0(eps)) implied by
/// concentration; the default p for union_probability.
double concentration_probability(std::size_t n, double epsilon);

struct DictionaryBound {
  double delta_b = 0.0;
  double delta_phi = 0.0;
  double bound = 0.0;
  /// δ_B in the open window (0, 2/(1 + δ_Φ)).
  bool admissible = false;
};

/// δ_B + δ_Φ (1 + δ_B); the same form bounds random and redundant dictionaries.
DictionaryBound dictionary_bound(double delta_b, double delta_phi);

struct LambdaWindowRecord {
  double delta_b = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double worst_slack = 0.0;
  bool passed = false;
  std::uint64_t supports_examined = 0;
};

/// Checks 1 - δ_k(B) <= λ_min² <= λ_max² <= 1 + δ_k(B) with per-support SVDs.
LambdaWindowRecord lambda_window_check(const Matrix& b, std::size_t k,
                                       const RipOptions& opts = {});

struct DictionaryTrial {
  double delta_phi = 0.0;
  double delta_product = 0.0;
  double bound = 0.0;
  bool holds = false;
};

struct DictionaryExperiment {
  std::size_t order = 0;
  double delta_b = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t holds = 0;
  double pass_fraction = 0.0;
  /// 95% normal-approximation half-width of pass_fraction.
  double half_width = 0.0;
  std::uint64_t seed = 0;
  std::vector<DictionaryTrial> per_trial;
};

/// Absolute slack allowed when comparing δ_k(ΦB) with the bound.
inline constexpr double kBoundComparisonSlack = 1e-12;

/// Frequency with which δ_k(ΦB) <= δ_B + δ_Φ (1 + δ_B) over fresh draws of Φ.
DictionaryExperiment dictionary_experiment(const EnsembleSpec& phi_spec, const Matrix& b,
                                           std::size_t k, std::uint64_t trials,
                                           std::uint64_t seed, const RipOptions& opts = {});

/// [I_N | H] where H has `extra` orthonormal columns from a seeded gaussian
/// draw; every column has unit norm.
Matrix concatenated_orthogonal_dictionary(std::size_t n, std::size_t extra, std::uint64_t seed);

}  // namespace ripkit
