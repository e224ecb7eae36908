#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ripkit/linalg.hpp"
#include "ripkit/random.hpp"

namespace ripkit {

/// sign(v_i) max(|v_i| - tau, 0), the proximal map of tau‖·‖₁.
std::vector<double> soft_threshold(std::span<const double> v, double tau);

/// ℓ1 mass of x outside its k largest-magnitude entries.
double best_k_term_error(std::span<const double> x, std::size_t k);

struct SolverConfig {
  double penalty_parameter = 1.0;
  int max_iterations = 5000;
  double primal_tolerance = 1e-7;
  double dual_tolerance = 1e-7;
};

struct RecoveryResult {
  std::vector<double> estimate;
  int iterations_used = 0;
  /// ‖Φx̂ - y‖₂.
  double constraint_residual = 0.0;
  bool converged = false;
  double l1_value = 0.0;
};

/// min ‖x‖₁ subject to Φx = y by ADMM on the splitting x = z: the x-step
/// projects onto {Φx = y} with the pseudo-inverse taken from one SVD of Φ,
/// the z-step soft-thresholds, then the scaled dual accumulates x - z.
/// Requires Φ with full row rank (n <= N).
RecoveryResult solve_basis_pursuit(const Matrix& phi, std::span<const double> y,
                                   const SolverConfig& config = {});

struct RecoveryErrorRatio {
  double l2_error = 0.0;
  double sigma_k = 0.0;
  /// l2_error sqrt(k) / sigma_k; zero in the exact-sparse case.
  double ratio = 0.0;
  bool exact_sparse = false;
};

RecoveryErrorRatio recovery_error_ratio(std::span<const double> x_true,
                                        std::span<const double> x_hat, std::size_t k);

/// Relative error below which a trial counts as recovered.
inline constexpr double kRecoverySuccessTolerance = 1e-4;

struct RecoveryTrial {
  std::size_t trial = 0;
  bool success = false;
  double l2_error = 0.0;
  double sigma_k = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct RecoveryStatistics {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t sparsity = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double mean_l2_error = 0.0;
  double max_l2_error = 0.0;
  std::uint64_t seed = 0;
  std::vector<RecoveryTrial> per_trial;
};

/// Exactly k-sparse signal of length n: support uniform, nonzeros N(0, 1).
std::vector<double> draw_sparse_signal(Rng& rng, std::size_t n, std::size_t k);

/// Per trial t (seed derive_seed(seed, t)): draw Φ, a k-sparse x, solve from
/// y = Φx and record success ‖x̂ - x‖₂ <= 1e-4 max(1, ‖x‖₂).
RecoveryStatistics run_recovery_trials(const EnsembleSpec& phi_spec, std::size_t n_signal,
                                       std::size_t k, std::uint64_t trials, std::uint64_t seed,
                                       const SolverConfig& config = {}, unsigned workers = 1);

}  // namespace ripkit
