#include "ripkit/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "ripkit/error.hpp"
#include "ripkit/parallel.hpp"

namespace ripkit {

std::vector<double> soft_threshold(std::span<const double> v, double tau) {
  if (!(tau >= 0.0)) throw DomainError("soft_threshold: tau must be nonnegative");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - tau;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

double best_k_term_error(std::span<const double> x, std::size_t k) {
  if (k > x.size())
    throw DomainError("best_k_term_error: k = " + std::to_string(k) + " exceeds length " +
                      std::to_string(x.size()));
  std::vector<double> mags(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double tail = 0.0;
  for (std::size_t i = k; i < mags.size(); ++i) tail += mags[i];
  return tail;
}

namespace {

// Affine projection onto {x : Φx = y}: x = v - V Vᵗ v + x_min with V the
// right singular vectors spanning the row space and x_min = Φ⁺ y.
class AffineProjector {
 public:
  AffineProjector(const Matrix& phi, std::span<const double> y) {
    const SvdFactorization f = svd(phi);
    const std::size_t n = phi.rows();
    const std::size_t big_n = phi.cols();
    const double top = f.singular_values.front();
    const double bottom = f.singular_values.back();
    if (!(top > 0.0) || bottom <= 1e-10 * top)
      throw DomainError("solve_basis_pursuit: phi does not have full row rank");
    basis_.assign(n, std::vector<double>(big_n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < big_n; ++i) basis_[j][i] = f.right_factor(i, j);
    min_norm_.assign(big_n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double coef = 0.0;
      for (std::size_t r = 0; r < n; ++r) coef += f.left_factor(r, j) * y[r];
      coef /= f.singular_values[j];
      for (std::size_t i = 0; i < big_n; ++i) min_norm_[i] += coef * basis_[j][i];
    }
  }

  void apply(std::span<const double> v, std::vector<double>& out) const {
    out.assign(v.begin(), v.end());
    for (const auto& b : basis_) {
      const double c = dot(b, v);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * b[i];
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += min_norm_[i];
  }

 private:
  std::vector<std::vector<double>> basis_;
  std::vector<double> min_norm_;
};

double residual_norm(const Matrix& phi, std::span<const double> x, std::span<const double> y) {
  auto r = multiply(phi, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  return norm2(r);
}

}  // namespace

RecoveryResult solve_basis_pursuit(const Matrix& phi, std::span<const double> y,
                                   const SolverConfig& config) {
  if (y.size() != phi.rows())
    throw ShapeError("solve_basis_pursuit: y has length " + std::to_string(y.size()) +
                     " but phi has " + std::to_string(phi.rows()) + " rows");
  if (phi.rows() > phi.cols())
    throw ShapeError("solve_basis_pursuit: phi must have no more rows than columns");
  if (!(config.penalty_parameter > 0.0) || config.max_iterations < 1 ||
      !(config.primal_tolerance > 0.0) || !(config.dual_tolerance > 0.0))
    throw DomainError("solve_basis_pursuit: invalid solver configuration");

  const AffineProjector project(phi, y);
  const std::size_t big_n = phi.cols();
  const double rho = config.penalty_parameter;
  const double tau = 1.0 / rho;

  std::vector<double> x(big_n, 0.0);
  std::vector<double> z(big_n, 0.0);
  std::vector<double> u(big_n, 0.0);
  std::vector<double> shifted(big_n);

  RecoveryResult out;
  std::vector<double> best_x;
  double best_score = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t i = 0; i < big_n; ++i) shifted[i] = z[i] - u[i];
    project.apply(shifted, x);

    for (std::size_t i = 0; i < big_n; ++i) shifted[i] = x[i] + u[i];
    std::vector<double> z_next = soft_threshold(shifted, tau);

    double primal = 0.0;
    double dual = 0.0;
    for (std::size_t i = 0; i < big_n; ++i) {
      const double gap = x[i] - z_next[i];
      u[i] += gap;
      primal += gap * gap;
      const double step = z_next[i] - z[i];
      dual += step * step;
    }
    z = std::move(z_next);
    primal = std::sqrt(primal);
    dual = rho * std::sqrt(dual);

    const double primal_limit =
        config.primal_tolerance * std::max({1.0, norm2(x), norm2(z)});
    const double dual_limit = config.dual_tolerance * std::max(1.0, rho * norm2(u));
    const double score = std::max(primal / primal_limit, dual / dual_limit);
    if (score < best_score) {
      best_score = score;
      best_x = x;
      out.iterations_used = it;
    }
    if (score <= 1.0) break;
  }

  out.estimate = std::move(best_x);
  out.constraint_residual = residual_norm(phi, out.estimate, y);
  out.l1_value = norm1(out.estimate);
  out.converged = best_score <= 1.0 &&
                  out.constraint_residual <= config.primal_tolerance * std::max(1.0, norm2(y));
  return out;
}

RecoveryErrorRatio recovery_error_ratio(std::span<const double> x_true,
                                        std::span<const double> x_hat, std::size_t k) {
  if (x_true.size() != x_hat.size())
    throw ShapeError("recovery_error_ratio: signals differ in length");
  RecoveryErrorRatio out;
  double acc = 0.0;
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    const double d = x_true[i] - x_hat[i];
    acc += d * d;
  }
  out.l2_error = std::sqrt(acc);
  out.sigma_k = best_k_term_error(x_true, k);
  if (out.sigma_k > 0.0) {
    out.ratio = out.l2_error * std::sqrt(static_cast<double>(k)) / out.sigma_k;
  } else {
    out.exact_sparse = true;
  }
  return out;
}

std::vector<double> draw_sparse_signal(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<double> x(n, 0.0);
  for (std::size_t i : random_subset(rng, n, k)) {
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    x[i] = v;
  }
  return x;
}

RecoveryStatistics run_recovery_trials(const EnsembleSpec& phi_spec, std::size_t n_signal,
                                       std::size_t k, std::uint64_t trials, std::uint64_t seed,
                                       const SolverConfig& config, unsigned workers) {
  if (phi_spec.cols != n_signal)
    throw ShapeError("run_recovery_trials: phi has " + std::to_string(phi_spec.cols) +
                     " columns but the signal length is " + std::to_string(n_signal));
  if (k > n_signal) throw DomainError("run_recovery_trials: sparsity exceeds signal length");
  if (trials == 0) throw DomainError("run_recovery_trials: trials must be at least 1");

  RecoveryStatistics out;
  out.rows = phi_spec.rows;
  out.cols = n_signal;
  out.sparsity = k;
  out.trials = trials;
  out.seed = seed;
  out.per_trial.resize(trials);

  parallel_chunks(trials, resolve_workers(workers),
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t t = begin; t < end; ++t) {
                      const std::uint64_t trial_seed = derive_seed(seed, t);
                      EnsembleSpec draw = phi_spec;
                      draw.seed = derive_seed(trial_seed, 0);
                      const Matrix phi = draw_ensemble(draw);
                      Rng rng(derive_seed(trial_seed, 1));
                      const auto x = draw_sparse_signal(rng, n_signal, k);
                      const auto y = multiply(phi, x);
                      RecoveryTrial& rec = out.per_trial[t];
                      rec.trial = t;
                      rec.sigma_k = best_k_term_error(x, k);
                      try {
                        const RecoveryResult res = solve_basis_pursuit(phi, y, config);
                        rec.l2_error = recovery_error_ratio(x, res.estimate, k).l2_error;
                        rec.iterations = res.iterations_used;
                        rec.residual = res.constraint_residual;
                      } catch (const DomainError&) {
                        // Rank-deficient draw: no estimate, reported as a failed trial.
                        rec.l2_error = norm2(x);
                        rec.residual = norm2(y);
                      }
                      rec.success =
                          rec.l2_error <= kRecoverySuccessTolerance * std::max(1.0, norm2(x));
                    }
                  });

  double total = 0.0;
  for (const auto& rec : out.per_trial) {
    out.successes += rec.success ? 1 : 0;
    total += rec.l2_error;
    out.max_l2_error = std::max(out.max_l2_error, rec.l2_error);
  }
  out.success_rate = static_cast<double>(out.successes) / static_cast<double>(trials);
  out.mean_l2_error = total / static_cast<double>(trials);
  return out;
}

}  // namespace ripkit
