#pragma once

#include <cstdint>
#include <optional>

#include "ripkit/random.hpp"

namespace ripkit {

/// c0(eps) = eps^2/4 - eps^3/6 for the gaussian and rademacher ensembles.
double c0_of(double epsilon);

/// 2 exp(-n c0(eps)).
double tail_bound(std::size_t n, double epsilon);

struct ConcentrationParams {
  double epsilon = 0.0;
  double c0 = 0.0;
};
ConcentrationParams concentration_params(double epsilon);

/// Monte Carlo frequency of |‖Φx‖² - ‖x‖²| >= eps ‖x‖².
struct TailEstimate {
  double epsilon = 0.0;
  std::size_t rows = 0;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double empirical_probability = 0.0;
  double theoretical_bound = 0.0;
  std::uint64_t seed = 0;
};

/// Each trial draws a fresh Φ with spec's law and shape and a unit vector x
/// uniform on the sphere; trial t uses derive_seed(seed, t), so spec.seed is
/// ignored and the result is independent of `workers`.
TailEstimate estimate_tail(const EnsembleSpec& spec, double epsilon, std::uint64_t trials,
                           std::uint64_t seed, unsigned workers = 1);

/// eps + eps1 (1 + eps), unchecked.
double composed_epsilon(double epsilon, double epsilon1) noexcept;

/// Estimate min(c0_eps, c0_eps1) - ln 2 / m of the composed exponent. May be
/// negative for small m, in which case the resulting bound is vacuous.
double compose_exponent(double c0_eps, double c0_eps1, std::size_t m);

struct CompositionParams {
  double epsilon = 0.0;
  double epsilon1 = 0.0;
  double epsilon3 = 0.0;
  bool epsilon3_below_one = false;
  /// compose_exponent(c0(eps), c0(eps1), rows_outer); with no rows_outer the
  /// m -> infinity limit min(c0(eps), c0(eps1)).
  double c0_prime_bound = 0.0;
  bool c0_prime_vacuous = false;
  std::size_t rows_outer = 0;
};

/// Both epsilons must lie in (0, 1/3).
CompositionParams compose_epsilons(double epsilon, double epsilon1,
                                   std::optional<std::size_t> rows_outer = std::nullopt);

/// Joint Monte Carlo of the composed map x -> A Φ x. Per trial, with y = Φx
/// for unit x: the Φ event |‖y‖² - 1| >= eps, the A event
/// |‖Ay‖² - ‖y‖²| >= eps1 ‖y‖², and the composed event |‖Ay‖² - 1| >= eps3.
struct CompositionTail {
  CompositionParams params;
  std::uint64_t trials = 0;
  std::uint64_t phi_failures = 0;
  std::uint64_t outer_failures = 0;
  std::uint64_t composed_failures = 0;
  std::uint64_t seed = 0;

  double phi_probability() const;
  double outer_probability() const;
  double composed_probability() const;
  /// Binomial standard error of the summed individual tails.
  double union_standard_error() const;
};

/// outer: law of A (rows m, cols must equal phi.rows).
CompositionTail estimate_composition_tail(const EnsembleSpec& outer, const EnsembleSpec& phi,
                                          double epsilon, double epsilon1,
                                          std::uint64_t trials, std::uint64_t seed,
                                          unsigned workers = 1);

struct OrderScan {
  /// Largest feasible k in [1, min(n, N-1)], 0 if none.
  std::size_t k = 0;
  /// k = N where ln(N/k) = 0: admitted only when N <= n, reported apart.
  bool full_order_edge = false;
};

/// Exhaustive scan of k <= c1 n / ln(N/k).
OrderScan scan_max_order(std::size_t n, std::size_t big_n, double c1);
std::size_t max_order(std::size_t n, std::size_t big_n, double c1);

struct DimensioningParams {
  std::size_t big_n = 0;
  std::size_t k = 0;
  double delta = 0.0;
  double t = 0.0;
  double c_cap = 1.0;
  double c1 = 0.5;
};

struct RowRequirement {
  /// Right side with the factor k on ln(e(1 + 12/delta)), as displayed.
  double corrected_bound = 0.0;
  std::size_t corrected_rows = 0;
  /// Same bound without that factor k.
  double uncorrected_bound = 0.0;
  std::size_t uncorrected_rows = 0;
};

/// n >= C delta^-2 [k (ln(N/k) + ln(e (1 + 12/delta))) + ln 2 + t].
RowRequirement required_rows(const DimensioningParams& params);

}  // namespace ripkit
