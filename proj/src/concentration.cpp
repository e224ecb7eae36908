#include "ripkit/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ripkit/error.hpp"
#include "ripkit/parallel.hpp"

namespace ripkit {

namespace {

void require_open_unit(double epsilon, const char* what) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError(std::string(what) + ": epsilon must lie in (0, 1), got " +
                      std::to_string(epsilon));
}

double frequency(std::uint64_t hits, std::uint64_t trials) {
  return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
}

}  // namespace

double c0_of(double epsilon) {
  require_open_unit(epsilon, "c0_of");
  return epsilon * epsilon / 4.0 - epsilon * epsilon * epsilon / 6.0;
}

double tail_bound(std::size_t n, double epsilon) {
  if (n == 0) throw DomainError("tail_bound: n must be at least 1");
  return 2.0 * std::exp(-static_cast<double>(n) * c0_of(epsilon));
}

ConcentrationParams concentration_params(double epsilon) { return {epsilon, c0_of(epsilon)}; }

TailEstimate estimate_tail(const EnsembleSpec& spec, double epsilon, std::uint64_t trials,
                           std::uint64_t seed, unsigned workers) {
  if (trials == 0) throw DomainError("estimate_tail: trials must be at least 1");
  TailEstimate out;
  out.epsilon = epsilon;
  out.rows = spec.rows;
  out.trials = trials;
  out.seed = seed;
  out.theoretical_bound = tail_bound(spec.rows, epsilon);

  const unsigned w = resolve_workers(workers);
  std::vector<std::uint64_t> partial(w, 0);
  parallel_chunks(trials, w, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    std::uint64_t fails = 0;
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t trial_seed = derive_seed(seed, t);
      EnsembleSpec draw = spec;
      draw.seed = derive_seed(trial_seed, 0);
      const Matrix phi = draw_ensemble(draw);
      Rng rng(derive_seed(trial_seed, 1));
      const auto x = unit_sphere_vector(rng, spec.cols);
      const double energy = norm2_squared(multiply(phi, x));
      if (std::abs(energy - 1.0) >= epsilon) ++fails;
    }
    partial[chunk] = fails;
  });
  for (auto f : partial) out.failures += f;
  out.empirical_probability = frequency(out.failures, trials);
  return out;
}

double composed_epsilon(double epsilon, double epsilon1) noexcept {
  return epsilon + epsilon1 * (1.0 + epsilon);
}

double compose_exponent(double c0_eps, double c0_eps1, std::size_t m) {
  if (m == 0) throw DomainError("compose_exponent: m must be at least 1");
  if (!(c0_eps > 0.0 && c0_eps1 > 0.0))
    throw DomainError("compose_exponent: concentration constants must be positive");
  return std::min(c0_eps, c0_eps1) - std::numbers::ln2 / static_cast<double>(m);
}

CompositionParams compose_epsilons(double epsilon, double epsilon1,
                                   std::optional<std::size_t> rows_outer) {
  constexpr double limit = 1.0 / 3.0;
  if (!(epsilon > 0.0 && epsilon < limit) || !(epsilon1 > 0.0 && epsilon1 < limit))
    throw DomainError(
        "compose_epsilons: the composition bound assumes every epsilon lies in (0, 1/3)");
  CompositionParams out;
  out.epsilon = epsilon;
  out.epsilon1 = epsilon1;
  out.epsilon3 = composed_epsilon(epsilon, epsilon1);
  out.epsilon3_below_one = out.epsilon3 < 1.0;
  const double a = c0_of(epsilon);
  const double b = c0_of(epsilon1);
  if (rows_outer) {
    out.rows_outer = *rows_outer;
    out.c0_prime_bound = compose_exponent(a, b, *rows_outer);
  } else {
    out.c0_prime_bound = std::min(a, b);
  }
  out.c0_prime_vacuous = out.c0_prime_bound <= 0.0;
  return out;
}

double CompositionTail::phi_probability() const { return frequency(phi_failures, trials); }
double CompositionTail::outer_probability() const { return frequency(outer_failures, trials); }
double CompositionTail::composed_probability() const {
  return frequency(composed_failures, trials);
}

double CompositionTail::union_standard_error() const {
  if (trials == 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double p1 = phi_probability();
  const double p2 = outer_probability();
  return std::sqrt(p1 * (1.0 - p1) / n) + std::sqrt(p2 * (1.0 - p2) / n);
}

CompositionTail estimate_composition_tail(const EnsembleSpec& outer, const EnsembleSpec& phi,
                                          double epsilon, double epsilon1,
                                          std::uint64_t trials, std::uint64_t seed,
                                          unsigned workers) {
  if (outer.cols != phi.rows)
    throw ShapeError("estimate_composition_tail: outer matrix has " + std::to_string(outer.cols) +
                     " columns but phi has " + std::to_string(phi.rows) + " rows");
  if (trials == 0) throw DomainError("estimate_composition_tail: trials must be at least 1");
  CompositionTail out;
  out.params = compose_epsilons(epsilon, epsilon1, outer.rows);
  out.trials = trials;
  out.seed = seed;
  const double eps3 = out.params.epsilon3;

  struct Counts {
    std::uint64_t phi = 0, outer = 0, composed = 0;
  };
  const unsigned w = resolve_workers(workers);
  std::vector<Counts> partial(w);
  parallel_chunks(trials, w, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    Counts c;
    for (std::size_t t = begin; t < end; ++t) {
      const std::uint64_t trial_seed = derive_seed(seed, t);
      EnsembleSpec phi_draw = phi;
      phi_draw.seed = derive_seed(trial_seed, 0);
      EnsembleSpec outer_draw = outer;
      outer_draw.seed = derive_seed(trial_seed, 1);
      Rng rng(derive_seed(trial_seed, 2));
      const auto x = unit_sphere_vector(rng, phi.cols);
      const auto y = multiply(draw_ensemble(phi_draw), x);
      const double y_energy = norm2_squared(y);
      const double ay_energy = norm2_squared(multiply(draw_ensemble(outer_draw), y));
      if (std::abs(y_energy - 1.0) >= epsilon) ++c.phi;
      if (std::abs(ay_energy - y_energy) >= epsilon1 * y_energy) ++c.outer;
      if (std::abs(ay_energy - 1.0) >= eps3) ++c.composed;
    }
    partial[chunk] = c;
  });
  for (const auto& c : partial) {
    out.phi_failures += c.phi;
    out.outer_failures += c.outer;
    out.composed_failures += c.composed;
  }
  return out;
}

OrderScan scan_max_order(std::size_t n, std::size_t big_n, double c1) {
  if (n == 0 || n > big_n) throw DomainError("max_order: requires 1 <= n <= N");
  if (!(c1 > 0.0)) throw DomainError("max_order: c1 must be positive");
  OrderScan out;
  const std::size_t last = std::min(n, big_n - 1);
  for (std::size_t k = 1; k <= last; ++k) {
    const double limit =
        c1 * static_cast<double>(n) / std::log(static_cast<double>(big_n) / static_cast<double>(k));
    if (static_cast<double>(k) <= limit) out.k = k;
  }
  out.full_order_edge = big_n <= n;
  return out;
}

std::size_t max_order(std::size_t n, std::size_t big_n, double c1) {
  return scan_max_order(n, big_n, c1).k;
}

RowRequirement required_rows(const DimensioningParams& p) {
  if (!(p.delta > 0.0 && p.delta < 1.0)) throw DomainError("required_rows: delta must lie in (0, 1)");
  if (p.k == 0 || p.big_n < p.k) throw DomainError("required_rows: requires 1 <= k <= N");
  if (!(p.t > 0.0)) throw DomainError("required_rows: t must be positive");
  if (!(p.c_cap > 0.0)) throw DomainError("required_rows: C must be positive");
  const double k = static_cast<double>(p.k);
  const double scale = p.c_cap / (p.delta * p.delta);
  const double log_ratio = std::log(static_cast<double>(p.big_n) / k);
  const double log_net = 1.0 + std::log(1.0 + 12.0 / p.delta);  // ln(e (1 + 12/delta))
  const double tail = std::numbers::ln2 + p.t;

  RowRequirement out;
  out.corrected_bound = scale * (k * (log_ratio + log_net) + tail);
  out.uncorrected_bound = scale * (k * log_ratio + log_net + tail);
  out.corrected_rows = static_cast<std::size_t>(std::ceil(out.corrected_bound));
  out.uncorrected_rows = static_cast<std::size_t>(std::ceil(out.uncorrected_bound));
  return out;
}

}  // namespace ripkit
