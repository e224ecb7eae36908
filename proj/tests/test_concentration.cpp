#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ripkit/concentration.hpp"
#include "ripkit/error.hpp"

using namespace ripkit;

namespace {

// Largest k in [1, min(n, N-1)] with k ln(N/k) <= c1 n, scanning downward.
std::size_t scan_oracle(std::size_t n, std::size_t big_n, double c1) {
  for (std::size_t k = std::min(n, big_n - 1); k >= 1; --k) {
    const double kd = static_cast<double>(k);
    if (kd <= c1 * static_cast<double>(n) / std::log(static_cast<double>(big_n) / kd)) return k;
  }
  return 0;
}

double rows_oracle(double big_n, double k, double delta, double t, double c) {
  return c / (delta * delta) *
         (k * (std::log(big_n / k) + std::log(std::exp(1.0) * (1.0 + 12.0 / delta))) +
          std::log(2.0) + t);
}

}  // namespace

TEST_CASE("c0_of") {
  CHECK(std::abs(c0_of(0.5) - 1.0 / 24.0) <= 1e-15);
  CHECK(std::abs(c0_of(0.1) - (0.0025 - 0.001 / 6.0)) <= 1e-15);
  CHECK(c0_of(1e-6) > 0.0);
  CHECK(c0_of(1e-6) < 1e-12);
  for (double e : {0.0, 1.0, -0.1, 1.5, std::nan("")}) CHECK_THROWS_AS(c0_of(e), DomainError);

  SUBCASE("positive on (0,1) and strictly increasing on (0, 2/3]") {
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double e = (2.0 / 3.0) * i / 1000.0;
      const double c = c0_of(e);
      CHECK(c > prev);
      prev = c;
    }
    for (int i = 1; i < 1000; ++i) CHECK(c0_of(i / 1000.0) > 0.0);
  }
  CHECK(concentration_params(0.3).c0 == c0_of(0.3));
}

TEST_CASE("tail_bound") {
  CHECK(std::abs(tail_bound(64, 0.5) - 0.1392) <= 5e-4);
  CHECK(std::abs(tail_bound(64, 0.5) - 2.0 * std::exp(-64.0 / 24.0)) <= 1e-15);
  CHECK_THROWS_AS(tail_bound(0, 0.5), DomainError);
  CHECK(tail_bound(128, 0.5) < tail_bound(64, 0.5));
  for (std::size_t n = 1; n <= 200; n += 7)
    for (double e = 0.05; e < 0.95; e += 0.05) {
      const double b = tail_bound(n, e);
      CHECK(b > 0.0);
      CHECK(b <= 2.0);
      CHECK(tail_bound(n + 1, e) < b);
      CHECK(tail_bound(n, e + 0.01) < b);
    }
}

TEST_CASE("estimate_tail") {
  SUBCASE("rademacher single column has exactly unit energy") {
    for (double e : {0.01, 0.3, 0.9})
      CHECK(estimate_tail({EnsembleKind::rademacher, 16, 1, 0}, e, 500, 3).failures == 0);
  }
  SUBCASE("near-unit epsilon is almost never exceeded") {
    const auto r = estimate_tail({EnsembleKind::gaussian, 256, 16, 0}, 0.999999, 1000, 5);
    CHECK(r.empirical_probability <= 0.001);
  }
  SUBCASE("gaussian 64x8 stays below the bound") {
    const auto r = estimate_tail({EnsembleKind::gaussian, 64, 8, 0}, 0.5, 10'000, 11);
    CHECK(r.trials == 10'000);
    CHECK(r.empirical_probability <= r.theoretical_bound);
    CHECK(r.empirical_probability >= 0.0);
  }
  SUBCASE("independent of worker count") {
    const EnsembleSpec spec{EnsembleKind::gaussian, 12, 5, 0};
    const auto base = estimate_tail(spec, 0.3, 777, 2, 1);
    for (unsigned w : {2u, 4u, 13u}) CHECK(estimate_tail(spec, 0.3, 777, 2, w).failures == base.failures);
  }
  CHECK_THROWS_AS(estimate_tail({EnsembleKind::gaussian, 4, 4, 0}, 0.5, 0, 1), DomainError);
}

TEST_CASE("compose_epsilons") {
  const auto p = compose_epsilons(0.1, 0.1);
  CHECK(std::abs(p.epsilon3 - 0.21) <= 1e-15);
  CHECK(p.epsilon3_below_one);
  CHECK(composed_epsilon(0.0, 0.2) == 0.2);

  const double edge = 1.0 / 3.0 - 1e-9;
  const auto b = compose_epsilons(edge, edge);
  CHECK(b.epsilon3 == doctest::Approx(7.0 / 9.0).epsilon(1e-8));
  CHECK(b.epsilon3 < 1.0);

  CHECK_THROWS_AS(compose_epsilons(1.0 / 3.0, 0.1), DomainError);
  CHECK_THROWS_AS(compose_epsilons(0.1, 0.5), DomainError);
  CHECK_THROWS_AS(compose_epsilons(0.0, 0.2), DomainError);

  for (double e = 0.01; e < 1.0 / 3.0; e += 0.02)
    for (double e1 = 0.01; e1 < 1.0 / 3.0; e1 += 0.02) {
      const auto q = compose_epsilons(e, e1, 50);
      CHECK(std::abs(q.epsilon3 - (e + e1 * (1.0 + e))) <= 1e-15);
      CHECK(q.epsilon3_below_one);
      CHECK(q.c0_prime_vacuous == (q.c0_prime_bound <= 0.0));
    }
}

TEST_CASE("compose_exponent") {
  CHECK(compose_exponent(0.04, 0.02, 100) == doctest::Approx(0.02 - std::log(2.0) / 100).epsilon(1e-14));
  CHECK(std::abs(compose_exponent(0.04, 0.02, 100) - 0.01307) <= 1e-5);
  CHECK(std::abs(compose_exponent(0.04, 0.02, 100'000'000) - 0.02) <= 1e-8);
  CHECK(compose_exponent(0.04, 0.02, 1) < 0.0);
  CHECK_THROWS_AS(compose_exponent(0.04, 0.02, 0), DomainError);
  const auto p = compose_epsilons(0.2, 0.2, 1);
  CHECK(p.c0_prime_vacuous);
  CHECK(compose_epsilons(0.2, 0.3).c0_prime_bound == c0_of(0.2));
}

TEST_CASE("composition tail respects the union structure") {
  const EnsembleSpec outer{EnsembleKind::gaussian, 16, 32, 0};
  const EnsembleSpec phi{EnsembleKind::gaussian, 32, 48, 0};
  const auto r = estimate_composition_tail(outer, phi, 0.25, 0.25, 2000, 9);
  CHECK(r.params.epsilon3 == doctest::Approx(0.5625));
  // If neither factor deviates the composition cannot: (1±e)(1±e1) lies in 1±e3.
  CHECK(r.composed_failures <= r.phi_failures + r.outer_failures);
  CHECK(r.composed_probability() <=
        r.phi_probability() + r.outer_probability() + 3.0 * r.union_standard_error());
  const auto again = estimate_composition_tail(outer, phi, 0.25, 0.25, 2000, 9, 3);
  CHECK(again.composed_failures == r.composed_failures);
  CHECK(again.phi_failures == r.phi_failures);
  CHECK(again.outer_failures == r.outer_failures);
  CHECK_THROWS_AS(estimate_composition_tail({EnsembleKind::gaussian, 4, 5, 0}, phi, 0.2, 0.2, 10, 1),
                  ShapeError);
}

TEST_CASE("max_order") {
  CHECK(max_order(10, 1000, 1e6) == 10);
  CHECK(max_order(4, 1024, 0.01) == 0);
  CHECK(max_order(256, 1024, 0.5) == scan_oracle(256, 1024, 0.5));

  SUBCASE("agrees with the floor of the fixed point k = c1 n / ln(N/k)") {
    double k = 1.0;
    for (int it = 0; it < 500; ++it) k = 0.5 * 256.0 / std::log(1024.0 / k);
    CHECK(max_order(256, 1024, 0.5) == static_cast<std::size_t>(std::floor(k)));
  }
  SUBCASE("k = N edge is reported apart") {
    const auto s = scan_max_order(8, 8, 1e6);
    CHECK(s.k == 7);
    CHECK(s.full_order_edge);
    CHECK_FALSE(scan_max_order(8, 9, 1e6).full_order_edge);
  }
  CHECK_THROWS_AS(max_order(0, 10, 0.5), DomainError);
  CHECK_THROWS_AS(max_order(11, 10, 0.5), DomainError);
  CHECK_THROWS_AS(max_order(5, 10, 0.0), DomainError);
}

TEST_CASE("required_rows") {
  DimensioningParams p;
  p.big_n = 2;
  p.k = 1;
  p.delta = 1.0 - 1e-12;
  p.t = 1e-12;
  const auto r = required_rows(p);
  CHECK(r.corrected_bound == doctest::Approx(2.0 * std::log(2.0) + std::log(13.0 * std::exp(1.0))).epsilon(1e-9));
  CHECK(std::abs(r.corrected_bound - 4.95) <= 0.01);
  CHECK(r.corrected_rows == 5);
  CHECK(r.uncorrected_rows == 5);  // k = 1: both variants coincide

  SUBCASE("linear in t") {
    DimensioningParams q{1024, 8, 0.3, 2.0, 1.0, 0.5};
    const auto a = required_rows(q);
    q.t = 4.0;
    const auto b = required_rows(q);
    CHECK(b.corrected_bound - a.corrected_bound == doctest::Approx(2.0 / (0.3 * 0.3)).epsilon(1e-12));
  }
  SUBCASE("direct evaluation") {
    const DimensioningParams q{1024, 8, 0.3, 2.0, 1.0, 0.5};
    const auto a = required_rows(q);
    const double expect = rows_oracle(1024, 8, 0.3, 2.0, 1.0);
    CHECK(a.corrected_bound == doctest::Approx(expect).epsilon(1e-13));
    CHECK(a.corrected_rows == static_cast<std::size_t>(std::ceil(expect)));
    CHECK(a.uncorrected_bound < a.corrected_bound);
  }
  DimensioningParams bad{10, 2, 1.0, 1.0, 1.0, 0.5};
  CHECK_THROWS_AS(required_rows(bad), DomainError);
  bad.delta = 0.5;
  bad.t = 0.0;
  CHECK_THROWS_AS(required_rows(bad), DomainError);
  bad.t = 1.0;
  bad.k = 11;
  CHECK_THROWS_AS(required_rows(bad), DomainError);
}

TEST_CASE("dimensioning grid matches scan and evaluation oracles exactly") {
  const std::size_t ns[] = {8, 32, 64, 128, 256};
  const std::size_t big_ns[] = {256, 1024, 4096, 100'000};
  for (std::size_t n : ns)
    for (std::size_t big_n : big_ns) {
      CHECK(max_order(n, big_n, 0.5) == scan_oracle(n, big_n, 0.5));
      const std::size_t k = std::max<std::size_t>(1, n / 16);
      const double delta = 0.1 + 0.05 * static_cast<double>(n % 5);
      const DimensioningParams p{big_n, k, delta, 1.5, 2.0, 0.5};
      CHECK(required_rows(p).corrected_rows ==
            static_cast<std::size_t>(std::ceil(rows_oracle(big_n, k, delta, 1.5, 2.0))));
    }
}
