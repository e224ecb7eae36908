#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ripkit/linalg.hpp"

namespace ripkit {

/// SplitMix64 finalizer; used for seeding and sub-seed derivation.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Deterministic sub-seed for stream `index` under `seed`. Distinct indices
/// give statistically independent streams, so trial t of any Monte Carlo
/// loop uses derive_seed(seed, t) regardless of how trials are scheduled.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// xoshiro256** (Blackman & Vigna), state seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via the Box-Muller transform (pairs are cached).
  double normal() noexcept;
  bool coin() noexcept { return (next_u64() >> 63) != 0; }

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class EnsembleKind { gaussian, rademacher };

std::string_view to_string(EnsembleKind kind) noexcept;
/// Accepts "gaussian" or "rademacher"; throws DomainError otherwise.
EnsembleKind parse_ensemble_kind(std::string_view name);

/// Random n x N sensing matrix law: gaussian entries ~ N(0, 1/n), rademacher
/// entries +-1/sqrt(n) with probability 1/2 each.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gaussian;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::uint64_t seed = 0;
};

/// Pure function of spec: identical specs produce bitwise-identical matrices.
Matrix draw_ensemble(const EnsembleSpec& spec);

/// Vector uniform on the unit sphere of R^dim (normalized gaussian).
std::vector<double> unit_sphere_vector(Rng& rng, std::size_t dim);

/// `count` distinct indices from [0, n), sorted increasing.
std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t count);

}  // namespace ripkit
