#include "ripkit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ripkit/error.hpp"

namespace ripkit {

namespace {

__extension__ using u128 = unsigned __int128;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
  return splitmix64(state);
}

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t state = seed;
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t Rng::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  // Lemire's nearly-divisionless rejection.
  std::uint64_t x = next_u64();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::string_view to_string(EnsembleKind kind) noexcept {
  return kind == EnsembleKind::gaussian ? "gaussian" : "rademacher";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "gaussian") return EnsembleKind::gaussian;
  if (name == "rademacher") return EnsembleKind::rademacher;
  throw DomainError("unknown ensemble '" + std::string(name) +
                    "' (expected gaussian or rademacher)");
}

Matrix draw_ensemble(const EnsembleSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0) throw ShapeError("ensemble dimensions must be positive");
  Rng rng(spec.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rows));
  std::vector<double> entries(spec.rows * spec.cols);
  if (spec.kind == EnsembleKind::gaussian) {
    for (double& x : entries) x = scale * rng.normal();
  } else {
    for (double& x : entries) x = rng.coin() ? scale : -scale;
  }
  return Matrix(spec.rows, spec.cols, std::move(entries));
}

std::vector<double> unit_sphere_vector(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double n = 0.0;
  while (n == 0.0) {
    for (double& x : v) x = rng.normal();
    n = norm2(v);
  }
  for (double& x : v) x /= n;
  return v;
}

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, std::size_t count) {
  if (count > n) throw DomainError("random_subset: count exceeds population");
  // Partial Fisher-Yates over an index table.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace ripkit
