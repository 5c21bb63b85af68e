#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fsolink {

// SplitMix64 finalizer; used to expand one base seed into independent streams.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

// Deterministic child seed from a base seed and a list of integer tags.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;

// Seeded generator with portable uniform and Gaussian draws. std::mt19937_64's
// output sequence is fixed by the standard; the distributions on top of it are
// implemented here so results do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in (0, 1).
  double uniform() noexcept;

  // Standard normal, Box-Muller.
  double gaussian() noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fsolink
