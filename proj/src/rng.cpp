#include "autointent/rng.hpp"

#include "autointent/text.hpp"

namespace autointent {

std::size_t Rng::uniform_index(std::size_t n) {
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view key) { return mix_seed(base, text::fnv1a64(key)); }

std::uint64_t derive_seed(std::uint64_t base, std::string_view key, std::uint64_t index) {
  return mix_seed(derive_seed(base, key), index);
}

}  // namespace autointent
