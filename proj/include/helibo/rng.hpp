#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace helibo {

using Rng = std::mt19937_64;

// Stream derivation: every random stream in a run is keyed by the top-level
// seed, a purpose label and up to two indices. Streams never depend on the
// order in which they are created.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                          std::uint64_t a = 0, std::uint64_t b = 0);

inline Rng make_rng(std::uint64_t base, std::string_view purpose,
                    std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(base, purpose, a, b));
}

}  // namespace helibo
