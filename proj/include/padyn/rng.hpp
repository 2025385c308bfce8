#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "padyn/prime.hpp"

namespace padyn {

// Seeded generator with a platform-independent uniform draw. The draw is
// rejection sampling on raw mt19937_64 output, so sequences are identical
// across standard libraries.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64/rejection-v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n), n >= 1.
  std::uint64_t uniform(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      std::uint64_t r = engine_();
      if (r < limit) return r % n;
    }
  }

  Digit digit(const Prime& p) { return static_cast<Digit>(uniform(p.value())); }

  std::vector<Digit> digits(const Prime& p, int n) {
    std::vector<Digit> d(static_cast<std::size_t>(n));
    for (auto& x : d) x = digit(p);
    return d;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace padyn
