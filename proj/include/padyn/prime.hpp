#pragma once

#include <cstdint>
#include <string>

#include "padyn/errors.hpp"

namespace padyn {

using Digit = std::uint32_t;

// A prime p with 2 <= p < 2^16, so digit products fit comfortably in 64 bits.
class Prime {
 public:
  static constexpr std::uint32_t kMax = 65535;

  explicit Prime(std::uint32_t p) : p_(p) {
    if (p < 2 || p > kMax) throw DomainError("prime out of range: " + std::to_string(p));
    for (std::uint32_t d = 2; d * d <= p; ++d)
      if (p % d == 0) throw DomainError(std::to_string(p) + " is not prime");
  }

  std::uint32_t value() const { return p_; }
  operator std::uint32_t() const { return p_; }
  bool operator==(const Prime&) const = default;

 private:
  std::uint32_t p_;
};

inline void require_same_prime(const Prime& a, const Prime& b) {
  if (a != b)
    throw PrimeMismatch("prime mismatch: " + std::to_string(a.value()) + " vs " +
                        std::to_string(b.value()));
}

// p^e as a 64-bit integer; throws if it overflows.
std::uint64_t ipow(std::uint64_t p, int e);

}  // namespace padyn
