#pragma once

// Base-p digit-vector kernels shared by the Z_p and Q_p types. Vectors are
// little-endian; every result is reduced modulo p^n.

#include <cstdint>
#include <span>
#include <vector>

#include "padyn/prime.hpp"

namespace padyn::detail {

std::vector<Digit> add_digits(std::span<const Digit> a, std::span<const Digit> b, int n,
                              std::uint32_t p);
std::vector<Digit> sub_digits(std::span<const Digit> a, std::span<const Digit> b, int n,
                              std::uint32_t p);
std::vector<Digit> mul_digits(std::span<const Digit> a, std::span<const Digit> b, int n,
                              std::uint32_t p);
// Inverse of a unit modulo p^n (a[0] != 0).
std::vector<Digit> inverse_digits(std::span<const Digit> a, int n, std::uint32_t p);
Digit inverse_mod_p(Digit a, std::uint32_t p);

}  // namespace padyn::detail
