#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "padyn/pnorm.hpp"
#include "padyn/prime.hpp"

namespace padyn {

// A p-adic integer known modulo p^N: digits a_0..a_{N-1} of sum a_i p^i.
// Immutable; every operation states the precision of its result.
class ZpApprox {
 public:
  ZpApprox(Prime p, std::vector<Digit> digits);

  // Integer embedding; negative values use p-adic complement digits.
  static ZpApprox from_integer(Prime p, std::int64_t value, int precision);
  static ZpApprox zero(Prime p, int precision);

  Prime prime() const { return p_; }
  int precision() const { return static_cast<int>(digits_.size()); }
  Digit digit(int i) const { return digits_.at(static_cast<std::size_t>(i)); }
  std::span<const Digit> digits() const { return digits_; }

  // First n digits (n <= precision).
  ZpApprox truncated(int n) const;
  // Digits shifted down by k (the k-th power of the shift map); precision N-k.
  ZpApprox shifted_down(int k) const;
  // Multiplication by p^k: k zero digits prepended, precision N+k.
  ZpApprox shifted_up(int k) const;
  // Appends the given digits above the current precision.
  ZpApprox extended(std::span<const Digit> more) const;

  // Index of the first nonzero digit, if any digit is nonzero.
  std::optional<int> valuation() const;
  bool is_zero() const { return !valuation().has_value(); }

  // Value of the digits as an integer in [0, p^N); requires p^N < 2^63.
  std::uint64_t to_uint() const;

  // Equal at precision: same prime, same length, same digits.
  bool operator==(const ZpApprox&) const = default;

 private:
  Prime p_;
  std::vector<Digit> digits_;
};

// Ring operations. Result precision is min of the operand precisions;
// within it the digits equal those of the exact result for any lift.
ZpApprox operator+(const ZpApprox& x, const ZpApprox& y);
ZpApprox operator-(const ZpApprox& x, const ZpApprox& y);
ZpApprox operator-(const ZpApprox& x);
ZpApprox operator*(const ZpApprox& x, const ZpApprox& y);

PNorm norm(const ZpApprox& x);
// Norm of x - y on the common prefix.
PNorm distance(const ZpApprox& x, const ZpApprox& y);

// Inverse of a unit (digit 0 nonzero), same precision.
ZpApprox inverse_unit(const ZpApprox& a);

// Legendre: valuation of n!.
int factorial_valuation(std::uint64_t n, std::uint32_t p);

}  // namespace padyn
