#include "padyn/zp.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "digits_impl.hpp"

namespace padyn {

std::uint64_t ipow(std::uint64_t p, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / p)
      throw PrecisionError("p^" + std::to_string(e) + " overflows 64 bits");
    r *= p;
  }
  return r;
}

ZpApprox::ZpApprox(Prime p, std::vector<Digit> digits) : p_(p), digits_(std::move(digits)) {
  if (digits_.empty()) throw PrecisionError("ZpApprox needs at least one digit");
  for (Digit d : digits_)
    if (d >= p_.value()) throw DomainError("digit " + std::to_string(d) + " out of range");
}

ZpApprox ZpApprox::from_integer(Prime p, std::int64_t value, int precision) {
  if (precision < 1) throw PrecisionError("precision must be >= 1");
  std::vector<Digit> digits(static_cast<std::size_t>(precision));
  bool negative = value < 0;
  // |value| as unsigned, then complement if negative.
  std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(value + 1)) + 1
                               : static_cast<std::uint64_t>(value);
  for (auto& d : digits) {
    d = static_cast<Digit>(mag % p.value());
    mag /= p.value();
  }
  ZpApprox x(p, std::move(digits));
  return negative ? -x : x;
}

ZpApprox ZpApprox::zero(Prime p, int precision) {
  if (precision < 1) throw PrecisionError("precision must be >= 1");
  return ZpApprox(p, std::vector<Digit>(static_cast<std::size_t>(precision), 0));
}

ZpApprox ZpApprox::truncated(int n) const {
  if (n < 1 || n > precision())
    throw PrecisionError("cannot truncate " + std::to_string(precision()) + " digits to " +
                         std::to_string(n));
  return ZpApprox(p_, std::vector<Digit>(digits_.begin(), digits_.begin() + n));
}

ZpApprox ZpApprox::shifted_down(int k) const {
  if (k >= precision()) throw PrecisionError("shift by " + std::to_string(k) + " leaves no digits");
  return ZpApprox(p_, std::vector<Digit>(digits_.begin() + k, digits_.end()));
}

ZpApprox ZpApprox::shifted_up(int k) const {
  std::vector<Digit> d(static_cast<std::size_t>(k), 0);
  d.insert(d.end(), digits_.begin(), digits_.end());
  return ZpApprox(p_, std::move(d));
}

ZpApprox ZpApprox::extended(std::span<const Digit> more) const {
  std::vector<Digit> d = digits_;
  d.insert(d.end(), more.begin(), more.end());
  return ZpApprox(p_, std::move(d));
}

std::optional<int> ZpApprox::valuation() const {
  for (int i = 0; i < precision(); ++i)
    if (digits_[static_cast<std::size_t>(i)] != 0) return i;
  return std::nullopt;
}

std::uint64_t ZpApprox::to_uint() const {
  std::uint64_t r = 0;
  ipow(p_.value(), precision());  // overflow guard
  for (int i = precision() - 1; i >= 0; --i) r = r * p_.value() + digits_[static_cast<std::size_t>(i)];
  return r;
}

ZpApprox operator+(const ZpApprox& x, const ZpApprox& y) {
  require_same_prime(x.prime(), y.prime());
  int n = std::min(x.precision(), y.precision());
  return ZpApprox(x.prime(), detail::add_digits(x.digits(), y.digits(), n, x.prime()));
}

ZpApprox operator-(const ZpApprox& x, const ZpApprox& y) {
  require_same_prime(x.prime(), y.prime());
  int n = std::min(x.precision(), y.precision());
  return ZpApprox(x.prime(), detail::sub_digits(x.digits(), y.digits(), n, x.prime()));
}

ZpApprox operator-(const ZpApprox& x) { return ZpApprox::zero(x.prime(), x.precision()) - x; }

ZpApprox operator*(const ZpApprox& x, const ZpApprox& y) {
  require_same_prime(x.prime(), y.prime());
  int n = std::min(x.precision(), y.precision());
  return ZpApprox(x.prime(), detail::mul_digits(x.digits(), y.digits(), n, x.prime()));
}

PNorm norm(const ZpApprox& x) {
  auto v = x.valuation();
  return v ? PNorm::exact(*v) : PNorm::below(x.precision());
}

PNorm distance(const ZpApprox& x, const ZpApprox& y) {
  require_same_prime(x.prime(), y.prime());
  int n = std::min(x.precision(), y.precision());
  for (int i = 0; i < n; ++i)
    if (x.digit(i) != y.digit(i)) return PNorm::exact(i);
  return PNorm::below(n);
}

ZpApprox inverse_unit(const ZpApprox& a) {
  if (a.digit(0) == 0) throw DomainError("inverse_unit: not a unit");
  return ZpApprox(a.prime(), detail::inverse_digits(a.digits(), a.precision(), a.prime()));
}

int factorial_valuation(std::uint64_t n, std::uint32_t p) {
  int v = 0;
  while (n > 0) {
    n /= p;
    v += static_cast<int>(n);
  }
  return v;
}

}  // namespace padyn
