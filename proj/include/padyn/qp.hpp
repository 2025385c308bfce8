#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "padyn/pnorm.hpp"
#include "padyn/prime.hpp"
#include "padyn/zp.hpp"

namespace padyn {

// A p-adic number known on the digit window [v, v+N): the value is
// sum_{i=v}^{v+N-1} d_{i-v} p^i, determined modulo p^{v+N}. Digits below v
// are exactly zero. An all-zero window is zero at precision p^{-(v+N)}.
class QpApprox {
 public:
  QpApprox(Prime p, int offset, std::vector<Digit> digits);

  static QpApprox from_zp(const ZpApprox& x);
  static QpApprox from_integer(Prime p, std::int64_t value, int precision);
  // p^v * u for a ZpApprox u.
  static QpApprox scaled(int v, const ZpApprox& u);
  // Zero known modulo p^end.
  static QpApprox zero_at(Prime p, int end);

  Prime prime() const { return p_; }
  int offset() const { return v_; }
  int width() const { return static_cast<int>(digits_.size()); }
  int end() const { return v_ + width(); }
  std::span<const Digit> digits() const { return digits_; }

  // Digit at absolute index i < end(); zero below offset().
  Digit digit_at(int i) const;

  bool is_zero() const;
  // Canonical: zero, or the digit at offset() is nonzero.
  bool is_canonical() const;
  // Drops leading zero digits; end() is preserved.
  QpApprox normalized() const;
  std::optional<int> valuation() const;

  // Window [start, new_end) with new_end <= end(); start <= offset() pads zeros.
  QpApprox window(int start, int new_end) const;
  QpApprox truncated_to_end(int new_end) const;

  bool operator==(const QpApprox&) const = default;

 private:
  Prime p_;
  int v_;
  std::vector<Digit> digits_;
};

// add/sub align windows: result window [min offset, min end).
QpApprox operator+(const QpApprox& x, const QpApprox& y);
QpApprox operator-(const QpApprox& x, const QpApprox& y);
QpApprox operator-(const QpApprox& x);
// Relative width min(Nx, Ny) after normalising both factors; the product of
// a zero-at-precision factor is zero at the implied precision.
QpApprox operator*(const QpApprox& x, const QpApprox& y);

PNorm norm(const QpApprox& x);
PNorm distance(const QpApprox& x, const QpApprox& y);

// Drops the digits at negative indices (x mod Z_p). Precision = end().
ZpApprox mod_zp(const QpApprox& x);

// a * x with window bookkeeping (same as operator*).
QpApprox scalar_qp(const QpApprox& a, const QpApprox& x);
// 1/a: p^{-v} times the inverse of the unit part, same width as a.
QpApprox inverse_unit(const QpApprox& a);

}  // namespace padyn
