#include "padyn/qp.hpp"

#include <algorithm>
#include <string>

#include "digits_impl.hpp"

namespace padyn {

QpApprox::QpApprox(Prime p, int offset, std::vector<Digit> digits)
    : p_(p), v_(offset), digits_(std::move(digits)) {
  if (digits_.empty()) throw PrecisionError("QpApprox needs a nonempty window");
  for (Digit d : digits_)
    if (d >= p_.value()) throw DomainError("digit " + std::to_string(d) + " out of range");
}

QpApprox QpApprox::from_zp(const ZpApprox& x) {
  return QpApprox(x.prime(), 0, std::vector<Digit>(x.digits().begin(), x.digits().end()));
}

QpApprox QpApprox::from_integer(Prime p, std::int64_t value, int precision) {
  return from_zp(ZpApprox::from_integer(p, value, precision));
}

QpApprox QpApprox::scaled(int v, const ZpApprox& u) {
  return QpApprox(u.prime(), v, std::vector<Digit>(u.digits().begin(), u.digits().end()));
}

QpApprox QpApprox::zero_at(Prime p, int end) { return QpApprox(p, end - 1, {0}); }

Digit QpApprox::digit_at(int i) const {
  if (i >= end())
    throw PrecisionError("digit " + std::to_string(i) + " beyond precision " +
                         std::to_string(end()));
  return i < v_ ? 0 : digits_[static_cast<std::size_t>(i - v_)];
}

bool QpApprox::is_zero() const {
  return std::all_of(digits_.begin(), digits_.end(), [](Digit d) { return d == 0; });
}

bool QpApprox::is_canonical() const { return is_zero() || digits_.front() != 0; }

QpApprox QpApprox::normalized() const {
  if (is_zero()) return *this;
  auto first = std::find_if(digits_.begin(), digits_.end(), [](Digit d) { return d != 0; });
  int skip = static_cast<int>(first - digits_.begin());
  return QpApprox(p_, v_ + skip, std::vector<Digit>(first, digits_.end()));
}

std::optional<int> QpApprox::valuation() const {
  for (int i = 0; i < width(); ++i)
    if (digits_[static_cast<std::size_t>(i)] != 0) return v_ + i;
  return std::nullopt;
}

QpApprox QpApprox::window(int start, int new_end) const {
  if (new_end > end())
    throw PrecisionError("window end " + std::to_string(new_end) + " beyond precision " +
                         std::to_string(end()));
  if (new_end <= start) throw PrecisionError("empty window");
  std::vector<Digit> d(static_cast<std::size_t>(new_end - start));
  for (int i = start; i < new_end; ++i) d[static_cast<std::size_t>(i - start)] = digit_at(i);
  return QpApprox(p_, start, std::move(d));
}

QpApprox QpApprox::truncated_to_end(int new_end) const {
  if (new_end <= v_) return zero_at(p_, new_end);
  return window(v_, new_end);
}

namespace {

QpApprox combine(const QpApprox& x, const QpApprox& y, bool subtract) {
  require_same_prime(x.prime(), y.prime());
  int start = std::min(x.offset(), y.offset());
  int end = std::min(x.end(), y.end());
  QpApprox xa = x.window(start, end), ya = y.window(start, end);
  int n = end - start;
  auto d = subtract ? detail::sub_digits(xa.digits(), ya.digits(), n, x.prime())
                    : detail::add_digits(xa.digits(), ya.digits(), n, x.prime());
  return QpApprox(x.prime(), start, std::move(d));
}

}  // namespace

QpApprox operator+(const QpApprox& x, const QpApprox& y) { return combine(x, y, false); }
QpApprox operator-(const QpApprox& x, const QpApprox& y) { return combine(x, y, true); }

QpApprox operator-(const QpApprox& x) {
  return QpApprox(x.prime(), x.offset(),
                  detail::sub_digits({}, x.digits(), x.width(), x.prime()));
}

QpApprox operator*(const QpApprox& x, const QpApprox& y) {
  require_same_prime(x.prime(), y.prime());
  QpApprox a = x.normalized(), b = y.normalized();
  if (a.is_zero() || b.is_zero()) {
    // valuation lower bounds: end() for zero-at-precision, offset() otherwise
    int va = a.is_zero() ? a.end() : a.offset();
    int vb = b.is_zero() ? b.end() : b.offset();
    int end = a.is_zero() && b.is_zero() ? va + vb
              : a.is_zero()              ? a.end() + vb
                                         : b.end() + va;
    return QpApprox::zero_at(x.prime(), end);
  }
  int n = std::min(a.width(), b.width());
  return QpApprox(x.prime(), a.offset() + b.offset(),
                  detail::mul_digits(a.digits(), b.digits(), n, x.prime()));
}

PNorm norm(const QpApprox& x) {
  auto v = x.valuation();
  return v ? PNorm::exact(*v) : PNorm::below(x.end());
}

PNorm distance(const QpApprox& x, const QpApprox& y) { return norm(x - y); }

ZpApprox mod_zp(const QpApprox& x) {
  if (x.end() <= 0)
    throw PrecisionError("mod Z_p: no digit at a nonnegative index is known");
  std::vector<Digit> d(static_cast<std::size_t>(x.end()));
  for (int i = 0; i < x.end(); ++i) d[static_cast<std::size_t>(i)] = x.digit_at(i);
  return ZpApprox(x.prime(), std::move(d));
}

QpApprox scalar_qp(const QpApprox& a, const QpApprox& x) { return a * x; }

QpApprox inverse_unit(const QpApprox& a) {
  QpApprox n = a.normalized();
  if (n.is_zero()) throw DomainError("inverse_unit: value is zero at its precision");
  return QpApprox(a.prime(), -n.offset(),
                  detail::inverse_digits(n.digits(), n.width(), a.prime()));
}

}  // namespace padyn
