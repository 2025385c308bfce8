#include "digits_impl.hpp"

#include <algorithm>
#include <utility>

namespace padyn::detail {

namespace {

Digit at(std::span<const Digit> a, int i) {
  return i < static_cast<int>(a.size()) ? a[static_cast<std::size_t>(i)] : 0;
}

}  // namespace

std::vector<Digit> add_digits(std::span<const Digit> a, std::span<const Digit> b, int n,
                              std::uint32_t p) {
  std::vector<Digit> out(static_cast<std::size_t>(n));
  Digit carry = 0;
  for (int i = 0; i < n; ++i) {
    Digit s = at(a, i) + at(b, i) + carry;
    carry = s >= p ? 1 : 0;
    out[static_cast<std::size_t>(i)] = s - carry * p;
  }
  return out;
}

std::vector<Digit> sub_digits(std::span<const Digit> a, std::span<const Digit> b, int n,
                              std::uint32_t p) {
  std::vector<Digit> out(static_cast<std::size_t>(n));
  std::int64_t borrow = 0;
  for (int i = 0; i < n; ++i) {
    std::int64_t d = static_cast<std::int64_t>(at(a, i)) - at(b, i) - borrow;
    borrow = d < 0 ? 1 : 0;
    out[static_cast<std::size_t>(i)] = static_cast<Digit>(d + borrow * p);
  }
  return out;
}

std::vector<Digit> mul_digits(std::span<const Digit> a, std::span<const Digit> b, int n,
                              std::uint32_t p) {
  std::vector<Digit> out(static_cast<std::size_t>(n));
  int na = std::min<int>(n, static_cast<int>(a.size()));
  int nb = std::min<int>(n, static_cast<int>(b.size()));
  std::uint64_t carry = 0;
  for (int i = 0; i < n; ++i) {
    std::uint64_t col = carry;
    int lo = std::max(0, i - nb + 1);
    int hi = std::min(i, na - 1);
    for (int j = lo; j <= hi; ++j)
      col += static_cast<std::uint64_t>(a[static_cast<std::size_t>(j)]) *
             b[static_cast<std::size_t>(i - j)];
    out[static_cast<std::size_t>(i)] = static_cast<Digit>(col % p);
    carry = col / p;
  }
  return out;
}

Digit inverse_mod_p(Digit a, std::uint32_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a % p;
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    t = std::exchange(new_t, t - q * new_t);
    r = std::exchange(new_r, r - q * new_r);
  }
  if (t < 0) t += p;
  return static_cast<Digit>(t);
}

std::vector<Digit> inverse_digits(std::span<const Digit> a, int n, std::uint32_t p) {
  Digit inv0 = inverse_mod_p(a[0], p);
  std::vector<Digit> residual(static_cast<std::size_t>(n), 0);
  residual[0] = 1;
  std::vector<Digit> w(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    Digit wi = static_cast<Digit>(static_cast<std::uint64_t>(residual[static_cast<std::size_t>(i)]) *
                                  inv0 % p);
    w[static_cast<std::size_t>(i)] = wi;
    if (wi == 0) continue;
    // residual -= wi * p^i * a
    std::vector<Digit> term(static_cast<std::size_t>(n), 0);
    std::vector<Digit> scaled = mul_digits(a, std::span<const Digit>(&wi, 1), n - i, p);
    std::copy(scaled.begin(), scaled.end(), term.begin() + i);
    residual = sub_digits(residual, term, n, p);
  }
  return w;
}

}  // namespace padyn::detail
