#pragma once

#include <algorithm>
#include <compare>
#include <string>

namespace padyn {

// A p-adic norm known at finite precision. Exact(e) is the value p^{-e};
// BelowPrecision(e) means "at most p^{-e}", all available digits vanish.
struct PNorm {
  enum class Kind { Exact, BelowPrecision };

  Kind kind = Kind::BelowPrecision;
  int exponent = 0;

  static PNorm exact(int e) { return {Kind::Exact, e}; }
  static PNorm below(int e) { return {Kind::BelowPrecision, e}; }

  bool is_exact() const { return kind == Kind::Exact; }

  // Certifies value <= p^{-e}.
  bool at_most(int e) const { return exponent >= e; }
  bool at_most(const PNorm& bound) const { return at_most(bound.exponent); }

  bool operator==(const PNorm&) const = default;

  std::string str() const {
    return (is_exact() ? "Exact(" : "BelowPrecision(") + std::to_string(exponent) + ")";
  }
};

// Ordering by magnitude. Exact values order by exponent (larger exponent is
// smaller norm); a BelowPrecision bound is only ordered against an Exact
// value it is certainly smaller than.
inline std::partial_ordering compare(const PNorm& a, const PNorm& b) {
  if (a.is_exact() && b.is_exact()) return b.exponent <=> a.exponent;
  if (a.is_exact() && !b.is_exact())
    return b.exponent > a.exponent ? std::partial_ordering::greater
                                   : std::partial_ordering::unordered;
  if (!a.is_exact() && b.is_exact())
    return a.exponent > b.exponent ? std::partial_ordering::less
                                   : std::partial_ordering::unordered;
  return std::partial_ordering::unordered;
}

// The larger of two norms as an upper bound; ties prefer the exact value.
inline PNorm max_norm(const PNorm& a, const PNorm& b) {
  if (a.exponent != b.exponent) return a.exponent < b.exponent ? a : b;
  return a.is_exact() ? a : b;
}

}  // namespace padyn
