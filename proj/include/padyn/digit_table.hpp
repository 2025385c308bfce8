#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "padyn/prime.hpp"
#include "padyn/zp.hpp"

namespace padyn {

struct MapSpec;

// (p^{-k}, p^m) locally scaling: ||f(x)-f(y)|| = p^m ||x-y|| whenever
// ||x-y|| <= p^{-k}. l = k - m head digits are not bijective.
struct ScalingClass {
  int k = 1;
  int m = 1;

  ScalingClass() = default;
  ScalingClass(int k_, int m_);

  int l() const { return k - m; }
  bool operator==(const ScalingClass&) const = default;
};

// Digit-function form of a locally scaling map:
//   f(x)_i = f_i(x_0..x_{k-1})      for i < l
//   f(x)_i = f_i(x_0..x_{m+i})      for i >= l, bijective in x_{m+i}.
//
// Four sources share this interface:
//   dense      explicit tables A^arity -> A, index = sum_j x_j p^j
//   random     seeded pseudo-random tables, materialised lazily per lookup
//   perturbed  a base table whose digits from `first_digit` on are mixed
//              with seeded prefix-dependent permutations
//   spec       digits read off the evaluation of a MapSpec
// Random, perturbed and spec sources may have unbounded depth.
class DigitFunctionTable {
 public:
  enum class Source { Dense, Random, Perturbed, Spec };
  static constexpr int kUnbounded = 1 << 20;

  // Validates table sizes and bijectivity on the last variable for i >= l.
  static DigitFunctionTable dense(Prime p, ScalingClass cls,
                                  std::vector<std::vector<Digit>> tables);
  // No bijectivity check; for fault-injection tests and corrupt inputs.
  static DigitFunctionTable dense_unchecked(Prime p, ScalingClass cls,
                                            std::vector<std::vector<Digit>> tables);
  static DigitFunctionTable random(Prime p, ScalingClass cls, std::uint64_t seed,
                                   int depth = kUnbounded);
  // Same class; agrees with base on digits < first_digit, so
  // ||base - result||_inf <= p^{-first_digit}.
  static DigitFunctionTable perturbed(const DigitFunctionTable& base, int first_digit,
                                      std::uint64_t seed);
  // The spec must be a Z_p map of the given class (not checked here; see
  // verify_scaling and extract_table).
  static DigitFunctionTable from_spec(const MapSpec& spec, ScalingClass cls,
                                      int depth = kUnbounded);

  Prime prime() const { return p_; }
  ScalingClass scaling_class() const { return cls_; }
  int depth() const { return depth_; }
  Source source() const { return source_; }
  bool bounded() const { return depth_ < kUnbounded; }

  int arity(int i) const { return i < cls_.l() ? cls_.k : cls_.m + i + 1; }

  // f_i applied to the first arity(i) entries of x.
  Digit digit(int i, std::span<const Digit> x) const;

  // f(x) with precision min(depth, N - m); requires N >= k (N >= k+1 when l = 0).
  ZpApprox apply(const ZpApprox& x) const;
  // Output precision apply() would produce, or 0 if x is too short.
  int output_precision(int input_precision) const;

  // Dense copy truncated to `depth` digit functions.
  DigitFunctionTable materialized(int depth) const;

  // Throws BijectivityViolation with a witness prefix. Dense sources only;
  // other sources are bijective by construction.
  void check_bijectivity() const;

  // Source-specific accessors for serialisation.
  const std::vector<std::vector<Digit>>& dense_tables() const { return tables_; }
  std::uint64_t seed() const { return seed_; }
  const DigitFunctionTable& base() const { return *base_; }
  int first_perturbed_digit() const { return first_perturbed_; }
  const MapSpec& spec() const { return *spec_; }

 private:
  DigitFunctionTable(Prime p, ScalingClass cls, int depth, Source source)
      : p_(p), cls_(cls), depth_(depth), source_(source) {}

  // Rolling prefix hashes h[j] over x_0..x_{j-1}.
  std::vector<std::uint64_t> prefix_hashes(std::span<const Digit> x, int n) const;
  Digit mix_digit(int i, Digit base_value, std::uint64_t prefix_hash) const;

  Prime p_;
  ScalingClass cls_;
  int depth_;
  Source source_;
  std::vector<std::vector<Digit>> tables_;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const DigitFunctionTable> base_;
  int first_perturbed_ = 0;
  std::shared_ptr<const MapSpec> spec_;
};

}  // namespace padyn
