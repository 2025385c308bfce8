#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padyn/analysis.hpp"
#include "padyn/shadowing.hpp"

namespace padyn {

// Brute-force cross-checks for small p^N. Each enumerates the whole of
// Z/p^N and uses nothing but map evaluation and digit comparison.

inline constexpr std::uint64_t kOracleLimit = std::uint64_t{1} << 22;

struct ShadowOracleResult {
  int precision = 0;
  int epsilon_exponent = 0;
  std::uint64_t candidates = 0;
  std::vector<ZpApprox> solutions;  // at most 64 kept
  std::uint64_t solution_count = 0;
  // Digits shared by every solution.
  int common_prefix = 0;
};

// All y mod p^N with d(x_n, f^n(y)) <= p^-eps on every digit where both
// sides are determined.
ShadowOracleResult brute_force_shadows(const MapSpec& f, const ZpOrbit& orbit,
                                       int epsilon_exponent, int precision);

// Whether every solution agrees with y on y's digits below `digits`.
bool agrees_with_all(const ShadowOracleResult& oracle, const ZpApprox& y, int digits);

struct FixedPointOracleResult {
  int precision = 0;
  int compared_digits = 0;
  std::uint64_t count = 0;
};

// x mod p^N with f^n(x) = x on the digits f^n(x) determines.
FixedPointOracleResult brute_force_fixed_points(const MapSpec& f, int n, int precision);

struct ArithmeticOracleResult {
  std::uint32_t prime = 2;
  int precision = 0;
  std::uint64_t add_pairs = 0;
  std::uint64_t mul_pairs = 0;
  std::uint64_t sub_pairs = 0;
  std::uint64_t mismatches = 0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
  std::string witness_op;
};

// add and sub over all pairs, mul over `mul_samples` seeded pairs (all pairs
// when mul_samples is 0), compared with integer arithmetic mod p^N.
ArithmeticOracleResult arithmetic_oracle(Prime p, int precision, std::uint64_t mul_samples,
                                         std::uint64_t seed);

struct ScalingOracleResult {
  std::uint64_t pairs = 0;
  std::uint64_t violations = 0;
  std::optional<std::pair<ZpApprox, ZpApprox>> witness;
};

// Every ordered pair x < y of Z/p^N at distance p^-j, k <= j < N - m.
ScalingOracleResult brute_force_scaling(const MapSpec& f, ScalingClass cls, int precision);

}  // namespace padyn
