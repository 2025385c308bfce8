#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padyn/map_spec.hpp"

namespace padyn {

struct ScalingReport {
  ScalingClass claimed;
  int precision = 0;
  bool verified = false;
  bool exhaustive = false;
  std::uint64_t pairs_checked = 0;
  std::uint64_t seed = 0;  // sampling mode only
  // First violating pair, its input distance and the observed image distance.
  std::optional<std::pair<ZpApprox, ZpApprox>> witness;
  std::optional<PNorm> witness_input_distance;
  std::optional<PNorm> witness_output_distance;
};

inline constexpr std::uint64_t kExhaustiveLimit = 4096;
inline constexpr int kSamplesPerStratum = 512;

// Checks ||f(x) - f(y)|| = p^m ||x - y|| for pairs at distance Exact(j),
// j in [k, N - m). Exhaustive when p^N <= 4096, otherwise 512 seeded
// samples per stratum j. Requires N >= k + m + 1.
ScalingReport verify_scaling(const MapSpec& f, ScalingClass cls, int precision,
                             std::uint64_t seed = 0);

struct ExpansivityReport {
  int c_exponent = 0;  // c = p^-c_exponent
  int horizon = 0;
  int precision = 0;
  bool exhaustive = false;
  std::uint64_t pairs_checked = 0;
  std::uint64_t separated = 0;
  // separation time n -> number of pairs first exceeding c at step n
  std::map<int, std::uint64_t> separation_times;
  std::uint64_t undecided_count = 0;
  // up to 16 undecided pairs, in enumeration order
  std::vector<std::pair<ZpApprox, ZpApprox>> undecided;
};

// For distinct pairs, the least n <= H with d(f^n x, f^n y) > c. Pairs whose
// distance stays BelowPrecision (or whose orbit runs out of digits) before
// separating are undecided. Requires H * m < N for a map losing m digits per
// step (m = 0 for maps that lose none).
ExpansivityReport expansivity_check(const MapSpec& f, int c_exponent, int horizon, int precision,
                                    std::uint64_t seed = 0);

struct FixedPointReport {
  std::string map_id;
  int n = 1;
  ScalingClass cls;
  int precision = 0;
  std::uint64_t count = 0;
  std::vector<std::vector<Digit>> seeds;
  std::vector<ZpApprox> points;
  std::optional<std::uint64_t> closed_form;
};

// Seeds (x_0..x_{k-1}) satisfying the head constraints x_i = f_i(x_0..x_{k-1}),
// i < l, each extended uniquely to `precision` digits through the bijective
// tail constraints. Needs depth >= precision - m.
FixedPointReport fixed_points(const DigitFunctionTable& table, int precision);
// fixed_points of the materialised n-th iterate.
FixedPointReport periodic_points(const DigitFunctionTable& table, int n, int precision);

// Same, for structural maps, using their natural class; fills closed_form
// for shift powers, T_j and R.
FixedPointReport fixed_points(const MapSpec& spec, int precision, int n = 1);

// Known counts: S^m -> p^{nm}; T_j -> p^{m+j}; R -> (p-1)p^{m-1} + p^m (n = 1).
std::optional<std::uint64_t> closed_form_fixed_points(const MapSpec& spec, int n = 1);

struct ModulusBound {
  int epsilon_exponent = 0;  // epsilon = p^-epsilon_exponent
  int delta_exponent = 0;
};

// epsilon = p^{-k-s} -> delta = p^{-l-s} when m < k, delta = epsilon when m = k.
ModulusBound shadowing_modulus_bound(ScalingClass cls, int s);

// Periodic point counts for n = 1..max_n; different vectors separate
// conjugacy classes, equal vectors decide nothing.
std::vector<std::uint64_t> periodic_signature(const DigitFunctionTable& table, int max_n,
                                              int precision);

// sup ||f(x) - g(x)|| over Z_p, by comparing digit functions 0..max_digit-1
// exhaustively. Exact(i) for the first differing index, else
// BelowPrecision(max_digit).
PNorm table_distance(const DigitFunctionTable& f, const DigitFunctionTable& g, int max_digit);

}  // namespace padyn
