#include "padyn/oracle.hpp"

#include <algorithm>

#include "padyn/rng.hpp"

namespace padyn {

namespace {

ZpApprox from_index(Prime p, std::uint64_t v, int n) {
  std::vector<Digit> d(static_cast<std::size_t>(n));
  for (auto& x : d) {
    x = static_cast<Digit>(v % p);
    v /= p;
  }
  return ZpApprox(p, std::move(d));
}

std::uint64_t domain_size(Prime p, int n) {
  const std::uint64_t size = ipow(p, n);
  if (size > kOracleLimit)
    throw PreconditionError("oracle domain p^" + std::to_string(n) + " exceeds " +
                            std::to_string(kOracleLimit));
  return size;
}

}  // namespace

ShadowOracleResult brute_force_shadows(const MapSpec& f, const ZpOrbit& orbit,
                                       int epsilon_exponent, int precision) {
  if (orbit.two_sided()) throw PreconditionError("oracle takes one-sided orbits");
  ShadowOracleResult r;
  r.precision = precision;
  r.epsilon_exponent = epsilon_exponent;
  const std::uint64_t size = domain_size(f.prime, precision);
  std::optional<ZpApprox> first;
  r.common_prefix = precision;
  for (std::uint64_t v = 0; v < size; ++v) {
    ZpApprox z = from_index(f.prime, v, precision);
    ++r.candidates;
    bool ok = true;
    for (int n = 0; n <= orbit.last_index() && ok; ++n) {
      if (n > 0) {
        if (z.precision() == 0) break;
        z = eval(f, z);
      }
      const ZpApprox& x = orbit.at(n);
      const int upto = std::min({epsilon_exponent, z.precision(), x.precision()});
      for (int i = 0; i < upto; ++i)
        if (z.digit(i) != x.digit(i)) {
          ok = false;
          break;
        }
    }
    if (!ok) continue;
    ZpApprox y = from_index(f.prime, v, precision);
    if (!first) {
      first = y;
    } else {
      int same = 0;
      while (same < r.common_prefix && y.digit(same) == first->digit(same)) ++same;
      r.common_prefix = same;
    }
    ++r.solution_count;
    if (r.solutions.size() < 64) r.solutions.push_back(y);
  }
  if (r.solution_count == 0) r.common_prefix = 0;
  return r;
}

bool agrees_with_all(const ShadowOracleResult& oracle, const ZpApprox& y, int digits) {
  if (oracle.solution_count == 0 || digits > oracle.common_prefix) return false;
  const ZpApprox& s = oracle.solutions.front();
  for (int i = 0; i < digits; ++i)
    if (s.digit(i) != y.digit(i)) return false;
  return true;
}

FixedPointOracleResult brute_force_fixed_points(const MapSpec& f, int n, int precision) {
  if (n < 1) throw DomainError("iterate must be >= 1");
  FixedPointOracleResult r;
  r.precision = precision;
  r.compared_digits = precision;
  const std::uint64_t size = domain_size(f.prime, precision);
  for (std::uint64_t v = 0; v < size; ++v) {
    ZpApprox x = from_index(f.prime, v, precision);
    ZpApprox z = x;
    for (int t = 0; t < n; ++t) z = eval(f, z);
    r.compared_digits = std::min(r.compared_digits, z.precision());
    bool fixed = true;
    for (int i = 0; i < z.precision(); ++i)
      if (z.digit(i) != x.digit(i)) {
        fixed = false;
        break;
      }
    if (fixed) ++r.count;
  }
  return r;
}

ArithmeticOracleResult arithmetic_oracle(Prime p, int precision, std::uint64_t mul_samples,
                                         std::uint64_t seed) {
  ArithmeticOracleResult r;
  r.prime = p.value();
  r.precision = precision;
  const std::uint64_t size = ipow(p, precision);
  if (size > (std::uint64_t{1} << 16) * 16)
    throw PreconditionError("arithmetic oracle needs p^N <= 2^20");
  auto fail = [&](std::uint64_t a, std::uint64_t b, const char* op) {
    if (r.mismatches++ == 0) {
      r.witness = std::make_pair(a, b);
      r.witness_op = op;
    }
  };
  std::vector<ZpApprox> values;
  values.reserve(size);
  for (std::uint64_t v = 0; v < size; ++v) values.push_back(from_index(p, v, precision));
  for (std::uint64_t a = 0; a < size; ++a)
    for (std::uint64_t b = 0; b < size; ++b) {
      if ((values[a] + values[b]).to_uint() != (a + b) % size) fail(a, b, "add");
      if ((values[a] - values[b]).to_uint() != (a + size - b) % size) fail(a, b, "sub");
      ++r.add_pairs;
      ++r.sub_pairs;
    }
  auto check_mul = [&](std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    if ((values[a] * values[b]).to_uint() != static_cast<std::uint64_t>(prod % size))
      fail(a, b, "mul");
    ++r.mul_pairs;
  };
  if (mul_samples == 0) {
    for (std::uint64_t a = 0; a < size; ++a)
      for (std::uint64_t b = 0; b < size; ++b) check_mul(a, b);
  } else {
    Rng rng(seed);
    for (std::uint64_t t = 0; t < mul_samples; ++t) {
      std::uint64_t a = rng.uniform(size);
      check_mul(a, rng.uniform(size));
    }
  }
  return r;
}

ScalingOracleResult brute_force_scaling(const MapSpec& f, ScalingClass cls, int precision) {
  ScalingOracleResult r;
  const std::uint64_t size = domain_size(f.prime, precision);
  if (size > 4096) throw PreconditionError("scaling oracle enumerates pairs; needs p^N <= 4096");
  std::vector<ZpApprox> xs, fx;
  for (std::uint64_t v = 0; v < size; ++v) {
    xs.push_back(from_index(f.prime, v, precision));
    fx.push_back(eval(f, xs.back()));
  }
  for (std::uint64_t a = 0; a < size; ++a)
    for (std::uint64_t b = a + 1; b < size; ++b) {
      int j = 0;
      while (xs[a].digit(j) == xs[b].digit(j)) ++j;
      if (j < cls.k || j >= precision - cls.m) continue;
      ++r.pairs;
      const int common = std::min(fx[a].precision(), fx[b].precision());
      int jj = 0;
      while (jj < common && fx[a].digit(jj) == fx[b].digit(jj)) ++jj;
      if (jj != j - cls.m) {
        if (r.violations++ == 0) r.witness = std::make_pair(xs[a], xs[b]);
      }
    }
  return r;
}

}  // namespace padyn
