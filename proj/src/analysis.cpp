#include "padyn/analysis.hpp"

#include <algorithm>
#include <string>

#include "padyn/rng.hpp"

namespace padyn {

namespace {

std::uint64_t checked_pow(std::uint32_t p, int e, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    r *= p;
    if (r > limit) return limit + 1;
  }
  return r;
}

std::vector<Digit> to_digits(std::uint64_t v, std::uint32_t p, int n) {
  std::vector<Digit> d(static_cast<std::size_t>(n));
  for (auto& x : d) {
    x = static_cast<Digit>(v % p);
    v /= p;
  }
  return d;
}

// First differing index on the common prefix, or -1 when the prefix agrees.
int first_difference(std::span<const Digit> a, std::span<const Digit> b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return static_cast<int>(i);
  return -1;
}

PNorm digit_distance(std::span<const Digit> a, std::span<const Digit> b) {
  int d = first_difference(a, b);
  if (d < 0) return PNorm::below(static_cast<int>(std::min(a.size(), b.size())));
  return PNorm::exact(d);
}

std::vector<Digit> image_digits(const MapSpec& f, const std::vector<Digit>& x) {
  ZpApprox y = eval(f, ZpApprox(f.prime, x));
  return {y.digits().begin(), y.digits().end()};
}

}  // namespace

ScalingReport verify_scaling(const MapSpec& f, ScalingClass cls, int precision,
                             std::uint64_t seed) {
  if (f.domain() != Domain::Zp) throw DomainError("verify_scaling needs a Z_p map");
  const int k = cls.k, m = cls.m, n = precision;
  if (n < k + m + 1)
    throw PreconditionError("precision " + std::to_string(n) + " certifies no distance; need >= " +
                            std::to_string(k + m + 1));
  const std::uint32_t p = f.prime.value();
  ScalingReport report;
  report.claimed = cls;
  report.precision = n;

  auto check = [&](const std::vector<Digit>& x, const std::vector<Digit>& fx,
                   const std::vector<Digit>& y, const std::vector<Digit>& fy, int j) {
    ++report.pairs_checked;
    PNorm out = digit_distance(fx, fy);
    if (out == PNorm::exact(j - m)) return true;
    report.witness = std::make_pair(ZpApprox(f.prime, x), ZpApprox(f.prime, y));
    report.witness_input_distance = PNorm::exact(j);
    report.witness_output_distance = out;
    return false;
  };

  std::uint64_t total = checked_pow(p, n, kExhaustiveLimit);
  if (total <= kExhaustiveLimit) {
    report.exhaustive = true;
    std::vector<std::vector<Digit>> xs(total), images(total);
    for (std::uint64_t i = 0; i < total; ++i) {
      xs[i] = to_digits(i, p, n);
      images[i] = image_digits(f, xs[i]);
    }
    for (std::uint64_t xi = 0; xi < total; ++xi) {
      for (int j = k; j < n - m; ++j) {
        std::uint64_t pj = checked_pow(p, j, total);
        std::uint64_t low = xi % pj;
        Digit xj = xs[xi][static_cast<std::size_t>(j)];
        std::uint64_t high_count = checked_pow(p, n - j - 1, total);
        for (Digit d = 0; d < p; ++d) {
          if (d == xj) continue;
          for (std::uint64_t r = 0; r < high_count; ++r) {
            std::uint64_t yi = low + pj * (d + p * r);
            if (yi <= xi) continue;
            if (!check(xs[xi], images[xi], xs[yi], images[yi], j)) return report;
          }
        }
      }
    }
  } else {
    report.seed = seed;
    Rng rng(seed);
    for (int j = k; j < n - m; ++j) {
      for (int t = 0; t < kSamplesPerStratum; ++t) {
        auto x = rng.digits(f.prime, n);
        auto y = x;
        y[static_cast<std::size_t>(j)] =
            static_cast<Digit>((x[static_cast<std::size_t>(j)] + 1 + rng.uniform(p - 1)) % p);
        for (int i = j + 1; i < n; ++i) y[static_cast<std::size_t>(i)] = rng.digit(f.prime);
        if (!check(x, image_digits(f, x), y, image_digits(f, y), j)) return report;
      }
    }
  }
  report.verified = true;
  return report;
}

ExpansivityReport expansivity_check(const MapSpec& f, int c_exponent, int horizon, int precision,
                                    std::uint64_t seed) {
  if (f.domain() != Domain::Zp) throw DomainError("expansivity_check needs a Z_p map");
  const int n = precision;
  if (horizon < 0) throw PreconditionError("horizon must be >= 0");
  const std::uint32_t p = f.prime.value();
  int loss = n - eval(f, ZpApprox::zero(f.prime, n)).precision();
  loss = std::max(loss, 0);
  if (horizon * loss >= n)
    throw PreconditionError("horizon " + std::to_string(horizon) + " loses " +
                            std::to_string(horizon * loss) + " of " + std::to_string(n) +
                            " digits");

  ExpansivityReport report;
  report.c_exponent = c_exponent;
  report.horizon = horizon;
  report.precision = n;

  auto orbit = [&](const std::vector<Digit>& x) {
    std::vector<std::vector<Digit>> o{x};
    for (int t = 1; t <= horizon; ++t) {
      ZpApprox y = eval(f, ZpApprox(f.prime, o.back()));
      o.emplace_back(y.digits().begin(), y.digits().end());
    }
    return o;
  };
  auto judge = [&](const std::vector<std::vector<Digit>>& ox,
                   const std::vector<std::vector<Digit>>& oy) {
    ++report.pairs_checked;
    for (int t = 0; t <= horizon; ++t) {
      int d = first_difference(ox[static_cast<std::size_t>(t)], oy[static_cast<std::size_t>(t)]);
      if (d >= 0 && d < c_exponent) {
        ++report.separated;
        ++report.separation_times[t];
        return;
      }
    }
    ++report.undecided_count;
    if (report.undecided.size() < 16)
      report.undecided.emplace_back(ZpApprox(f.prime, ox.front()), ZpApprox(f.prime, oy.front()));
  };

  std::uint64_t total = checked_pow(p, n, kExhaustiveLimit);
  if (total <= kExhaustiveLimit) {
    report.exhaustive = true;
    std::vector<std::vector<std::vector<Digit>>> orbits(total);
    for (std::uint64_t i = 0; i < total; ++i) orbits[i] = orbit(to_digits(i, p, n));
    for (std::uint64_t a = 0; a < total; ++a)
      for (std::uint64_t b = a + 1; b < total; ++b) judge(orbits[a], orbits[b]);
  } else {
    Rng rng(seed);
    for (int j = 0; j < n; ++j) {
      for (int t = 0; t < kSamplesPerStratum; ++t) {
        auto x = rng.digits(f.prime, n);
        auto y = x;
        y[static_cast<std::size_t>(j)] =
            static_cast<Digit>((x[static_cast<std::size_t>(j)] + 1 + rng.uniform(p - 1)) % p);
        for (int i = j + 1; i < n; ++i) y[static_cast<std::size_t>(i)] = rng.digit(f.prime);
        judge(orbit(x), orbit(y));
      }
    }
  }
  return report;
}

FixedPointReport fixed_points(const DigitFunctionTable& table, int precision) {
  const ScalingClass cls = table.scaling_class();
  const int k = cls.k, m = cls.m, l = cls.l(), n = precision;
  if (n < k + 1)
    throw PreconditionError("fixed points need precision > k = " + std::to_string(k));
  if (table.depth() < n - m)
    throw PreconditionError("table depth " + std::to_string(table.depth()) + " < " +
                            std::to_string(n - m) + " needed for precision " + std::to_string(n));
  const std::uint32_t p = table.prime().value();
  const std::uint64_t seeds = checked_pow(p, k, std::uint64_t{1} << 24);
  if (seeds > (std::uint64_t{1} << 24)) throw PreconditionError("too many seeds to enumerate");

  FixedPointReport report;
  report.cls = cls;
  report.precision = n;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    std::vector<Digit> x = to_digits(s, p, k);
    bool admissible = true;
    for (int i = 0; i < l && admissible; ++i)
      admissible = table.digit(i, x) == x[static_cast<std::size_t>(i)];
    if (!admissible) continue;
    report.seeds.push_back(x);
    for (int i = l; i < n - m; ++i) {
      // x has m + i digits; the constraint f_i(x_0..x_{m+i}) = x_i fixes x_{m+i}
      int solutions = 0;
      Digit found = 0;
      x.push_back(0);
      for (Digit c = 0; c < p; ++c) {
        x.back() = c;
        if (table.digit(i, x) == x[static_cast<std::size_t>(i)]) {
          ++solutions;
          found = c;
        }
      }
      if (solutions != 1) {
        x.pop_back();
        throw BijectivityViolation(i, std::vector<unsigned>(x.begin(), x.end()),
                                   "fixed point extension at digit " + std::to_string(m + i) +
                                       " has " + std::to_string(solutions) + " solutions");
      }
      x.back() = found;
    }
    ZpApprox point(table.prime(), x);
    ZpApprox image = table.apply(point);
    if (image.truncated(n - m) != point.truncated(n - m))
      throw VerificationFailure("extended fixed point does not satisfy f(x) = x");
    report.points.push_back(point);
  }
  report.count = report.seeds.size();
  return report;
}

FixedPointReport periodic_points(const DigitFunctionTable& table, int n, int precision) {
  if (n < 1) throw DomainError("period must be >= 1");
  if (n == 1) return fixed_points(table, precision);
  const ScalingClass cls = table.scaling_class();
  int base_depth = precision - cls.m;
  if (table.depth() < base_depth)
    throw PreconditionError("table depth " + std::to_string(table.depth()) + " < " +
                            std::to_string(base_depth));
  IterateTable it = iterate_table(table, n, base_depth);
  FixedPointReport report = fixed_points(it.table, precision);
  report.n = n;
  return report;
}

std::optional<std::uint64_t> closed_form_fixed_points(const MapSpec& spec, int n) {
  const std::uint64_t p = spec.prime.value();
  auto pw = [&](int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
  };
  if (const auto* s = std::get_if<ShiftPower>(&spec.body)) return pw(n * s->m);
  if (n != 1) return std::nullopt;
  if (const auto* t = std::get_if<Tj>(&spec.body)) return pw(t->m + t->j);
  if (const auto* r = std::get_if<Rmap>(&spec.body)) return (p - 1) * pw(r->m - 1) + pw(r->m);
  return std::nullopt;
}

FixedPointReport fixed_points(const MapSpec& spec, int precision, int n) {
  auto cls = natural_class(spec);
  if (!cls)
    throw PreconditionError(spec.type_name() + " has no known scaling class; extract a table");
  auto table = spec.domain() == Domain::Zp && std::holds_alternative<TableMap>(spec.body)
                   ? std::get<TableMap>(spec.body).table
                   : DigitFunctionTable::from_spec(spec, *cls, precision - cls->m);
  FixedPointReport report = periodic_points(table, n, precision);
  report.map_id = spec.type_name();
  report.closed_form = closed_form_fixed_points(spec, n);
  return report;
}

ModulusBound shadowing_modulus_bound(ScalingClass cls, int s) {
  if (s < 0) throw DomainError("s must be >= 0");
  ModulusBound b;
  b.epsilon_exponent = cls.k + s;
  b.delta_exponent = cls.m < cls.k ? cls.l() + s : cls.k + s;
  return b;
}

std::vector<std::uint64_t> periodic_signature(const DigitFunctionTable& table, int max_n,
                                              int precision) {
  std::vector<std::uint64_t> counts;
  const ScalingClass cls = table.scaling_class();
  for (int n = 1; n <= max_n; ++n)
    counts.push_back(
        periodic_points(table, n, std::max(precision, n * cls.m + cls.l() + 1)).count);
  return counts;
}

PNorm table_distance(const DigitFunctionTable& f, const DigitFunctionTable& g, int max_digit) {
  require_same_prime(f.prime(), g.prime());
  if (!(f.scaling_class() == g.scaling_class()))
    throw DomainError("table_distance needs tables of the same class");
  const std::uint32_t p = f.prime().value();
  int limit = std::min({max_digit, f.depth(), g.depth()});
  for (int i = 0; i < limit; ++i) {
    int a = f.arity(i);
    std::uint64_t size = checked_pow(p, a, std::uint64_t{1} << 26);
    if (size > (std::uint64_t{1} << 26))
      throw PreconditionError("digit function " + std::to_string(i) + " too large to compare");
    for (std::uint64_t idx = 0; idx < size; ++idx) {
      auto x = to_digits(idx, p, a);
      if (f.digit(i, x) != g.digit(i, x)) return PNorm::exact(i);
    }
  }
  return PNorm::below(limit);
}

}  // namespace padyn
