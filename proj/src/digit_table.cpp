#include "padyn/digit_table.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "padyn/map_spec.hpp"

namespace padyn {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kMaxTableEntries = std::uint64_t{1} << 26;

std::uint64_t splitmix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Fisher-Yates permutation of {0..p-1} driven by `state`, applied to c.
Digit permute(std::uint64_t state, std::uint32_t p, Digit c) {
  if (p == 2) return (state & 1) ? 1 - c : c;
  std::vector<Digit> perm(p);
  std::iota(perm.begin(), perm.end(), Digit{0});
  for (std::uint32_t t = p - 1; t > 0; --t) {
    state = splitmix(state);
    std::swap(perm[t], perm[state % (t + 1)]);
  }
  return perm[c];
}

std::uint64_t table_size(std::uint32_t p, int arity) {
  std::uint64_t size = 1;
  for (int j = 0; j < arity; ++j) {
    size *= p;
    if (size > kMaxTableEntries)
      throw PreconditionError("digit table of arity " + std::to_string(arity) +
                              " is too large to materialise");
  }
  return size;
}

std::vector<Digit> decode_index(std::uint64_t index, std::uint32_t p, int arity) {
  std::vector<Digit> x(static_cast<std::size_t>(arity));
  for (auto& d : x) {
    d = static_cast<Digit>(index % p);
    index /= p;
  }
  return x;
}

std::uint64_t encode_index(std::span<const Digit> x, std::uint32_t p, int arity) {
  std::uint64_t index = 0;
  for (int j = arity - 1; j >= 0; --j) index = index * p + x[static_cast<std::size_t>(j)];
  return index;
}

}  // namespace

ScalingClass::ScalingClass(int k_, int m_) : k(k_), m(m_) {
  if (m < 1 || m > k)
    throw DomainError("scaling class needs 1 <= m <= k, got k=" + std::to_string(k) +
                      " m=" + std::to_string(m));
}

DigitFunctionTable DigitFunctionTable::dense(Prime p, ScalingClass cls,
                                             std::vector<std::vector<Digit>> tables) {
  DigitFunctionTable t = dense_unchecked(p, cls, std::move(tables));
  t.check_bijectivity();
  return t;
}

DigitFunctionTable DigitFunctionTable::dense_unchecked(Prime p, ScalingClass cls,
                                                       std::vector<std::vector<Digit>> tables) {
  if (tables.empty()) throw DomainError("dense table needs depth >= 1");
  DigitFunctionTable t(p, cls, static_cast<int>(tables.size()), Source::Dense);
  for (int i = 0; i < t.depth_; ++i) {
    const auto& tab = tables[static_cast<std::size_t>(i)];
    if (tab.size() != table_size(p, t.arity(i)))
      throw DomainError("digit function " + std::to_string(i) + " has " +
                        std::to_string(tab.size()) + " entries, expected p^" +
                        std::to_string(t.arity(i)));
    for (Digit d : tab)
      if (d >= p.value()) throw DomainError("table entry out of range");
  }
  t.tables_ = std::move(tables);
  return t;
}

DigitFunctionTable DigitFunctionTable::random(Prime p, ScalingClass cls, std::uint64_t seed,
                                              int depth) {
  DigitFunctionTable t(p, cls, depth, Source::Random);
  t.seed_ = seed;
  return t;
}

DigitFunctionTable DigitFunctionTable::perturbed(const DigitFunctionTable& base, int first_digit,
                                                 std::uint64_t seed) {
  if (first_digit < 0) throw DomainError("first perturbed digit must be >= 0");
  DigitFunctionTable t(base.p_, base.cls_, base.depth_, Source::Perturbed);
  t.base_ = std::make_shared<const DigitFunctionTable>(base);
  t.first_perturbed_ = first_digit;
  t.seed_ = seed;
  return t;
}

DigitFunctionTable DigitFunctionTable::from_spec(const MapSpec& spec, ScalingClass cls, int depth) {
  if (spec.domain() != Domain::Zp) throw DomainError("digit functions need a Z_p map");
  DigitFunctionTable t(spec.prime, cls, depth, Source::Spec);
  t.spec_ = std::make_shared<const MapSpec>(spec);
  return t;
}

std::vector<std::uint64_t> DigitFunctionTable::prefix_hashes(std::span<const Digit> x,
                                                             int n) const {
  std::vector<std::uint64_t> h(static_cast<std::size_t>(n) + 1);
  h[0] = splitmix(seed_ ^ 0x5bd1e9955bd1e995ULL);
  for (int j = 0; j < n; ++j)
    h[static_cast<std::size_t>(j) + 1] =
        splitmix(h[static_cast<std::size_t>(j)] ^ ((x[static_cast<std::size_t>(j)] + 1) * kGolden));
  return h;
}

// Random source: base_value is unused for heads and is the last argument for
// tails. Perturbed source: base_value is the base table's output digit.
Digit DigitFunctionTable::mix_digit(int i, Digit base_value, std::uint64_t prefix_hash) const {
  std::uint64_t h = splitmix(prefix_hash ^ splitmix(static_cast<std::uint64_t>(i) + 1));
  if (i < cls_.l()) {
    Digit r = static_cast<Digit>(splitmix(h ^ 0xa5a5a5a5ULL) % p_.value());
    return source_ == Source::Random ? r : (base_value + r) % p_.value();
  }
  return permute(h, p_.value(), base_value);
}

Digit DigitFunctionTable::digit(int i, std::span<const Digit> x) const {
  if (i < 0 || i >= depth_)
    throw PrecisionError("digit function " + std::to_string(i) + " beyond table depth " +
                         std::to_string(depth_));
  int a = arity(i);
  if (static_cast<int>(x.size()) < a)
    throw PrecisionError("digit function " + std::to_string(i) + " needs " + std::to_string(a) +
                         " input digits");
  switch (source_) {
    case Source::Dense:
      return tables_[static_cast<std::size_t>(i)][encode_index(x, p_, a)];
    case Source::Random: {
      // heads hash all k arguments; tails hash the a-1 prefix digits
      int hashed = i < cls_.l() ? a : a - 1;
      auto h = prefix_hashes(x, hashed);
      return mix_digit(i, i < cls_.l() ? 0 : x[static_cast<std::size_t>(a - 1)],
                       h[static_cast<std::size_t>(hashed)]);
    }
    case Source::Perturbed: {
      Digit b = base_->digit(i, x);
      if (i < first_perturbed_) return b;
      int hashed = i < cls_.l() ? a : a - 1;
      auto h = prefix_hashes(x, hashed);
      return mix_digit(i, b, h[static_cast<std::size_t>(hashed)]);
    }
    case Source::Spec: {
      ZpApprox in(p_, std::vector<Digit>(x.begin(), x.begin() + a));
      ZpApprox out = eval(*spec_, in);
      if (out.precision() <= i)
        throw InconsistentScaling("spec does not determine digit " + std::to_string(i) +
                                  " from " + std::to_string(a) + " input digits");
      return out.digit(i);
    }
  }
  return 0;
}

int DigitFunctionTable::output_precision(int n) const {
  if (n < cls_.k) return 0;
  return std::max(0, std::min(depth_, n - cls_.m));
}

ZpApprox DigitFunctionTable::apply(const ZpApprox& x) const {
  require_same_prime(p_, x.prime());
  int out_n = output_precision(x.precision());
  if (out_n < 1) {
    throw PrecisionError("input has " + std::to_string(x.precision()) +
                         " digits; a (p^-" + std::to_string(cls_.k) + ", p^" +
                         std::to_string(cls_.m) + ") map needs more to produce a digit");
  }
  auto xs = x.digits();
  std::vector<Digit> out(static_cast<std::size_t>(out_n));
  switch (source_) {
    case Source::Dense:
      for (int i = 0; i < out_n; ++i) out[static_cast<std::size_t>(i)] = digit(i, xs);
      break;
    case Source::Random:
    case Source::Perturbed: {
      auto h = prefix_hashes(xs, x.precision());
      std::vector<Digit> base_out;
      if (source_ == Source::Perturbed) {
        ZpApprox b = base_->apply(x);
        base_out.assign(b.digits().begin(), b.digits().end());
      }
      for (int i = 0; i < out_n; ++i) {
        int a = arity(i);
        int hashed = i < cls_.l() ? a : a - 1;
        Digit bv;
        if (source_ == Source::Random) {
          bv = i < cls_.l() ? 0 : xs[static_cast<std::size_t>(a - 1)];
        } else {
          bv = base_out[static_cast<std::size_t>(i)];
          if (i < first_perturbed_) {
            out[static_cast<std::size_t>(i)] = bv;
            continue;
          }
        }
        out[static_cast<std::size_t>(i)] = mix_digit(i, bv, h[static_cast<std::size_t>(hashed)]);
      }
      break;
    }
    case Source::Spec: {
      ZpApprox y = eval(*spec_, x);
      if (y.precision() < out_n)
        throw InconsistentScaling("spec output shorter than its scaling class promises");
      return y.truncated(out_n);
    }
  }
  return ZpApprox(p_, std::move(out));
}

DigitFunctionTable DigitFunctionTable::materialized(int depth) const {
  if (depth < 1 || depth > depth_)
    throw PrecisionError("cannot materialise " + std::to_string(depth) + " digit functions");
  if (source_ == Source::Dense && depth == depth_) return *this;
  std::vector<std::vector<Digit>> tables(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    int a = arity(i);
    std::uint64_t size = table_size(p_, a);
    auto& tab = tables[static_cast<std::size_t>(i)];
    if (source_ == Source::Dense) {
      tab = tables_[static_cast<std::size_t>(i)];
      continue;
    }
    tab.resize(size);
    for (std::uint64_t idx = 0; idx < size; ++idx) tab[idx] = digit(i, decode_index(idx, p_, a));
  }
  return dense_unchecked(p_, cls_, std::move(tables));
}

void DigitFunctionTable::check_bijectivity() const {
  if (source_ != Source::Dense) return;
  std::uint32_t p = p_.value();
  for (int i = cls_.l(); i < depth_; ++i) {
    int a = arity(i);
    const auto& tab = tables_[static_cast<std::size_t>(i)];
    std::uint64_t stride = table_size(p, a - 1);
    std::vector<char> seen(p);
    for (std::uint64_t prefix = 0; prefix < stride; ++prefix) {
      std::fill(seen.begin(), seen.end(), 0);
      for (std::uint32_t c = 0; c < p; ++c) {
        Digit v = tab[prefix + c * stride];
        if (seen[v]) {
          auto pre = decode_index(prefix, p, a - 1);
          throw BijectivityViolation(
              i, std::vector<unsigned>(pre.begin(), pre.end()),
              "digit function " + std::to_string(i) +
                  " is not bijective in its last variable (prefix index " +
                  std::to_string(prefix) + ")");
        }
        seen[v] = 1;
      }
    }
  }
}

}  // namespace padyn
