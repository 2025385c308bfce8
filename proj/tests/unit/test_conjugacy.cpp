#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "../support/oracles.hpp"
#include "padyn/analysis.hpp"
#include "padyn/conjugacy.hpp"
#include "padyn/rng.hpp"
#include "padyn/text.hpp"

using namespace padyn;
using oracle::Digits;

namespace {

std::vector<ZpApprox> all_points(std::uint32_t p, int n) {
  std::vector<ZpApprox> v;
  for (std::uint64_t i = 0; i < oracle::power(p, n); ++i) v.push_back(oracle::zp(p, oracle::digits_of(i, p, n)));
  return v;
}

// digit j of h(x) = digit j mod k of f^(j / k)(x)
Digits shift_coding(const DigitFunctionTable& f, const Digits& x, int k, int len) {
  Digits out;
  Digits y = x;
  for (int block = 0; static_cast<int>(out.size()) < len; ++block) {
    for (int t = 0; t < k && static_cast<int>(out.size()) < len; ++t) out.push_back(y[static_cast<std::size_t>(t)]);
    y = oracle::image(f, y);
  }
  return out;
}

Digits substitute(const std::vector<Digits>& rules, const Digits& x, std::size_t len) {
  Digits out;
  for (Digit d : x) {
    for (Digit e : rules[d]) out.push_back(e);
    if (out.size() >= len) break;
  }
  out.resize(std::min(out.size(), len));
  return out;
}

bool agree(const ZpApprox& a, const ZpApprox& b) {
  const int n = std::min(a.precision(), b.precision());
  return a.truncated(n) == b.truncated(n);
}

}  // namespace

TEST_CASE("S^k is conjugate to itself by the identity") {
  for (int k = 1; k <= 2; ++k) {
    auto f = DigitFunctionTable::from_spec(MapSpec(Prime(3), ShiftPower{k}), ScalingClass(k, k));
    for (const auto& x : all_points(3, 6)) {
      ZpApprox hx = conjugate_to_shift(f, x);
      CHECK(agree(hx, x));
      CHECK(hx.precision() >= 6 - k);
    }
  }
}

TEST_CASE("shift conjugacy of a random table matches the coding oracle") {
  Prime p(2);
  const int n = 8, k = 2;
  auto f = DigitFunctionTable::random(p, ScalingClass(k, k), 17);
  auto h = make_shift_conjugacy(f);
  auto pts = all_points(2, n);
  for (const auto& x : pts) {
    ZpApprox hx = h.forward(x);
    Digits expect = shift_coding(f, oracle::digits_of(x), k, hx.precision());
    CHECK(oracle::digits_of(hx) == expect);
    // S^k o h = h o f on determined digits
    CHECK(agree(hx.shifted_down(k), h.forward(f.apply(x))));
  }
  auto rep = verify_conjugacy(h, pts, true);
  CHECK(rep.semiconjugacy_ok);
  CHECK(rep.isometry_deviation_count == 0);
  CHECK(rep.collision_count == 0);
  CHECK(rep.pairs == pts.size() * (pts.size() - 1) / 2);
}

TEST_CASE("shift conjugacy inverts exhaustively") {
  Prime p(2);
  for (int k = 1; k <= 2; ++k) {
    auto f = DigitFunctionTable::random(p, ScalingClass(k, k), 40 + static_cast<std::uint64_t>(k));
    std::set<std::uint64_t> images;
    for (const auto& y : all_points(2, 10)) {
      ZpApprox x = invert_shift_conjugacy(f, y);
      CHECK(agree(conjugate_to_shift(f, x), y));
      images.insert(oracle::value_of(oracle::digits_of(x.truncated(std::min(x.precision(), 10))), 2));
    }
    // the inverse is injective on the determined digits
    CHECK(images.size() == 1024);
  }
}

TEST_CASE("nearby conjugacy") {
  Prime p(2);
  const ScalingClass cls(2, 1);
  auto f = DigitFunctionTable::random(p, cls, 5);

  SUBCASE("g = f gives the identity") {
    for (const auto& x : all_points(2, 9)) CHECK(agree(conjugate_nearby(f, f, x), x));
  }

  SUBCASE("a perturbation above the bound") {
    auto g = DigitFunctionTable::perturbed(f, 1, 8);
    auto h = make_nearby_conjugacy(f, g);
    auto pts = all_points(2, 10);
    auto rep = verify_conjugacy(h, pts, false);
    CHECK(rep.semiconjugacy_ok);
    for (std::size_t i = 0; i < pts.size(); i += 37) {
      ZpApprox hx = h.forward(pts[i]);
      CHECK(hx.precision() == 2 + 8);
      // independent check: f(h(x)) against h(g(x))
      Digits lhs = oracle::image(f, oracle::digits_of(hx));
      ZpApprox rhs = h.forward(g.apply(pts[i]));
      Digits r = oracle::digits_of(rhs);
      const std::size_t n = std::min(lhs.size(), r.size());
      lhs.resize(n);
      r.resize(n);
      CHECK(lhs == r);
      // the swapped conjugacy undoes h
      CHECK(agree(h.inverse(hx), pts[i]));
    }
  }

  SUBCASE("a perturbation of the first digit is rejected") {
    auto g = DigitFunctionTable::perturbed(f, 0, 8);
    REQUIRE(table_distance(f, g, 1).is_exact());
    CHECK_THROWS_AS(conjugate_nearby(f, g, ZpApprox::zero(p, 8)), HypothesisViolation);
  }

  SUBCASE("a perturbed S^2") {
    auto s = DigitFunctionTable::from_spec(MapSpec(p, ShiftPower{2}), ScalingClass(2, 2));
    auto r = DigitFunctionTable::perturbed(s, 2, 3);
    auto h = make_nearby_conjugacy(s, r);
    CHECK(verify_conjugacy(h, all_points(2, 8), false).semiconjugacy_ok);
  }

  CHECK_THROWS_AS(conjugate_nearby(f, DigitFunctionTable::random(p, ScalingClass(1, 1), 1),
                                   ZpApprox::zero(p, 8)),
                  PreconditionError);
}

TEST_CASE("affine shell conjugacy") {
  Prime p(3);
  const int n = 9;
  const std::vector<Digits> rules = {{0}, {2, 1}, {1}};
  auto phi = std::make_shared<const MapSpec>(p, Substitution{rules});

  SUBCASE("b = 0 and phi(0) = 0 fixes the first shell") {
    AffineShellMap g{ZpApprox::from_integer(p, 3, n), ZpApprox::zero(p, n), phi, 2};
    for (std::int64_t u = 1; u < 3; ++u) {
      ZpApprox z = ZpApprox::from_integer(p, u, n);
      CHECK(agree(affine_shell_conjugacy(g, z), z));
    }
  }

  SUBCASE("phi = 0 gives the identity") {
    auto zero = std::make_shared<const MapSpec>(p, AffineZp{ZpApprox::zero(p, n + 4), ZpApprox::zero(p, n + 4)});
    AffineShellMap g{ZpApprox::from_integer(p, 6, n), ZpApprox::from_integer(p, 2, n), zero, 2};
    for (const auto& z : all_points(3, 5)) {
      ZpApprox zz = ZpApprox::from_integer(p, static_cast<std::int64_t>(z.to_uint()), n);
      CHECK(agree(affine_shell_conjugacy(g, zz), zz));
    }
  }

  SUBCASE("g o H = H o f against integer arithmetic") {
    const std::uint64_t mod = oracle::power(3, n);
    const std::uint64_t a = 3, b = 2;
    AffineShellMap g{ZpApprox::from_integer(p, static_cast<std::int64_t>(a), n),
                     ZpApprox::from_integer(p, static_cast<std::int64_t>(b), n), phi, 2};
    auto g_oracle = [&](std::uint64_t z) {
      Digits s = substitute(rules, oracle::digits_of(z, 3, n), static_cast<std::size_t>(n));
      return (a * z + b + 9 * oracle::value_of(s, 3)) % mod;
    };
    auto h = make_affine_shell_conjugacy(g);
    std::vector<ZpApprox> pts;
    Rng rng(11);
    for (int t = 0; t < 300; ++t) pts.push_back(ZpApprox(p, rng.digits(p, n)));
    for (const auto& z : pts) {
      ZpApprox hz = h.forward(z);
      ZpApprox hfz = h.forward(z * g.a + g.b);
      const int e = std::min(hz.precision(), hfz.precision());
      REQUIRE(e >= 4);
      const std::uint64_t me = oracle::power(3, e);
      CHECK(g_oracle(hz.to_uint()) % me == hfz.to_uint() % me);
    }
    auto rep = verify_conjugacy(h, pts, false);
    CHECK(rep.semiconjugacy_ok);
    CHECK(rep.collision_count == 0);
  }

  SUBCASE("hypotheses") {
    AffineShellMap weak{ZpApprox::from_integer(p, 9, n), ZpApprox::zero(p, n), phi, 2};
    CHECK_THROWS_AS(affine_shell_conjugacy(weak, ZpApprox::zero(p, n)), HypothesisViolation);
    AffineShellMap unit{ZpApprox::from_integer(p, 2, n), ZpApprox::zero(p, n), phi, 2};
    CHECK_THROWS_AS(affine_shell_conjugacy(unit, ZpApprox::zero(p, n)), PreconditionError);
    auto shift = std::make_shared<const MapSpec>(p, ShiftPower{1});
    AffineShellMap lip{ZpApprox::from_integer(p, 3, n), ZpApprox::zero(p, n), shift, 2};
    CHECK_THROWS_AS(affine_shell_conjugacy(lip, ZpApprox::zero(p, n)), HypothesisViolation);
  }
}

TEST_CASE("Q_p affine conjugacy") {
  Prime p(3);
  Rng rng(21);
  auto sample = [&](int n) {
    std::vector<QpApprox> v;
    for (int t = 0; t < n; ++t) {
      const int off = static_cast<int>(rng.uniform(5)) - 2;
      v.push_back(QpApprox(p, off, rng.digits(p, 10)));
    }
    return v;
  };

  SUBCASE("z / p is its own normal form") {
    MapSpec g(p, AffineQp{QpApprox(p, -1, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
                          QpApprox::zero_at(p, 20)});
    auto h = make_qp_affine_conjugacy(g, 16);
    for (const auto& x : sample(50)) {
      QpApprox hx = h.forward(x);
      for (int i = x.offset(); i < std::min(x.end(), hx.end()); ++i) CHECK(hx.digit_at(i) == x.digit_at(i));
    }
  }

  SUBCASE("a dilatation with a translation") {
    // g(z) = 2 z / 9 + 1/3
    MapSpec g(p, AffineQp{QpApprox::scaled(-2, ZpApprox::from_integer(p, 2, 24)),
                          QpApprox::scaled(-1, ZpApprox::from_integer(p, 1, 24))});
    auto h = make_qp_affine_conjugacy(g, 16);
    auto pts = sample(500);
    auto rep = verify_conjugacy(h, pts, true);
    CHECK(rep.semiconjugacy_ok);
    CHECK(rep.isometry_deviation_count == 0);
    CHECK(rep.collision_count == 0);
    CHECK(rep.pairs == 500u * 499u / 2);
    // (1 - 2/9) z = 1/3 gives z* = 3/7
    QpApprox zs = qp_fixed_point(g, 12);
    QpApprox check = (QpApprox::from_integer(p, 7, 20) * zs).normalized();
    CHECK(check.truncated_to_end(10) == QpApprox::from_integer(p, 3, 10).normalized().truncated_to_end(10));
    QpApprox h0 = h.forward(zs);
    CHECK((h0.is_zero() || *h0.valuation() >= 8));
  }

  SUBCASE("a contraction") {
    MapSpec g(p, AffineQp{QpApprox::scaled(1, ZpApprox::from_integer(p, 2, 24)),
                          QpApprox::from_integer(p, 1, 24)});
    auto h = make_qp_affine_conjugacy(g, 16);
    auto rep = verify_conjugacy(h, sample(200), true);
    CHECK(rep.semiconjugacy_ok);
    CHECK(rep.isometry_deviation_count == 0);
  }
}

TEST_CASE("a corrupted conjugacy leaves a residual with a witness") {
  Prime p(2);
  auto f = DigitFunctionTable::random(p, ScalingClass(1, 1), 8);
  auto h = make_shift_conjugacy(f);
  auto good = h.forward;
  h.forward = [good](const ZpApprox& x) {
    ZpApprox y = good(x);
    if (x.digit(0) == 1 && x.digit(1) == 1) {
      std::vector<Digit> d(y.digits().begin(), y.digits().end());
      d[2] ^= 1;
      return ZpApprox(x.prime(), d);
    }
    return y;
  };
  auto rep = verify_conjugacy(h, all_points(2, 8), false);
  CHECK_FALSE(rep.semiconjugacy_ok);
  REQUIRE(rep.residual_witness);
  CHECK(rep.max_residual.is_exact());
  const ZpApprox& w = *rep.residual_witness;
  // recompute the residual at the witness directly
  CHECK(distance(h.outer(h.forward(w)), h.forward(h.inner(w))).is_exact());
}
