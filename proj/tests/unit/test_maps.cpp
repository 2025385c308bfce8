#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../support/oracles.hpp"
#include "padyn/io.hpp"
#include "padyn/mahler.hpp"
#include "padyn/map_spec.hpp"
#include "padyn/rng.hpp"
#include "padyn/text.hpp"

using namespace padyn;
using oracle::Digits;

namespace {

// S as a dense (p^-1, p) table of the given depth: f_i(x_0..x_{i+1}) = x_{i+1}.
std::vector<std::vector<Digit>> shift_tables(std::uint32_t p, int depth) {
  std::vector<std::vector<Digit>> t;
  for (int i = 0; i < depth; ++i) {
    const int arity = i + 2;
    std::vector<Digit> row(oracle::power(p, arity));
    for (std::uint64_t v = 0; v < row.size(); ++v) row[v] = oracle::digits_of(v, p, arity)[static_cast<std::size_t>(i + 1)];
    t.push_back(row);
  }
  return t;
}

}  // namespace

TEST_CASE("shift powers, T_j and R follow their digit rules") {
  for (std::uint32_t p : {2u, 3u})
    for (int m = 1; m <= 2; ++m)
      for (int j = 0; j <= 3; ++j) {
        const int n = p == 2 ? 8 : 6;
        MapSpec s(Prime(p), ShiftPower{m}), t(Prime(p), Tj{m, j}), r(Prime(p), Rmap{m});
        for (std::uint64_t v = 0; v < oracle::power(p, n); ++v) {
          Digits x = oracle::digits_of(v, p, n);
          ZpApprox z = oracle::zp(p, x);
          REQUIRE(oracle::digits_of(eval(s, z)) == oracle::shift(x, m));
          REQUIRE(oracle::digits_of(eval(t, z)) == oracle::tj(x, m, j));
          if (j == 0) REQUIRE(oracle::digits_of(eval(r, z)) == oracle::rmap(x, m, p));
        }
      }
}

TEST_CASE("T_0 is the shift power") {
  Prime p(3);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    ZpApprox x(p, rng.digits(p, 9));
    CHECK(eval(MapSpec(p, Tj{2, 0}), x) == eval(MapSpec(p, ShiftPower{2}), x));
  }
}

TEST_CASE("affine maps on Z_p agree with integers") {
  Prime p(5);
  const int n = 4;
  const std::uint64_t size = oracle::power(5, n);
  MapSpec f(p, AffineZp{ZpApprox::from_integer(p, 7, n), ZpApprox::from_integer(p, 13, n)});
  for (std::uint64_t v = 0; v < size; ++v)
    CHECK(eval(f, ZpApprox::from_integer(p, static_cast<std::int64_t>(v), n)).to_uint() ==
          (7 * v + 13) % size);
}

TEST_CASE("g_a mod Z_p with a = 1/p is the shift") {
  Prime p(3);
  MapSpec g(p, GaModZp{QpApprox(p, -1, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0})});
  CHECK(natural_class(g) == ScalingClass(1, 1));
  for (std::uint64_t v = 0; v < oracle::power(3, 6); ++v) {
    Digits x = oracle::digits_of(v, 3, 6);
    CHECK(oracle::digits_of(eval(g, oracle::zp(3, x))) == oracle::shift(x, 1));
  }
}

TEST_CASE("substitutions concatenate and never expand") {
  Prime p(2);
  Substitution s{{{1}, {0, 0}}};
  MapSpec f(p, s);
  CHECK(oracle::digits_of(eval(f, ZpApprox(p, {0, 1, 1}))) == Digits{1, 0, 0, 0, 0});
  CHECK(one_lipschitz_by_construction(f));
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    ZpApprox x(p, rng.digits(p, 10)), y(p, rng.digits(p, 10));
    PNorm in = distance(x, y), out = distance(eval(f, x), eval(f, y));
    CHECK(out.at_most(in));
  }
  CHECK_THROWS_AS(MapSpec(p, Substitution{{{1}}}), DomainError);
  CHECK_THROWS_AS(MapSpec(p, Substitution{{{1}, {}}}), DomainError);
}

TEST_CASE("dense tables evaluate by their digit functions") {
  auto f = DigitFunctionTable::dense(Prime(2), ScalingClass(1, 1), shift_tables(2, 6));
  for (std::uint64_t v = 0; v < 128; ++v) {
    Digits x = oracle::digits_of(v, 2, 7);
    CHECK(oracle::digits_of(f.apply(oracle::zp(2, x))) == oracle::shift(x, 1));
  }
}

TEST_CASE("bijectivity on the last variable is enforced with a witness") {
  auto tables = shift_tables(3, 4);
  tables[2][5] = tables[2][5 + 27];  // same prefix, two last-variable values collide
  CHECK_THROWS_AS(DigitFunctionTable::dense(Prime(3), ScalingClass(1, 1), tables),
                  BijectivityViolation);
  auto bad = DigitFunctionTable::dense_unchecked(Prime(3), ScalingClass(1, 1), tables);
  try {
    bad.check_bijectivity();
    FAIL("expected a violation");
  } catch (const BijectivityViolation& e) {
    CHECK(e.digit() == 2);
    // recompute: the two inputs differing only in the last variable collide
    Digits x(e.prefix().begin(), e.prefix().end());
    CHECK(x.size() == 3);
    int hits = 0;
    std::vector<int> seen(3, 0);
    for (Digit c = 0; c < 3; ++c) {
      Digits y = x;
      y.push_back(c);
      if (seen[bad.digit(2, y)]++) ++hits;
    }
    CHECK(hits > 0);
  }
  auto wrong_size = shift_tables(2, 3);
  wrong_size[1].pop_back();
  CHECK_THROWS(DigitFunctionTable::dense(Prime(2), ScalingClass(1, 1), wrong_size));
}

TEST_CASE("random and perturbed tables") {
  Prime p(3);
  ScalingClass cls(2, 1);
  auto a = DigitFunctionTable::random(p, cls, 17), b = DigitFunctionTable::random(p, cls, 17);
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    ZpApprox x(p, rng.digits(p, 12));
    CHECK(a.apply(x) == b.apply(x));
  }
  a.materialized(5).check_bijectivity();

  auto g = DigitFunctionTable::perturbed(a, 3, 99);
  g.materialized(5).check_bijectivity();
  bool differs = false;
  for (int t = 0; t < 200; ++t) {
    ZpApprox x(p, rng.digits(p, 12));
    Digits fa = oracle::image(a, oracle::digits_of(x)), ga = oracle::image(g, oracle::digits_of(x));
    int d = oracle::first_difference(fa, ga);
    CHECK((d == -1 || d >= 3));
    differs = differs || d >= 0;
  }
  CHECK(differs);
}

TEST_CASE("extraction reproduces direct evaluation") {
  Prime p(2);
  const MapSpec specs[] = {MapSpec(p, Tj{1, 1}), MapSpec(p, Rmap{1}), MapSpec(p, ShiftPower{2}),
                           MapSpec(p, Tj{2, 1})};
  for (const auto& spec : specs) {
    ScalingClass cls = *natural_class(spec);
    const int depth = 5;
    auto t = extract_table(spec, cls, depth);
    const int n = std::max(cls.k, cls.m + depth);
    for (std::uint64_t v = 0; v < oracle::power(2, n); ++v) {
      ZpApprox x = oracle::zp(2, oracle::digits_of(v, 2, n));
      ZpApprox fx = eval(spec, x), tx = t.apply(x);
      REQUIRE(tx.precision() <= fx.precision());
      CHECK(fx.truncated(tx.precision()) == tx);
    }
  }
}

TEST_CASE("extraction rejects a wrong class") {
  Prime p(2);
  CHECK_THROWS(extract_table(MapSpec(p, Tj{1, 2}), ScalingClass(1, 1), 4));
  CHECK_THROWS(extract_table(MapSpec(p, ShiftPower{2}), ScalingClass(1, 1), 4));
}

TEST_CASE("iterate tables equal repeated application") {
  Prime p(2);
  auto f = DigitFunctionTable::random(p, ScalingClass(2, 1), 5, 8);
  auto it = iterate_table(f, 2, 6);
  CHECK(it.table.scaling_class() == ScalingClass(3, 2));
  CHECK(it.table.depth() == 5);
  const int n = 2 + 1 + it.table.depth();
  for (std::uint64_t v = 0; v < oracle::power(2, n); ++v) {
    Digits x = oracle::digits_of(v, 2, n);
    Digits twice = oracle::iterate(f, 2, x);
    Digits tab = oracle::digits_of(it.table.apply(oracle::zp(2, x)));
    REQUIRE(tab.size() <= twice.size());
    CHECK(Digits(twice.begin(), twice.begin() + static_cast<long>(tab.size())) == tab);
  }
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    Digits x = rng.digits(p, 12);
    CHECK(oracle::digits_of(iterate(f, 3, oracle::zp(2, x))) == oracle::iterate(f, 3, x));
  }
}

TEST_CASE("composition applies left to right") {
  Prime p(3);
  MapSpec c(p, Compose{{MapSpec(p, ShiftPower{1}), MapSpec(p, Tj{1, 1})}});
  CHECK(natural_class(c) == ScalingClass(3, 2));
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    Digits x = rng.digits(p, 10);
    CHECK(oracle::digits_of(eval(c, oracle::zp(3, x))) == oracle::tj(oracle::shift(x, 1), 1, 1));
  }
}

TEST_CASE("map specs round-trip byte for byte") {
  Prime p(3);
  auto psi = std::make_shared<const MapSpec>(p, Substitution{{{1}, {2, 0}, {0}}});
  std::vector<MapSpec> specs{
      MapSpec(p, ShiftPower{2}),
      MapSpec(p, Tj{1, 3}),
      MapSpec(p, Rmap{2}),
      MapSpec(p, AffineZp{ZpApprox::from_integer(p, 3, 5), ZpApprox::from_integer(p, 1, 5)}),
      MapSpec(p, AffineQp{QpApprox(p, -1, {2, 0, 0}), QpApprox(p, 0, {1, 2})}),
      MapSpec(p, PerturbedAffineQp{QpApprox(p, -1, {1, 0, 0}), QpApprox(p, 0, {1}), psi, 2}),
      MapSpec(p, GaModZp{QpApprox(p, -2, {1, 1})}),
      MapSpec(p, Substitution{{{1}, {2, 0}, {0}}}),
      MapSpec(p, TableMap{DigitFunctionTable::random(p, ScalingClass(2, 1), 4)}),
      MapSpec(p, TableMap{DigitFunctionTable::random(p, ScalingClass(2, 1), 4, 6)}),
      MapSpec(p, TableMap{DigitFunctionTable::dense(p, ScalingClass(1, 1), shift_tables(3, 2))}),
      MapSpec(p, TableMap{DigitFunctionTable::perturbed(
                     DigitFunctionTable::from_spec(MapSpec(p, ShiftPower{1}), ScalingClass(1, 1)),
                     1, 7)}),
      MapSpec(p, MahlerMap{MahlerSeries{p, {ZpApprox::from_integer(p, 0, 4),
                                             ZpApprox::from_integer(p, 1, 4)}}}),
      MapSpec(p, Compose{{MapSpec(p, ShiftPower{1}), MapSpec(p, Tj{1, 1})}}),
  };
  for (const auto& s : specs) {
    const std::string text = dump_mapspec(s);
    MapSpec back = parse_mapspec(text);
    CHECK(dump_mapspec(back) == text);
    CHECK(back.type_name() == s.type_name());
  }
  // a parsed table still evaluates like the original
  MapSpec rnd = specs[8];
  MapSpec back = parse_mapspec(dump_mapspec(rnd));
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    ZpApprox x(p, rng.digits(p, 10));
    CHECK(eval(back, x) == eval(rnd, x));
  }
}

TEST_CASE("malformed specs are parse errors") {
  CHECK_THROWS_AS(parse_mapspec("{"), ParseError);
  CHECK_THROWS_AS(parse_mapspec(R"({"type":"nope","prime":2})"), ParseError);
  CHECK_THROWS_AS(parse_mapspec(R"({"type":"shift_power","prime":2})"), ParseError);
  CHECK_THROWS_AS(parse_mapspec(R"({"type":"shift_power","prime":"two","m":1})"), ParseError);
  CHECK_THROWS_AS(
      parse_mapspec(
          R"({"type":"table","prime":2,"table":{"source":"dense","k":1,"m":1,"depth":1,"arities":[3],"digits":[[0,0,1,1]]}})"),
      ParseError);
  CHECK_THROWS_AS(parse_mapspec(R"({"type":"affine_zp","prime":2,"a":"2^0 * [2]","b":"2^0 * [1]"})"),
                  ParseError);
}

TEST_CASE("Mahler coefficients of S^k") {
  for (std::uint32_t pv : {2u, 3u})
    for (int k = 1; k <= 2; ++k) {
      Prime p(pv);
      const int q = static_cast<int>(oracle::power(pv, k));
      const int max_index = q + 4;
      auto series = mahler_coefficients(MapSpec(p, ShiftPower{k}), max_index, 8);
      const std::int64_t mod = static_cast<std::int64_t>(oracle::power(pv, 8));
      for (int n = 0; n <= max_index; ++n) {
        // a_n = sum_j (-1)^{n-j} C(n, j) floor(j / p^k), in exact integers
        __int128 a = 0, c = 1;
        for (int j = 0; j <= n; ++j) {
          a += ((n - j) % 2 ? -c : c) * (j / q);
          c = c * (n - j) / (j + 1);
        }
        std::int64_t r = static_cast<std::int64_t>(((a % mod) + mod) % mod);
        CHECK(series.coefficients[static_cast<std::size_t>(n)].to_uint() == static_cast<std::uint64_t>(r));
        if (n < q) CHECK(series.coefficients[static_cast<std::size_t>(n)].is_zero());
      }
      CHECK(series.coefficients[static_cast<std::size_t>(q)] == ZpApprox::from_integer(p, 1, 8));
    }
}

TEST_CASE("Mahler evaluation reproduces T_j on integers") {
  Prime p(2);
  MapSpec f(p, Tj{1, 1});
  const int max_index = 15;
  auto series = mahler_coefficients(f, max_index, 10);
  for (std::int64_t v = 0; v < 16; ++v) {
    ZpApprox x = ZpApprox::from_integer(p, v, 16);
    ZpApprox y = mahler_eval(series, x);
    CHECK(y.precision() == mahler_eval_precision(series, 16));
    CHECK(y.precision() == 5);
    ZpApprox direct = eval(f, ZpApprox::from_integer(p, v, 30));
    CHECK(direct.truncated(y.precision()) == y);
  }
}

TEST_CASE("the 1-Lipschitz criterion") {
  Prime p(3);
  auto sub = mahler_coefficients(MapSpec(p, Substitution{{{1}, {2, 0}, {0}}}), 20, 6);
  CHECK(one_lipschitz_test(sub).passed);

  // x + 3 C(x, 2) is 1-Lipschitz at p = 3; dividing the C(x, 2) term by 3 breaks it
  MahlerSeries ok{p, {ZpApprox::from_integer(p, 0, 6), ZpApprox::from_integer(p, 1, 6),
                      ZpApprox::from_integer(p, 3, 6), ZpApprox::from_integer(p, 0, 6)}};
  CHECK(one_lipschitz_test(ok).passed);
  MahlerSeries scaled = ok;
  scaled.coefficients[2] = ZpApprox::from_integer(p, 1, 6);
  CHECK(one_lipschitz_test(scaled).passed);  // n = 2 < p needs nothing
  scaled.coefficients[3] = ZpApprox::from_integer(p, 1, 6);
  auto rep = one_lipschitz_test(scaled);
  CHECK_FALSE(rep.passed);
  REQUIRE(rep.first_violation);
  CHECK(*rep.first_violation == 3);
  // witness: the map really expands a pair at distance p^-1
  MapSpec g(p, MahlerMap{scaled});
  PNorm in = distance(ZpApprox::from_integer(p, 0, 6), ZpApprox::from_integer(p, 3, 6));
  PNorm out = distance(eval(g, ZpApprox::from_integer(p, 0, 6)), eval(g, ZpApprox::from_integer(p, 3, 6)));
  CHECK(in == PNorm::exact(1));
  CHECK(compare(out, in) == std::partial_ordering::greater);
  CHECK(floor_log(9, 3) == 2);
  CHECK(floor_log(8, 3) == 1);
}
