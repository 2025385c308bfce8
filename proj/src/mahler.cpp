#include "padyn/mahler.hpp"

#include <algorithm>
#include <string>

namespace padyn {

namespace {

// f(j) known modulo p^N; integer inputs are exact, so the input is widened
// until the map determines N output digits.
ZpApprox eval_at_integer(const MapSpec& f, std::int64_t j, int precision) {
  for (int extra = 0; extra <= 64; ++extra) {
    ZpApprox y = eval(f, ZpApprox::from_integer(f.prime, j, precision + extra));
    if (y.precision() >= precision) return y.truncated(precision);
  }
  throw PrecisionError("map does not determine " + std::to_string(precision) +
                       " digits at integer inputs");
}

// n! / p^{v_p(n!)} modulo p^precision.
ZpApprox factorial_unit_part(std::uint64_t n, Prime p, int precision) {
  ZpApprox acc = ZpApprox::from_integer(p, 1, precision);
  for (std::uint64_t i = 2; i <= n; ++i) {
    std::uint64_t u = i;
    while (u % p.value() == 0) u /= p.value();
    acc = acc * ZpApprox::from_integer(p, static_cast<std::int64_t>(u), precision);
  }
  return acc;
}

}  // namespace

int floor_log(std::uint64_t n, std::uint32_t p) {
  if (n == 0) throw DomainError("floor_log of 0");
  int e = 0;
  while (n >= p) {
    n /= p;
    ++e;
  }
  return e;
}

MahlerSeries mahler_coefficients(const MapSpec& f, int max_index, int precision) {
  if (f.domain() != Domain::Zp) throw DomainError("Mahler series need a Z_p map");
  if (max_index < 0) throw DomainError("max index must be >= 0");
  if (precision < 1) throw DomainError("precision must be >= 1");
  std::vector<ZpApprox> diffs;
  diffs.reserve(static_cast<std::size_t>(max_index) + 1);
  for (int j = 0; j <= max_index; ++j) diffs.push_back(eval_at_integer(f, j, precision));
  // in-place forward differences: after round n, diffs[n] = Delta^n f(0)
  for (int n = 1; n <= max_index; ++n)
    for (int j = max_index; j >= n; --j)
      diffs[static_cast<std::size_t>(j)] =
          diffs[static_cast<std::size_t>(j)] - diffs[static_cast<std::size_t>(j) - 1];
  return MahlerSeries{f.prime, std::move(diffs)};
}

int mahler_eval_precision(const MahlerSeries& series, int input_precision) {
  int prec = input_precision;
  for (int n = 0; n < series.length(); ++n) {
    int e = factorial_valuation(static_cast<std::uint64_t>(n), series.prime.value());
    prec = std::min({prec, series.coefficients[static_cast<std::size_t>(n)].precision(),
                     input_precision - e});
  }
  return prec;
}

ZpApprox mahler_eval(const MahlerSeries& series, const ZpApprox& x) {
  require_same_prime(series.prime, x.prime());
  if (series.coefficients.empty()) throw DomainError("empty Mahler series");
  const int nx = x.precision();
  const int out = mahler_eval_precision(series, nx);
  if (out < 1) {
    throw PrecisionError("C(x, " + std::to_string(series.length() - 1) + ") needs more than " +
                         std::to_string(nx) + " input digits");
  }
  const Prime p = series.prime;
  ZpApprox sum = ZpApprox::zero(p, out);
  ZpApprox falling = ZpApprox::from_integer(p, 1, nx);
  for (int n = 0; n < series.length(); ++n) {
    if (n > 0) falling = falling * (x - ZpApprox::from_integer(p, n - 1, nx));
    int e = factorial_valuation(static_cast<std::uint64_t>(n), p.value());
    ZpApprox binom = falling.shifted_down(e).truncated(out) *
                     inverse_unit(factorial_unit_part(static_cast<std::uint64_t>(n), p, out));
    sum = sum + series.coefficients[static_cast<std::size_t>(n)].truncated(out) * binom;
  }
  return sum;
}

OneLipschitzReport one_lipschitz_test(const MahlerSeries& series) {
  OneLipschitzReport report;
  for (int n = 0; n < series.length(); ++n) {
    OneLipschitzReport::Entry e;
    e.n = n;
    e.required_exponent =
        n == 0 ? 0 : floor_log(static_cast<std::uint64_t>(n), series.prime.value());
    e.norm = norm(series.coefficients[static_cast<std::size_t>(n)]);
    if (e.norm.at_most(e.required_exponent)) {
      e.status = OneLipschitzReport::Entry::Status::Pass;
    } else if (e.norm.is_exact()) {
      e.status = OneLipschitzReport::Entry::Status::Fail;
      if (!report.first_violation) report.first_violation = n;
      report.passed = false;
    } else {
      e.status = OneLipschitzReport::Entry::Status::Undecided;
      report.undecided.push_back(n);
      report.passed = false;
    }
    report.entries.push_back(e);
  }
  return report;
}

}  // namespace padyn
