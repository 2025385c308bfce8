#pragma once

#include <optional>
#include <vector>

#include "padyn/map_spec.hpp"

namespace padyn {

// a_n = sum_j (-1)^{n-j} C(n, j) f(j) for n = 0..M, modulo p^N, by forward
// differences of f at the integers 0..M.
MahlerSeries mahler_coefficients(const MapSpec& f, int max_index, int precision);

// sum_n a_n C(x, n). C(x, n) is the falling product divided by n!, whose
// p-part is removed exactly (Legendre), so its precision is N_x - v_p(n!).
// Result precision: min over terms of min(N_{a_n}, N_x - v_p(n!)).
// Throws PrecisionError when v_p(n!) >= N_x for some n in the series.
ZpApprox mahler_eval(const MahlerSeries& series, const ZpApprox& x);

// Precision mahler_eval guarantees for an input of precision N_x.
int mahler_eval_precision(const MahlerSeries& series, int input_precision);

// 1-Lipschitz criterion ||a_n|| <= p^{-floor(log_p n)} checked for every n.
struct OneLipschitzReport {
  struct Entry {
    int n = 0;
    int required_exponent = 0;  // floor(log_p n)
    PNorm norm;
    enum class Status { Pass, Fail, Undecided } status = Status::Pass;
  };

  bool passed = true;
  std::optional<int> first_violation;
  std::vector<int> undecided;
  std::vector<Entry> entries;
};

OneLipschitzReport one_lipschitz_test(const MahlerSeries& series);

int floor_log(std::uint64_t n, std::uint32_t p);

}  // namespace padyn
