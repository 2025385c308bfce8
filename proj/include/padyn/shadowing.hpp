#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padyn/map_spec.hpp"

namespace padyn {

// Points x_n for n = first_index .. first_index + points.size() - 1 and
// residuals w_n = x_{n+1} - f(x_n) for every n but the last.
template <class T>
struct PseudoOrbit {
  int first_index = 0;
  std::vector<T> points;
  std::vector<T> residuals;
  PNorm certified_delta;

  int last_index() const { return first_index + static_cast<int>(points.size()) - 1; }
  bool two_sided() const { return first_index < 0; }
  const T& at(int n) const { return points.at(static_cast<std::size_t>(n - first_index)); }
  const T& residual(int n) const { return residuals.at(static_cast<std::size_t>(n - first_index)); }
};

using ZpOrbit = PseudoOrbit<ZpApprox>;
using QpOrbit = PseudoOrbit<QpApprox>;

// Computes residuals and the certified delta (max of residual norms).
ZpOrbit make_orbit(const MapSpec& f, std::vector<ZpApprox> points);
QpOrbit make_orbit(const MapSpec& g, int first_index, std::vector<QpApprox> points);

// Whether the stored residuals and delta match a recomputation.
bool residuals_consistent(const MapSpec& f, const ZpOrbit& orbit);
bool residuals_consistent(const MapSpec& g, const QpOrbit& orbit);

// x_{n+1} = f(x_n) + w_n, w_n uniform among values with digits in
// [delta_exponent, N), N the precision of x0; f(x_n) is padded with zero
// digits back to N first. delta_exponent >= N gives the true orbit (whose
// precision then shrinks by the map's loss per step).
ZpOrbit perturb_orbit(const MapSpec& f, const ZpApprox& x0, int delta_exponent, int steps,
                      std::uint64_t seed);

// Two-sided version on Q_p: indices -back .. forward, all points ending at
// x0.end(). Backward points are x_{n-1} = g^{-1}(x_n - w_{n-1}).
QpOrbit perturb_orbit(const MapSpec& g, const QpApprox& x0, int delta_exponent, int back,
                      int forward, std::uint64_t seed);

template <class T>
struct ShadowResult {
  T shadow;
  PNorm epsilon;
  int first_index = 0;  // verified window
  int last_index = 0;
  std::vector<PNorm> distances;  // d(x_n, f^n(shadow)), n = first_index..last_index
  std::string solver;
  std::string note;
  std::string certification;
  int determined_digits = 0;
  // Sup-norm exponents of successive corrections (dilatation solver).
  std::vector<PNorm> corrections;
  int iterations = 0;
};

// Digit back-substitution for a (p^-k, p^m) table. Requires a one-sided
// orbit certified at delta <= p^{-l-s} with points of precision >= k + s;
// returns y with d(x_n, f^n(y)) <= p^{-k-s} and k + s + T m determined
// digits.
ShadowResult<ZpApprox> shadow_locally_scaling(const DigitFunctionTable& f, const ZpOrbit& orbit,
                                              int s);

// y = x_0 for a 1-Lipschitz map. The certificate is structural, the Mahler
// criterion for Mahler maps, or 1000 seeded sampled pairs otherwise.
ShadowResult<ZpApprox> shadow_lipschitz(const MapSpec& f, const ZpOrbit& orbit,
                                        std::uint64_t seed = 0);

// Series shadow of a two-sided orbit of z -> a z + b.
ShadowResult<QpApprox> shadow_affine_qp(const QpApprox& a, const QpApprox& b,
                                        const QpOrbit& orbit);

// Contraction iteration on correction sequences:
//   expanding g:  Phi(y)_n = g^{-1}(x_{n+1} + y_{n+1}) - x_n, y_last = 0
//   contracting g: Phi(y)_n = g(x_{n-1} + y_{n-1}) - x_n,     y_first = 0
ShadowResult<QpApprox> shadow_dilatation(const MapSpec& g, const QpOrbit& orbit,
                                         int max_iterations = 256);

// d(x_n, f^n(y)) recomputed from scratch.
std::vector<PNorm> shadow_distances(const MapSpec& f, const ZpOrbit& orbit, const ZpApprox& y);
// Two-sided; negative n through eval_inverse.
std::vector<PNorm> shadow_distances(const MapSpec& g, const QpOrbit& orbit, const QpApprox& y);

}  // namespace padyn
