#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padyn/map_spec.hpp"

namespace padyn {

enum class ConjugacyKind { ToShiftPower, Nearby, AffineShell, QpAffine };
enum class IsometryStatus { ProvenByConstruction, SampleVerified, NotClaimed };

const char* to_string(ConjugacyKind kind);
const char* to_string(IsometryStatus status);

// h with outer o h = h o inner. Values are returned on their determined
// digits only.
template <class T>
struct ConjugacyMap {
  ConjugacyKind kind = ConjugacyKind::ToShiftPower;
  std::function<T(const T&)> forward;
  std::function<T(const T&)> inverse;  // may be empty
  std::function<T(const T&)> outer;
  std::function<T(const T&)> inner;
  IsometryStatus isometry = IsometryStatus::NotClaimed;
  std::uint64_t isometry_samples = 0;
  std::optional<PNorm> semiconjugacy_residual;  // set by verify_conjugacy
  std::string description;
};

// Digit j of h(x) is digit (j mod k) of f^{floor(j/k)}(x); class (k, k).
ZpApprox conjugate_to_shift(const DigitFunctionTable& f, const ZpApprox& x);
// Solves h(x) = y block by block through the bijective last variables.
ZpApprox invert_shift_conjugacy(const DigitFunctionTable& f, const ZpApprox& y);

// The f-shadow of the g-orbit of x (h o g = f o h), determined on
// k + horizon * m digits. Default horizon uses all of x's digits. Requires
// sup ||f - g|| <= the delta of shadowing_modulus_bound(class, 0).
ZpApprox conjugate_nearby(const DigitFunctionTable& f, const DigitFunctionTable& g,
                          const ZpApprox& x, std::optional<int> horizon = std::nullopt);

// g(z) = a z + b + p^scale phi(z) on Z_p with ||a|| = p^-k < 1 and phi
// 1-Lipschitz, so g - (a z + b) is p^-scale Lipschitz; scale > k.
struct AffineShellMap {
  ZpApprox a;
  ZpApprox b;
  std::shared_ptr<const MapSpec> phi;
  int scale = 2;
};

ZpApprox eval(const AffineShellMap& g, const ZpApprox& z);
// Fixed point of the contraction g at the given precision.
ZpApprox fixed_point(const AffineShellMap& g, int precision);

// H with H o f = g o H, f(z) = a z + b: both maps are translated to fix 0,
// h is the identity on the first shell (valuations 0..k-1), and
// h(a u) = a h(u) + psi(h(u)) on deeper shells. ||H(z) - z*_g|| equals
// ||z - z*_f|| (asserted).
ZpApprox affine_shell_conjugacy(const AffineShellMap& g, const ZpApprox& z);

// Fixed point of a Q_p affine or perturbed affine map.
QpApprox qp_fixed_point(const MapSpec& g, int end);

// Isometric h with h o g = f o h where f(z) = z / p^k when g expands by p^k
// and f(z) = p^k z when g contracts by p^-k. Block j (digits jk..jk+k-1) of
// h(x) is digits 0..k-1 of G^j(x - z*), G = g translated to fix 0.
QpApprox qp_affine_conjugacy(const MapSpec& g, const QpApprox& x, int horizon);

ConjugacyMap<ZpApprox> make_shift_conjugacy(const DigitFunctionTable& f);
ConjugacyMap<ZpApprox> make_nearby_conjugacy(const DigitFunctionTable& f,
                                             const DigitFunctionTable& g);
ConjugacyMap<ZpApprox> make_affine_shell_conjugacy(const AffineShellMap& g);
ConjugacyMap<QpApprox> make_qp_affine_conjugacy(const MapSpec& g, int horizon);

template <class T>
struct ConjugacyReport {
  std::uint64_t samples = 0;
  std::uint64_t pairs = 0;
  // Largest residual d(outer(h(x)), h(inner(x))); Exact means a discrepancy
  // on determined digits.
  PNorm max_residual = PNorm::below(1 << 20);
  bool semiconjugacy_ok = true;
  std::optional<T> residual_witness;
  std::vector<std::pair<T, T>> isometry_deviations;  // at most 16
  std::uint64_t isometry_deviation_count = 0;
  std::vector<std::pair<T, T>> collisions;  // at most 16
  std::uint64_t collision_count = 0;
};

// Checks on the samples; all pairs when there are at most 1024 samples,
// consecutive pairs otherwise. Isometry deviations are only counted when
// check_isometry is set.
ConjugacyReport<ZpApprox> verify_conjugacy(ConjugacyMap<ZpApprox>& h,
                                           const std::vector<ZpApprox>& samples,
                                           bool check_isometry);
ConjugacyReport<QpApprox> verify_conjugacy(ConjugacyMap<QpApprox>& h,
                                           const std::vector<QpApprox>& samples,
                                           bool check_isometry);

}  // namespace padyn
