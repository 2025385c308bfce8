#include "padyn/conjugacy.hpp"

#include <map>
#include <string>

#include "padyn/analysis.hpp"
#include "padyn/mahler.hpp"
#include "padyn/shadowing.hpp"

namespace padyn {

namespace {

void require_class_kk(const DigitFunctionTable& f) {
  if (f.scaling_class().l() != 0)
    throw PreconditionError("conjugation to S^k needs class (k, k), got (" +
                            std::to_string(f.scaling_class().k) + ", " +
                            std::to_string(f.scaling_class().m) + ")");
}

void require_depth(const DigitFunctionTable& f, int needed) {
  if (f.depth() < needed)
    throw PreconditionError("table depth " + std::to_string(f.depth()) + " < " +
                            std::to_string(needed));
}

template <class T>
ConjugacyReport<T> verify_impl(ConjugacyMap<T>& h, const std::vector<T>& samples,
                               bool check_isometry) {
  ConjugacyReport<T> report;
  report.samples = samples.size();
  std::vector<T> images;
  images.reserve(samples.size());
  for (const auto& x : samples) {
    T hx = h.forward(x);
    images.push_back(hx);
    PNorm r = distance(h.outer(hx), h.forward(h.inner(x)));
    report.max_residual = max_norm(report.max_residual, r);
    if (r.is_exact() && report.semiconjugacy_ok) {
      report.semiconjugacy_ok = false;
      report.residual_witness = x;
    }
  }
  auto judge = [&](std::size_t i, std::size_t j) {
    ++report.pairs;
    PNorm in = distance(samples[i], samples[j]);
    PNorm out = distance(images[i], images[j]);
    if (in.is_exact() && !out.is_exact()) {
      ++report.collision_count;
      if (report.collisions.size() < 16) report.collisions.emplace_back(samples[i], samples[j]);
    }
    if (check_isometry && (in.is_exact() || out.is_exact()) && !(in == out)) {
      ++report.isometry_deviation_count;
      if (report.isometry_deviations.size() < 16)
        report.isometry_deviations.emplace_back(samples[i], samples[j]);
    }
  };
  if (samples.size() <= 1024) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (std::size_t j = i + 1; j < samples.size(); ++j) judge(i, j);
  } else {
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) judge(i, i + 1);
  }
  h.semiconjugacy_residual = report.max_residual;
  if (check_isometry && h.isometry == IsometryStatus::NotClaimed &&
      report.isometry_deviation_count == 0) {
    h.isometry = IsometryStatus::SampleVerified;
    h.isometry_samples = report.pairs;
  }
  return report;
}

bool lipschitz_certified(const MapSpec& phi) {
  if (one_lipschitz_by_construction(phi)) return true;
  if (const auto* mm = std::get_if<MahlerMap>(&phi.body)) return one_lipschitz_test(mm->series).passed;
  return false;
}

}  // namespace

const char* to_string(ConjugacyKind kind) {
  switch (kind) {
    case ConjugacyKind::ToShiftPower: return "to_shift_power";
    case ConjugacyKind::Nearby: return "nearby";
    case ConjugacyKind::AffineShell: return "affine_shell";
    case ConjugacyKind::QpAffine: return "qp_affine";
  }
  return "";
}

const char* to_string(IsometryStatus status) {
  switch (status) {
    case IsometryStatus::ProvenByConstruction: return "proven-by-construction";
    case IsometryStatus::SampleVerified: return "sample-verified";
    case IsometryStatus::NotClaimed: return "not-claimed";
  }
  return "";
}

ZpApprox conjugate_to_shift(const DigitFunctionTable& f, const ZpApprox& x) {
  require_class_kk(f);
  require_same_prime(f.prime(), x.prime());
  const int k = f.scaling_class().k, n = x.precision();
  require_depth(f, n - k);
  std::vector<Digit> out;
  out.reserve(static_cast<std::size_t>(n));
  ZpApprox cur = x;
  for (int block = 0; block * k < n; ++block) {
    for (int t = 0; t < k && block * k + t < n; ++t) out.push_back(cur.digit(t));
    if ((block + 1) * k < n) cur = f.apply(cur);
  }
  return ZpApprox(x.prime(), std::move(out));
}

ZpApprox invert_shift_conjugacy(const DigitFunctionTable& f, const ZpApprox& y) {
  require_class_kk(f);
  require_same_prime(f.prime(), y.prime());
  const int k = f.scaling_class().k, n = y.precision();
  const std::uint32_t p = f.prime().value();
  require_depth(f, n - k);
  // z[j] = f^j(x) on its known prefix
  std::vector<std::vector<Digit>> z(1);
  for (int i = 0; i < std::min(n, k); ++i) z[0].push_back(y.digit(i));
  for (int idx = k; idx < n; ++idx) {
    const int block = idx / k, t = idx % k;
    if (t == 0) z.emplace_back();
    int solutions = 0;
    std::vector<Digit> chosen;
    for (Digit c = 0; c < p; ++c) {
      std::vector<Digit> chain{c};
      for (int j = 1; j <= block; ++j) {
        auto& below = z[static_cast<std::size_t>(j - 1)];
        below.push_back(chain.back());
        chain.push_back(f.digit(static_cast<int>(below.size()) - 1 - k, below));
        below.pop_back();
      }
      if (chain.back() == y.digit(idx)) {
        ++solutions;
        chosen = chain;
      }
    }
    if (solutions != 1)
      throw ConstraintUnsolvable(block, idx,
                                 "digit " + std::to_string(idx) + " of h^-1(y) has " +
                                     std::to_string(solutions) + " solutions");
    for (int j = 0; j <= block; ++j)
      z[static_cast<std::size_t>(j)].push_back(chosen[static_cast<std::size_t>(j)]);
  }
  return ZpApprox(y.prime(), z[0]);
}

ZpApprox conjugate_nearby(const DigitFunctionTable& f, const DigitFunctionTable& g,
                          const ZpApprox& x, std::optional<int> horizon) {
  require_same_prime(f.prime(), g.prime());
  if (!(f.scaling_class() == g.scaling_class()))
    throw PreconditionError("nearby conjugacy needs maps of the same class");
  const ScalingClass cls = f.scaling_class();
  const int bound = shadowing_modulus_bound(cls, 0).delta_exponent;
  PNorm gap = table_distance(f, g, bound);
  if (gap.is_exact())
    throw HypothesisViolation("sup ||f - g|| = p^-" + std::to_string(gap.exponent) +
                              " exceeds p^-" + std::to_string(bound));
  const int n = x.precision();
  const int natural = (n - cls.k) / cls.m;
  const int steps = horizon ? std::min(*horizon, natural) : natural;
  if (steps < 1)
    throw PreconditionError("horizon too short to determine digits beyond index " +
                            std::to_string(cls.k));
  std::vector<ZpApprox> points{x};
  for (int t = 0; t < steps; ++t) points.push_back(g.apply(points.back()));
  ZpOrbit orbit = make_orbit(MapSpec(f.prime(), TableMap{f}), std::move(points));
  return shadow_locally_scaling(f, orbit, 0).shadow;
}

ZpApprox eval(const AffineShellMap& g, const ZpApprox& z) {
  return g.a * z + g.b + eval(*g.phi, z).shifted_up(g.scale);
}

ZpApprox fixed_point(const AffineShellMap& g, int precision) {
  ZpApprox z = ZpApprox::zero(g.a.prime(), precision);
  for (int it = 0; it < 2 * precision + 4; ++it) {
    ZpApprox next = eval(g, z);
    if (next.precision() < precision)
      throw PrecisionError("coefficients carry fewer than " + std::to_string(precision) +
                           " digits");
    next = next.truncated(precision);
    if (next == z) return z;
    z = next;
  }
  throw ConvergenceFailure("fixed point iteration did not settle");
}

ZpApprox affine_shell_conjugacy(const AffineShellMap& g, const ZpApprox& z) {
  const Prime p = g.a.prime();
  require_same_prime(p, z.prime());
  if (!g.phi) throw DomainError("perturbation missing");
  auto va = g.a.valuation();
  if (!va || *va < 1) throw PreconditionError("affine shell conjugacy needs ||a|| < 1");
  const int k = *va;
  if (g.scale <= k)
    throw HypothesisViolation("perturbation Lipschitz constant p^-" + std::to_string(g.scale) +
                              " is not below ||a|| = p^-" + std::to_string(k));
  if (!lipschitz_certified(*g.phi))
    throw HypothesisViolation("perturbation is not certified 1-Lipschitz");
  const int n = z.precision();
  if (g.a.precision() < n || g.b.precision() < n)
    throw PrecisionError("coefficients carry fewer digits than the input");

  const ZpApprox one = ZpApprox::from_integer(p, 1, n);
  const ZpApprox zf = g.b.truncated(n) * inverse_unit(one - g.a.truncated(n));
  const ZpApprox zg = fixed_point(g, n);
  const ZpApprox phi_zg = eval(*g.phi, zg);
  const ZpApprox alpha = g.a.shifted_down(k);
  const ZpApprox alpha_inv = inverse_unit(alpha);
  auto psi = [&](const ZpApprox& v) {
    return (eval(*g.phi, v + zg.truncated(v.precision())) - phi_zg).shifted_up(g.scale);
  };

  // u, a^-1 u, a^-2 u, ... down to the first shell, then back up
  std::vector<ZpApprox> chain{z - zf};
  while (true) {
    const ZpApprox& u = chain.back();
    auto v = u.valuation();
    if (!v || *v < k) break;
    chain.push_back(u.shifted_down(k) * alpha_inv.truncated(u.precision() - k));
  }
  ZpApprox h = chain.back();
  for (int level = static_cast<int>(chain.size()) - 2; level >= 0; --level) {
    ZpApprox up = (alpha.truncated(h.precision()) * h).shifted_up(k) + psi(h);
    const ZpApprox& u = chain[static_cast<std::size_t>(level)];
    if (!(norm(up) == norm(u)))
      throw VerificationFailure("shell assertion failed: ||h(u)|| = " + norm(up).str() +
                                ", ||u|| = " + norm(u).str());
    h = up;
  }
  return h + zg.truncated(h.precision());
}

QpApprox qp_fixed_point(const MapSpec& g, int end) {
  const int k = qp_scaling_exponent(g);
  if (k == 0) throw PreconditionError("fixed point iteration needs a dilatation or contraction");
  QpApprox z = QpApprox::zero_at(g.prime, end);
  for (int it = 0; it < 4 * (std::abs(end) + 16); ++it) {
    QpApprox next = k > 0 ? eval_inverse(g, z) : eval(g, z);
    PNorm d = distance(next, z);
    z = next;
    if (!d.is_exact() || d.exponent >= end)
      return z.end() > end ? z.truncated_to_end(end) : z;
  }
  throw ConvergenceFailure("fixed point iteration did not settle");
}

QpApprox qp_affine_conjugacy(const MapSpec& g, const QpApprox& x, int horizon) {
  require_same_prime(g.prime, x.prime());
  const int k = qp_scaling_exponent(g);
  if (k == 0) throw PreconditionError("g is an isometry, not a dilatation or contraction");
  const int kk = std::abs(k);
  const Prime p = g.prime;
  const QpApprox zs = qp_fixed_point(g, x.end() + kk);
  // G expands by p^kk and fixes 0
  auto expand = [&](const QpApprox& v) {
    return (k > 0 ? eval(g, v + zs) : eval_inverse(g, v + zs)) - zs;
  };
  auto contract = [&](const QpApprox& v) {
    return (k > 0 ? eval_inverse(g, v + zs) : eval(g, v + zs)) - zs;
  };
  auto block = [&](const QpApprox& v) {
    std::vector<Digit> d;
    for (int t = 0; t < std::min(kk, v.end()); ++t) d.push_back(v.digit_at(t));
    return d;
  };

  std::map<int, std::vector<Digit>> blocks;
  const QpApprox u = x - zs;
  QpApprox v = u;
  int jmax = -1;
  for (int j = 0; j <= horizon && v.end() > 0; ++j) {
    blocks[j] = block(v);
    jmax = j;
    if (j < horizon && v.end() >= kk) v = expand(v);
    else break;
  }
  if (jmax < 0) throw PrecisionError("input determines no digit at index 0 or above");
  v = u;
  int jmin = 0;
  auto vanished = [&](const QpApprox& w) {
    return w.end() >= kk && (w.is_zero() || *w.valuation() >= kk);
  };
  while (!vanished(v)) {
    if (-(jmin - 1) > horizon)
      throw PrecisionError("horizon " + std::to_string(horizon) +
                           " too short for the backward orbit to reach the fixed point");
    v = contract(v);
    --jmin;
    blocks[jmin] = block(v);
  }
  std::vector<Digit> digits;
  for (int j = jmin; j <= jmax; ++j)
    digits.insert(digits.end(), blocks[j].begin(), blocks[j].end());
  return QpApprox(p, jmin * kk, std::move(digits)).normalized();
}

ConjugacyMap<ZpApprox> make_shift_conjugacy(const DigitFunctionTable& f) {
  require_class_kk(f);
  const int k = f.scaling_class().k;
  ConjugacyMap<ZpApprox> h;
  h.kind = ConjugacyKind::ToShiftPower;
  h.forward = [f](const ZpApprox& x) { return conjugate_to_shift(f, x); };
  h.inverse = [f](const ZpApprox& y) { return invert_shift_conjugacy(f, y); };
  h.outer = [k](const ZpApprox& x) { return x.shifted_down(k); };
  h.inner = [f](const ZpApprox& x) { return f.apply(x); };
  h.isometry = IsometryStatus::ProvenByConstruction;
  h.description = "S^" + std::to_string(k) + " o h = h o f";
  return h;
}

ConjugacyMap<ZpApprox> make_nearby_conjugacy(const DigitFunctionTable& f,
                                             const DigitFunctionTable& g) {
  ConjugacyMap<ZpApprox> h;
  h.kind = ConjugacyKind::Nearby;
  h.forward = [f, g](const ZpApprox& x) { return conjugate_nearby(f, g, x); };
  h.inverse = [f, g](const ZpApprox& x) { return conjugate_nearby(g, f, x); };
  h.outer = [f](const ZpApprox& x) { return f.apply(x); };
  h.inner = [g](const ZpApprox& x) { return g.apply(x); };
  h.isometry = IsometryStatus::NotClaimed;
  h.description = "f o h = h o g, h(x) the f-shadow of the g-orbit of x";
  return h;
}

ConjugacyMap<ZpApprox> make_affine_shell_conjugacy(const AffineShellMap& g) {
  ConjugacyMap<ZpApprox> h;
  h.kind = ConjugacyKind::AffineShell;
  h.forward = [g](const ZpApprox& z) { return affine_shell_conjugacy(g, z); };
  h.outer = [g](const ZpApprox& z) { return eval(g, z); };
  h.inner = [g](const ZpApprox& z) { return g.a * z + g.b; };
  h.isometry = IsometryStatus::NotClaimed;
  h.description = "g o h = h o f, f(z) = a z + b, h = id on the first shell";
  return h;
}

ConjugacyMap<QpApprox> make_qp_affine_conjugacy(const MapSpec& g, int horizon) {
  const int k = qp_scaling_exponent(g);
  ConjugacyMap<QpApprox> h;
  h.kind = ConjugacyKind::QpAffine;
  h.forward = [g, horizon](const QpApprox& x) { return qp_affine_conjugacy(g, x, horizon); };
  h.outer = [k](const QpApprox& x) {
    return QpApprox(x.prime(), x.offset() - k, std::vector<Digit>(x.digits().begin(),
                                                                  x.digits().end()));
  };
  h.inner = [g](const QpApprox& x) { return eval(g, x); };
  h.isometry = IsometryStatus::ProvenByConstruction;
  h.description = k > 0 ? "f o h = h o g, f(z) = z / p^" + std::to_string(k)
                        : "f o h = h o g, f(z) = p^" + std::to_string(-k) + " z";
  return h;
}

ConjugacyReport<ZpApprox> verify_conjugacy(ConjugacyMap<ZpApprox>& h,
                                           const std::vector<ZpApprox>& samples,
                                           bool check_isometry) {
  return verify_impl(h, samples, check_isometry);
}

ConjugacyReport<QpApprox> verify_conjugacy(ConjugacyMap<QpApprox>& h,
                                           const std::vector<QpApprox>& samples,
                                           bool check_isometry) {
  return verify_impl(h, samples, check_isometry);
}

}  // namespace padyn
