#include "padyn/shadowing.hpp"

#include <algorithm>
#include <string>

#include "padyn/mahler.hpp"
#include "padyn/rng.hpp"
#include "padyn/text.hpp"

namespace padyn {

namespace {

ZpApprox resize(const ZpApprox& y, int n) {
  if (y.precision() >= n) return y.truncated(n);
  std::vector<Digit> zeros(static_cast<std::size_t>(n - y.precision()), 0);
  return y.extended(zeros);
}

QpApprox resize_end(const QpApprox& y, int end) {
  if (y.end() >= end) return y.truncated_to_end(end);
  std::vector<Digit> d(y.digits().begin(), y.digits().end());
  d.resize(static_cast<std::size_t>(end - y.offset()), 0);
  return QpApprox(y.prime(), y.offset(), std::move(d));
}

PNorm sup(const std::vector<PNorm>& norms) {
  PNorm s = norms.front();
  for (const auto& n : norms) s = max_norm(s, n);
  return s;
}

int precision_of(const ZpApprox& x) { return x.precision(); }
int precision_of(const QpApprox& x) { return x.end(); }

template <class T>
void fill_residuals(const MapSpec& f, PseudoOrbit<T>& o) {
  o.residuals.clear();
  std::vector<PNorm> norms;
  for (std::size_t i = 0; i + 1 < o.points.size(); ++i) {
    o.residuals.push_back(o.points[i + 1] - eval(f, o.points[i]));
    norms.push_back(norm(o.residuals.back()));
  }
  o.certified_delta = norms.empty() ? PNorm::below(precision_of(o.points.front())) : sup(norms);
}

template <class T>
bool consistent(const MapSpec& f, const PseudoOrbit<T>& o) {
  if (o.points.empty() || o.residuals.size() + 1 != o.points.size()) return false;
  std::vector<PNorm> norms;
  for (std::size_t i = 0; i < o.residuals.size(); ++i) {
    T w = o.points[i + 1] - eval(f, o.points[i]);
    if (!(w == o.residuals[i])) return false;
    norms.push_back(norm(w));
  }
  PNorm d = norms.empty() ? PNorm::below(precision_of(o.points.front())) : sup(norms);
  return d == o.certified_delta;
}

}  // namespace

ZpOrbit make_orbit(const MapSpec& f, std::vector<ZpApprox> points) {
  if (points.empty()) throw DomainError("orbit needs at least one point");
  ZpOrbit o;
  o.points = std::move(points);
  fill_residuals(f, o);
  return o;
}

QpOrbit make_orbit(const MapSpec& g, int first_index, std::vector<QpApprox> points) {
  if (points.empty()) throw DomainError("orbit needs at least one point");
  QpOrbit o;
  o.first_index = first_index;
  o.points = std::move(points);
  fill_residuals(g, o);
  return o;
}

bool residuals_consistent(const MapSpec& f, const ZpOrbit& orbit) { return consistent(f, orbit); }
bool residuals_consistent(const MapSpec& g, const QpOrbit& orbit) { return consistent(g, orbit); }

ZpOrbit perturb_orbit(const MapSpec& f, const ZpApprox& x0, int delta_exponent, int steps,
                      std::uint64_t seed) {
  if (steps < 0) throw DomainError("steps must be >= 0");
  if (delta_exponent < 0) throw DomainError("delta exponent must be >= 0 on Z_p");
  const int n = x0.precision();
  Rng rng(seed);
  std::vector<ZpApprox> points{x0};
  for (int t = 0; t < steps; ++t) {
    ZpApprox y = eval(f, points.back());
    if (delta_exponent >= n) {
      points.push_back(y);
      continue;
    }
    if (y.precision() < delta_exponent)
      throw PrecisionError("orbit exhausted its precision at step " + std::to_string(t + 1));
    std::vector<Digit> w(static_cast<std::size_t>(n), 0);
    for (int i = delta_exponent; i < n; ++i) w[static_cast<std::size_t>(i)] = rng.digit(f.prime);
    points.push_back(resize(y, n) + ZpApprox(f.prime, std::move(w)));
  }
  return make_orbit(f, std::move(points));
}

QpOrbit perturb_orbit(const MapSpec& g, const QpApprox& x0, int delta_exponent, int back,
                      int forward, std::uint64_t seed) {
  if (back < 0 || forward < 0) throw DomainError("orbit lengths must be >= 0");
  const int end = x0.end();
  const Prime p = x0.prime();
  Rng rng(seed);
  auto noise = [&]() { return QpApprox(p, delta_exponent, rng.digits(p, end - delta_exponent)); };
  std::vector<QpApprox> fwd{x0};
  for (int t = 0; t < forward; ++t) {
    QpApprox y = eval(g, fwd.back());
    if (delta_exponent >= end) {
      fwd.push_back(y);
      continue;
    }
    if (y.end() < delta_exponent)
      throw PrecisionError("orbit exhausted its precision at step " + std::to_string(t + 1));
    fwd.push_back(resize_end(y, end) + noise());
  }
  std::vector<QpApprox> bwd;
  QpApprox cur = x0;
  for (int t = 0; t < back; ++t) {
    QpApprox prev = delta_exponent >= end ? eval_inverse(g, cur)
                                          : resize_end(eval_inverse(g, cur - noise()), end);
    bwd.push_back(prev);
    cur = prev;
  }
  std::vector<QpApprox> points(bwd.rbegin(), bwd.rend());
  points.insert(points.end(), fwd.begin(), fwd.end());
  return make_orbit(g, -back, std::move(points));
}

std::vector<PNorm> shadow_distances(const MapSpec& f, const ZpOrbit& orbit, const ZpApprox& y) {
  std::vector<PNorm> d;
  ZpApprox z = y;
  for (int n = 0; n <= orbit.last_index(); ++n) {
    if (n > 0) z = eval(f, z);
    d.push_back(distance(orbit.at(n), z));
  }
  return d;
}

std::vector<PNorm> shadow_distances(const MapSpec& g, const QpOrbit& orbit, const QpApprox& y) {
  std::vector<PNorm> back, fwd;
  QpApprox z = y;
  for (int n = 0; n <= orbit.last_index(); ++n) {
    if (n > 0) z = eval(g, z);
    fwd.push_back(distance(orbit.at(n), z));
  }
  z = y;
  for (int n = -1; n >= orbit.first_index; --n) {
    z = eval_inverse(g, z);
    back.push_back(distance(orbit.at(n), z));
  }
  std::vector<PNorm> d(back.rbegin(), back.rend());
  d.insert(d.end(), fwd.begin(), fwd.end());
  return d;
}

ShadowResult<ZpApprox> shadow_locally_scaling(const DigitFunctionTable& f, const ZpOrbit& orbit,
                                              int s) {
  if (orbit.two_sided())
    throw PreconditionError("the locally scaling solver takes one-sided orbits only");
  if (s < 0) throw DomainError("s must be >= 0");
  const ScalingClass cls = f.scaling_class();
  const int k = cls.k, m = cls.m, l = cls.l();
  const int steps = orbit.last_index();
  const std::uint32_t p = f.prime().value();
  if (!orbit.certified_delta.at_most(l + s))
    throw PreconditionError("orbit certified at delta " + orbit.certified_delta.str() +
                            ", solver needs <= p^-" + std::to_string(l + s));
  for (int n = 0; n <= steps; ++n)
    if (orbit.at(n).precision() < k + s)
      throw PreconditionError("orbit point " + std::to_string(n) + " has fewer than k + s = " +
                              std::to_string(k + s) + " digits");
  if (steps > 0 && f.depth() < k + s + (steps - 1) * m)
    throw PreconditionError("table depth " + std::to_string(f.depth()) + " too small for " +
                            std::to_string(steps) + " steps");

  // z[j] = f^j(y) on its determined prefix
  std::vector<std::vector<Digit>> z(1);
  auto x0 = orbit.at(0).digits();
  z[0].assign(x0.begin(), x0.begin() + k + s);

  for (int n = 0; n < steps; ++n) {
    const int target_step = n + 1;
    const ZpApprox& target = orbit.at(target_step);
    // progress invariant: y known through index (n+1)k - n l + s - 1
    if (static_cast<int>(z[0].size()) != (n + 1) * k - n * l + s)
      throw ConstraintUnsolvable(target_step, static_cast<int>(z[0].size()),
                                 "solver progress invariant broken");
    // digits 0..l+s-1 of f^{n+1}(y) are forced by the delta bound
    std::vector<Digit> next;
    const auto& prev = z[static_cast<std::size_t>(n)];
    for (int i = 0; i < static_cast<int>(prev.size()) - m; ++i) next.push_back(f.digit(i, prev));
    for (int i = 0; i < static_cast<int>(next.size()); ++i)
      if (next[static_cast<std::size_t>(i)] != target.digit(i))
        throw ConstraintUnsolvable(target_step, i,
                                   "pseudo-orbit violates its certified delta at step " +
                                       std::to_string(target_step) + ", digit " +
                                       std::to_string(i));
    z.push_back(std::move(next));

    for (int t = 0; t < m; ++t) {
      const int i = l + s + t;
      int solutions = 0;
      std::vector<Digit> chosen;
      for (Digit c = 0; c < p; ++c) {
        // push c through the tower one digit per level
        std::vector<Digit> chain{c};
        for (int j = 1; j <= target_step; ++j) {
          auto& below = z[static_cast<std::size_t>(j - 1)];
          below.push_back(chain.back());
          int idx = static_cast<int>(below.size()) - 1 - m;
          chain.push_back(f.digit(idx, below));
          below.pop_back();
        }
        if (chain.back() == target.digit(i)) {
          ++solutions;
          chosen = chain;
        }
      }
      if (solutions != 1)
        throw ConstraintUnsolvable(target_step, i,
                                   "digit " + std::to_string(i) + " of f^" +
                                       std::to_string(target_step) + "(y) has " +
                                       std::to_string(solutions) + " solutions");
      for (int j = 0; j <= target_step; ++j)
        z[static_cast<std::size_t>(j)].push_back(chosen[static_cast<std::size_t>(j)]);
    }
  }

  ShadowResult<ZpApprox> r{ZpApprox(f.prime(), z[0]), PNorm{}, 0, steps, {}, "scaling", "", "", 0,
                           {}, 0};
  r.determined_digits = r.shadow.precision();
  r.distances = shadow_distances(MapSpec(f.prime(), TableMap{f}), orbit, r.shadow);
  r.epsilon = sup(r.distances);
  if (!r.epsilon.at_most(k + s))
    throw VerificationFailure("recomputed shadow distance " + r.epsilon.str() +
                              " exceeds p^-" + std::to_string(k + s));
  return r;
}

ShadowResult<ZpApprox> shadow_lipschitz(const MapSpec& f, const ZpOrbit& orbit,
                                        std::uint64_t seed) {
  if (orbit.two_sided())
    throw PreconditionError("the Lipschitz solver takes one-sided orbits only");
  ShadowResult<ZpApprox> r{orbit.at(0), PNorm{}, 0, orbit.last_index(), {}, "lipschitz", "", "",
                           orbit.at(0).precision(), {}, 0};
  if (one_lipschitz_by_construction(f)) {
    r.certification = "by-construction";
  } else if (const auto* mm = std::get_if<MahlerMap>(&f.body)) {
    auto rep = one_lipschitz_test(mm->series);
    if (!rep.passed)
      throw HypothesisViolation("Mahler coefficients do not certify a 1-Lipschitz map" +
                                (rep.first_violation
                                     ? ", first violation at n = " + std::to_string(*rep.first_violation)
                                     : std::string()));
    r.certification = "mahler-criterion";
  } else {
    const int n = orbit.at(0).precision();
    Rng rng(seed);
    for (int t = 0; t < 1000; ++t) {
      ZpApprox x(f.prime, rng.digits(f.prime, n)), y(f.prime, rng.digits(f.prime, n));
      PNorm in = distance(x, y), out = distance(eval(f, x), eval(f, y));
      if (!out.at_most(in) && out.is_exact())
        throw HypothesisViolation("map expands the pair " + to_text(x) + ", " + to_text(y) + ": " +
                                  in.str() + " -> " + out.str());
    }
    r.certification = "sampled(1000)";
  }
  r.distances = shadow_distances(f, orbit, r.shadow);
  r.epsilon = sup(r.distances);
  for (std::size_t n = 0; n < r.distances.size(); ++n) {
    const PNorm& d = r.distances[n];
    if (d.is_exact() && !d.at_most(orbit.certified_delta))
      throw VerificationFailure("d(x_" + std::to_string(n) + ", f^" + std::to_string(n) +
                                "(x_0)) = " + d.str() + " exceeds delta " +
                                orbit.certified_delta.str());
  }
  return r;
}

ShadowResult<QpApprox> shadow_affine_qp(const QpApprox& a, const QpApprox& b,
                                        const QpOrbit& orbit) {
  require_same_prime(a.prime(), b.prime());
  if (a.is_zero()) throw DomainError("a is zero at its precision");
  if (orbit.first_index > 0 || orbit.last_index() < 0)
    throw PreconditionError("orbit must contain index 0");
  const MapSpec g(a.prime(), AffineQp{a, b});
  const int k = -*a.valuation();
  ShadowResult<QpApprox> r{orbit.at(0), PNorm{}, orbit.first_index, orbit.last_index(), {},
                           "affine-qp", "", "", 0, {}, 0};
  if (k > 0) {
    // x = x_0 + sum_{i>=0} a^{-(i+1)} w_i
    QpApprox inv = inverse_unit(a), power = inv;
    QpApprox x = orbit.at(0);
    for (int i = 0; i < orbit.last_index(); ++i) {
      x = x + power * orbit.residual(i);
      power = power * inv;
    }
    r.shadow = x;
    r.note = "forward series";
  } else if (k < 0) {
    // x = x_0 - sum_{i>=0} a^i w_{-i-1}
    QpApprox power = QpApprox::from_integer(a.prime(), 1, a.width());
    QpApprox x = orbit.at(0);
    for (int i = 0; i < -orbit.first_index; ++i) {
      x = x - power * orbit.residual(-i - 1);
      power = power * a;
    }
    r.shadow = x;
    r.note = "mirror series through the inverse (reader-completed)";
  } else {
    r.note = "isometry: x_0 forward and backward (reader-completed)";
  }
  r.distances = shadow_distances(g, orbit, r.shadow);
  r.epsilon = sup(r.distances);
  r.determined_digits = r.shadow.end();
  for (std::size_t i = 0; i < r.distances.size(); ++i) {
    const PNorm& d = r.distances[i];
    if (d.is_exact() && !d.at_most(orbit.certified_delta))
      throw VerificationFailure("d(x_" + std::to_string(orbit.first_index + static_cast<int>(i)) +
                                ", f^n(x)) = " + d.str() + " exceeds delta " +
                                orbit.certified_delta.str());
  }
  return r;
}

ShadowResult<QpApprox> shadow_dilatation(const MapSpec& g, const QpOrbit& orbit,
                                         int max_iterations) {
  if (g.domain() != Domain::Qp) throw DomainError("dilatation solver needs a Q_p map");
  if (orbit.first_index > 0 || orbit.last_index() < 0)
    throw PreconditionError("orbit must contain index 0");
  const int k = qp_scaling_exponent(g);
  if (k == 0) throw PreconditionError("g is an isometry; use the Lipschitz shadow");
  const Prime p = g.prime;
  const bool expanding = k > 0;
  const int rate = expanding ? k : -k;
  const int floor = orbit.at(0).end();

  // window indices in the order the boundary condition propagates
  const int lo = expanding ? 0 : orbit.first_index;
  const int hi = expanding ? orbit.last_index() : 0;
  const int size = hi - lo + 1;
  std::vector<QpApprox> y(static_cast<std::size_t>(size), QpApprox::zero_at(p, floor));
  auto at = [&](std::vector<QpApprox>& v, int n) -> QpApprox& {
    return v[static_cast<std::size_t>(n - lo)];
  };

  ShadowResult<QpApprox> r{orbit.at(0), PNorm{}, orbit.first_index, orbit.last_index(), {},
                           "dilatation", "", "", 0, {}, 0};
  r.note = expanding ? "Phi through g^-1 on the forward window"
                     : "Phi through g on the backward window (reader-completed mirror)";
  bool settled = false;
  for (int it = 1; it <= max_iterations; ++it) {
    std::vector<QpApprox> next = y;
    for (int n = lo; n <= hi; ++n) {
      if (expanding && n == hi) continue;
      if (!expanding && n == lo) continue;
      QpApprox v = expanding ? eval_inverse(g, orbit.at(n + 1) + at(y, n + 1)) - orbit.at(n)
                             : eval(g, orbit.at(n - 1) + at(y, n - 1)) - orbit.at(n);
      at(next, n) = v;
    }
    std::vector<PNorm> diffs;
    for (int n = lo; n <= hi; ++n) diffs.push_back(norm(at(next, n) - at(y, n)));
    PNorm c = sup(diffs);
    r.iterations = it;
    if (!r.corrections.empty() && r.corrections.back().is_exact() && c.is_exact() &&
        c.exponent < r.corrections.back().exponent + rate)
      throw HypothesisViolation("correction " + c.str() + " after " +
                                r.corrections.back().str() + " contracts by less than p^-" +
                                std::to_string(rate));
    r.corrections.push_back(c);
    y = std::move(next);
    if (!c.is_exact() || c.exponent >= floor) {
      settled = true;
      break;
    }
  }
  if (!settled)
    throw ConvergenceFailure("corrections still at " + r.corrections.back().str() + " after " +
                             std::to_string(max_iterations) + " iterations");
  r.shadow = orbit.at(0) + at(y, 0);
  r.distances = shadow_distances(g, orbit, r.shadow);
  r.epsilon = sup(r.distances);
  r.determined_digits = r.shadow.end();
  for (std::size_t i = 0; i < r.distances.size(); ++i) {
    const PNorm& d = r.distances[i];
    if (d.is_exact() && !d.at_most(orbit.certified_delta))
      throw VerificationFailure("d(x_" + std::to_string(orbit.first_index + static_cast<int>(i)) +
                                ", g^n(x)) = " + d.str() + " exceeds delta " +
                                orbit.certified_delta.str());
  }
  return r;
}

}  // namespace padyn
