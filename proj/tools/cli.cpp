#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "padyn/analysis.hpp"
#include "padyn/conjugacy.hpp"
#include "padyn/io.hpp"
#include "padyn/mahler.hpp"
#include "padyn/oracle.hpp"
#include "padyn/rng.hpp"
#include "padyn/shadowing.hpp"
#include "padyn/text.hpp"

namespace padyn::cli {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kUnset = ~std::uint64_t{0};

struct Config {
  std::string map_path;
  std::string map2_path;
  std::string orbit_path;
  std::string out_path;
  std::string solver = "auto";
  std::string constructor = "shift";
  std::string x0;
  std::string x;
  std::uint32_t p = 0;  // 0: unset
  int precision = -1;   // -1: per-command default
  int s = 0;
  int horizon = -1;
  int iterate = 1;
  int k = 0;
  int m = 0;
  std::optional<int> delta;
  int steps = 10;
  int back = 0;
  int max_index = 16;
  int max_iterations = 256;
  std::uint64_t samples = kUnset;
  std::uint64_t seed = 0;
  bool require_lipschitz = false;

  bool has_class() const { return k > 0; }
  int precision_or(int fallback) const { return precision >= 0 ? precision : fallback; }
  int horizon_or(int fallback) const { return horizon >= 0 ? horizon : fallback; }
  std::uint64_t samples_or(std::uint64_t fallback) const {
    return samples == kUnset ? fallback : samples;
  }
};

// A completed command: report plus whether its verifications passed.
struct Outcome {
  Json report;
  bool passed = true;
};

// p^e <= limit, without overflow.
bool fits(std::uint64_t p, int e, std::uint64_t limit) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > limit / p) return false;
    v *= p;
  }
  return v <= limit;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Json header(const std::string& command, const Config& c) {
  Json j;
  j["tool"] = "padyn";
  j["version"] = kVersion;
  j["rng"] = Rng::kName;
  j["command"] = command;
  j["seed"] = c.seed;
  return j;
}

MapSpec load_map(const Config& c, const std::string& path, bool check_tables = true) {
  if (path.empty()) throw ParseError("--map is required");
  MapSpec spec = load_mapspec(path, check_tables);
  if (c.p != 0) require_same_prime(Prime(c.p), spec.prime);
  return spec;
}

std::optional<ScalingClass> class_of(const Config& c, const MapSpec& spec) {
  if (c.has_class()) return ScalingClass(c.k, c.m);
  if (const auto* t = std::get_if<TableMap>(&spec.body)) return t->table.scaling_class();
  return natural_class(spec);
}

DigitFunctionTable table_of(const Config& c, const MapSpec& spec) {
  if (spec.domain() != Domain::Zp) throw PreconditionError("a Z_p map is required");
  if (const auto* t = std::get_if<TableMap>(&spec.body)) {
    if (c.has_class() && !(t->table.scaling_class() == ScalingClass(c.k, c.m)))
      throw PreconditionError("--k/--m disagree with the table's class");
    return t->table;
  }
  auto cls = class_of(c, spec);
  if (!cls) throw PreconditionError("map has no known scaling class; pass --k and --m");
  return DigitFunctionTable::from_spec(spec, *cls);
}

std::vector<ZpApprox> zp_samples(Prime p, int n, std::uint64_t count, std::uint64_t seed) {
  std::vector<ZpApprox> xs;
  std::uint64_t size = 0;
  bool small = n <= 40;
  if (small) {
    size = 1;
    for (int i = 0; i < n && size <= count; ++i) size *= p;
    small = size <= count;
  }
  if (small) {
    for (std::uint64_t v = 0; v < size; ++v)
      xs.push_back(ZpApprox::from_integer(p, static_cast<std::int64_t>(v), n));
    return xs;
  }
  Rng rng(seed);
  for (std::uint64_t i = 0; i < count; ++i) xs.push_back(ZpApprox(p, rng.digits(p, n)));
  return xs;
}

std::vector<QpApprox> qp_samples(Prime p, int n, std::uint64_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<QpApprox> xs;
  for (std::uint64_t i = 0; i < count; ++i) xs.push_back(QpApprox(p, -2, rng.digits(p, n)));
  return xs;
}

Json witness_json(const BijectivityViolation& e) {
  return Json{{"digit_function", e.digit()}, {"prefix", e.prefix()}, {"message", e.what()}};
}

// ---------------------------------------------------------------- validate

Outcome cmd_validate(const Config& c) {
  MapSpec spec = load_map(c, c.map_path, false);
  Outcome o{header("validate", c)};
  o.report["map"] = c.map_path;
  o.report["type"] = spec.type_name();
  o.report["prime"] = spec.prime.value();
  o.report["one_lipschitz_by_construction"] = one_lipschitz_by_construction(spec);

  if (spec.domain() == Domain::Qp) {
    const int k = qp_scaling_exponent(spec);
    const int n = c.precision_or(12);
    Rng rng(c.seed);
    std::uint64_t checked = 0;
    std::optional<std::pair<QpApprox, QpApprox>> bad;
    for (int t = 0; t < 512; ++t) {
      QpApprox x(spec.prime, -2, rng.digits(spec.prime, n));
      QpApprox y(spec.prime, -2, rng.digits(spec.prime, n));
      PNorm in = distance(x, y), out = distance(eval(spec, x), eval(spec, y));
      if (!in.is_exact() || !out.is_exact()) continue;
      ++checked;
      if (out.exponent != in.exponent - k && !bad) bad = std::make_pair(x, y);
    }
    o.report["dilation_exponent"] = k;
    o.report["pairs_checked"] = checked;
    o.passed = !bad;
    if (bad)
      o.report["witness"] = {{"x", to_text(bad->first)}, {"y", to_text(bad->second)}};
    o.report["verified"] = o.passed;
    return o;
  }

  auto cls = class_of(c, spec);
  if (!cls) {
    o.report["scaling"] = nullptr;
    o.report["verified"] = true;
    return o;
  }
  int fallback = std::max(cls->k + cls->m + 1, 8);
  if (const auto* t = std::get_if<TableMap>(&spec.body); t && t->table.bounded())
    fallback = std::max(cls->k + cls->m + 1, std::min(fallback, t->table.depth() + cls->m));
  const int n = c.precision_or(fallback);
  ScalingReport rep = verify_scaling(spec, *cls, n, c.seed);
  o.report["scaling"] = to_json(rep);
  o.passed = rep.verified;

  Json bij;
  try {
    const auto* t = std::get_if<TableMap>(&spec.body);
    if (t && t->table.source() == DigitFunctionTable::Source::Dense) {
      t->table.check_bijectivity();
      bij["method"] = "exhaustive";
    } else if (t) {
      bij["method"] = "by-construction";
    } else {
      int depth = std::max(1, n - cls->m);
      while (depth > 1 && !fits(spec.prime, std::max(cls->k, cls->m + depth), 1u << 16)) --depth;
      extract_table(spec, *cls, depth);
      bij["method"] = "extracted";
      bij["depth"] = depth;
    }
    bij["ok"] = true;
  } catch (const BijectivityViolation& e) {
    bij["ok"] = false;
    bij["witness"] = witness_json(e);
    o.passed = false;
  } catch (const InconsistentScaling& e) {
    bij["ok"] = false;
    bij["message"] = e.what();
    o.passed = false;
  }
  o.report["bijectivity"] = bij;
  o.report["verified"] = o.passed;
  if (!o.passed) {
    int small = cls->k + cls->m + 1;
    while (small < n && fits(spec.prime, small + 1, kExhaustiveLimit)) ++small;
    o.report["reproduce"] = "padyn oracle scaling --map " + c.map_path + " --precision " +
                            std::to_string(small) + " --k " + std::to_string(cls->k) + " --m " +
                            std::to_string(cls->m);
  }
  return o;
}

// ------------------------------------------------------------ fixed-points

Outcome cmd_fixed_points(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  Outcome o{header("fixed-points", c)};
  o.report["map"] = c.map_path;
  FixedPointReport rep;
  if (std::get_if<TableMap>(&spec.body) || c.has_class()) {
    DigitFunctionTable t = table_of(c, spec);
    const ScalingClass cls = t.scaling_class();
    const int big_k = c.iterate * cls.m + cls.l();
    const int n = c.precision_or(big_k + 4);
    rep = c.iterate == 1 ? fixed_points(t, n) : periodic_points(t, c.iterate, n);
    rep.map_id = spec.type_name();
  } else {
    auto cls = natural_class(spec);
    if (!cls) throw PreconditionError("map has no known scaling class; pass --k and --m");
    const int big_k = c.iterate * cls->m + cls->l();
    const int n = c.precision_or(big_k + 4);
    rep = fixed_points(spec, n, c.iterate);
  }
  o.report["fixed_points"] = to_json(rep);
  if (rep.closed_form) {
    o.passed = *rep.closed_form == rep.count;
    o.report["closed_form_agrees"] = o.passed;
  }
  if (!o.passed)
    o.report["reproduce"] = "padyn oracle fixed-points --map " + c.map_path + " --precision " +
                            std::to_string(rep.precision) + " --iterate " +
                            std::to_string(c.iterate);
  return o;
}

// ------------------------------------------------------------------ orbits

template <class T>
PseudoOrbit<T> load_orbit(const Config& c, const MapSpec& spec, Domain domain);

template <>
ZpOrbit load_orbit<ZpApprox>(const Config& c, const MapSpec& spec, Domain domain) {
  std::ifstream in(c.orbit_path);
  if (!in) throw ParseError("cannot open " + c.orbit_path);
  OrbitFile f = read_orbit(in);
  require_same_prime(f.prime, spec.prime);
  if (f.domain != domain) throw PreconditionError("orbit domain differs from the map's");
  if (f.first_index != 0) throw PreconditionError("Z_p orbits start at index 0");
  std::vector<ZpApprox> pts;
  for (const auto& v : f.values) pts.push_back(parse_zp(v));
  ZpOrbit o = make_orbit(spec, std::move(pts));
  if (!o.certified_delta.at_most(f.delta))
    throw PreconditionError("orbit header claims delta " + f.delta.str() +
                            ", residuals give " + o.certified_delta.str());
  return o;
}

template <>
QpOrbit load_orbit<QpApprox>(const Config& c, const MapSpec& spec, Domain domain) {
  std::ifstream in(c.orbit_path);
  if (!in) throw ParseError("cannot open " + c.orbit_path);
  OrbitFile f = read_orbit(in);
  require_same_prime(f.prime, spec.prime);
  if (f.domain != domain) throw PreconditionError("orbit domain differs from the map's");
  std::vector<QpApprox> pts;
  for (const auto& v : f.values) pts.push_back(parse_qp(v));
  QpOrbit o = make_orbit(spec, f.first_index, std::move(pts));
  if (!o.certified_delta.at_most(f.delta))
    throw PreconditionError("orbit header claims delta " + f.delta.str() +
                            ", residuals give " + o.certified_delta.str());
  return o;
}

Outcome cmd_orbit(const Config& c, std::string& text) {
  MapSpec spec = load_map(c, c.map_path);
  if (c.x0.empty()) throw ParseError("--x0 is required");
  std::ostringstream os;
  if (spec.domain() == Domain::Zp) {
    ZpApprox x0 = parse_zp(c.x0);
    require_same_prime(x0.prime(), spec.prime);
    const int delta = c.delta.value_or(x0.precision());
    write_orbit(os, perturb_orbit(spec, x0, delta, c.steps, c.seed));
  } else {
    QpApprox x0 = parse_qp(c.x0);
    require_same_prime(x0.prime(), spec.prime);
    const int delta = c.delta.value_or(x0.end());
    write_orbit(os, perturb_orbit(spec, x0, delta, c.back, c.steps, c.seed));
  }
  text = "# padyn " + std::string(kVersion) + " rng " + Rng::kName + " seed " +
         std::to_string(c.seed) + "\n" + os.str();
  return {};
}

// ------------------------------------------------------------------ shadow

std::string pick_solver(const Config& c, const MapSpec& spec) {
  if (c.solver != "auto") return c.solver;
  if (spec.domain() == Domain::Qp)
    return std::holds_alternative<AffineQp>(spec.body) ? "affine-qp" : "dilatation";
  if (std::holds_alternative<TableMap>(spec.body) || class_of(c, spec)) return "scaling";
  return "lipschitz";
}

Outcome cmd_shadow(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  if (c.orbit_path.empty()) throw ParseError("--orbit is required");
  Outcome o{header("shadow", c)};
  o.report["map"] = c.map_path;
  o.report["orbit"] = c.orbit_path;
  const std::string solver = pick_solver(c, spec);
  o.report["solver"] = solver;
  auto reproduce = [&](int n) {
    return "padyn oracle shadow --map " + c.map_path + " --orbit " + c.orbit_path + " --s " +
           std::to_string(c.s) + " --precision " + std::to_string(n);
  };
  try {
    if (solver == "scaling" || solver == "lipschitz") {
      if (spec.domain() != Domain::Zp) throw PreconditionError(solver + " solver needs a Z_p map");
      ZpOrbit orbit = load_orbit<ZpApprox>(c, spec, Domain::Zp);
      o.report["delta"] = to_json(orbit.certified_delta);
      if (solver == "scaling") {
        DigitFunctionTable t = table_of(c, spec);
        const ScalingClass cls = t.scaling_class();
        o.report["k"] = cls.k;
        o.report["m"] = cls.m;
        o.report["s"] = c.s;
        o.report["epsilon_bound"] = to_json(PNorm::exact(cls.k + c.s));
        o.report["result"] = to_json(shadow_locally_scaling(t, orbit, c.s));
      } else {
        o.report["result"] = to_json(shadow_lipschitz(spec, orbit, c.seed));
      }
    } else if (solver == "affine-qp" || solver == "dilatation") {
      if (spec.domain() != Domain::Qp) throw PreconditionError(solver + " solver needs a Q_p map");
      QpOrbit orbit = load_orbit<QpApprox>(c, spec, Domain::Qp);
      o.report["delta"] = to_json(orbit.certified_delta);
      if (solver == "affine-qp") {
        const auto* a = std::get_if<AffineQp>(&spec.body);
        if (!a) throw PreconditionError("affine-qp solver needs an affine_qp map");
        o.report["result"] = to_json(shadow_affine_qp(a->a, a->b, orbit));
      } else {
        o.report["result"] = to_json(shadow_dilatation(spec, orbit, c.max_iterations));
      }
    } else {
      throw ParseError("unknown solver '" + solver + "'");
    }
  } catch (const ConstraintUnsolvable& e) {
    o.passed = false;
    o.report["failure"] = {{"kind", "constraint-unsolvable"},
                           {"step", e.step()},
                           {"digit", e.digit()},
                           {"message", e.what()}};
    o.report["reproduce"] = reproduce(std::min(12, e.digit() + 2));
  } catch (const VerificationFailure& e) {
    o.passed = false;
    o.report["failure"] = {{"kind", "verification"}, {"message", e.what()}};
    o.report["reproduce"] = reproduce(12);
  }
  o.report["verified"] = o.passed;
  return o;
}

// ---------------------------------------------------------------- conjugate

AffineShellMap shell_of(const MapSpec& spec) {
  const auto* g = std::get_if<PerturbedAffineQp>(&spec.body);
  if (!g) throw PreconditionError("affine-shell needs a perturbed_affine_qp map with integral a, b");
  auto integral = [](const QpApprox& v, const char* name) {
    if (!v.is_zero() && *v.valuation() < 0)
      throw PreconditionError(std::string(name) + " is not a p-adic integer");
    return mod_zp(v);
  };
  return AffineShellMap{integral(g->a, "a"), integral(g->b, "b"), g->psi, g->scale};
}

struct ZpConjugacy {
  ConjugacyMap<ZpApprox> h;
  bool isometric = false;
  int default_precision = 8;
};

ZpConjugacy build_zp_conjugacy(const Config& c, const MapSpec& spec) {
  if (c.constructor == "shift") {
    return {make_shift_conjugacy(table_of(c, spec)), true, 8};
  }
  if (c.constructor == "nearby") {
    if (c.map2_path.empty()) throw ParseError("nearby needs --map2");
    MapSpec spec2 = load_map(c, c.map2_path);
    DigitFunctionTable f = table_of(c, spec), g = table_of(c, spec2);
    if (!(f.scaling_class() == g.scaling_class()))
      throw PreconditionError("maps have different scaling classes");
    ConjugacyMap<ZpApprox> h = make_nearby_conjugacy(f, g);
    if (c.horizon >= 0) {
      const int hz = c.horizon;
      h.forward = [f, g, hz](const ZpApprox& x) { return conjugate_nearby(f, g, x, hz); };
      h.inverse = [f, g, hz](const ZpApprox& x) { return conjugate_nearby(g, f, x, hz); };
    }
    const ScalingClass cls = f.scaling_class();
    return {h, false, cls.k + 6 * cls.m};
  }
  if (c.constructor == "affine-shell") {
    return {make_affine_shell_conjugacy(shell_of(spec)), false, 9};
  }
  throw ParseError("unknown constructor '" + c.constructor + "'");
}

std::string conjugacy_reproduce(const Config& c, const std::string& x) {
  std::string cmd = "padyn oracle conjugacy --constructor " + c.constructor + " --map " +
                    c.map_path;
  if (!c.map2_path.empty()) cmd += " --map2 " + c.map2_path;
  if (c.horizon >= 0) cmd += " --horizon " + std::to_string(c.horizon);
  return cmd + " --x " + quote(x);
}

template <class T>
void fill_conjugacy(Outcome& o, const Config& c, ConjugacyMap<T>& h, const std::vector<T>& xs,
                    bool isometric) {
  ConjugacyReport<T> rep = verify_conjugacy(h, xs, isometric);
  o.report["kind"] = to_string(h.kind);
  o.report["description"] = h.description;
  o.report["isometry"] = to_string(h.isometry);
  o.report["report"] = to_json(rep);
  std::uint64_t round_trip_failures = 0;
  std::optional<T> round_trip_witness;
  Json values = Json::array();
  for (const auto& x : xs) {
    T hx = h.forward(x);
    values.push_back({{"x", to_text(x)}, {"h", to_text(hx)}});
    if (h.inverse) {
      T back = h.forward(h.inverse(x));
      if (distance(back, x).is_exact()) {
        if (round_trip_failures++ == 0) round_trip_witness = x;
      }
    }
  }
  if (h.inverse) {
    o.report["round_trip_failures"] = round_trip_failures;
    if (round_trip_witness) o.report["round_trip_witness"] = to_text(*round_trip_witness);
  }
  o.report["values"] = values;
  o.passed = rep.semiconjugacy_ok && round_trip_failures == 0 &&
             (!isometric || (rep.isometry_deviation_count == 0 && rep.collision_count == 0));
  if (!o.passed) {
    std::string w;
    if (rep.residual_witness) w = to_text(*rep.residual_witness);
    else if (round_trip_witness) w = to_text(*round_trip_witness);
    else if (!rep.isometry_deviations.empty()) w = to_text(rep.isometry_deviations.front().first);
    else if (!rep.collisions.empty()) w = to_text(rep.collisions.front().first);
    if (!w.empty()) o.report["reproduce"] = conjugacy_reproduce(c, w);
  }
}

Outcome cmd_conjugate(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  Outcome o{header("conjugate", c)};
  o.report["map"] = c.map_path;
  if (!c.map2_path.empty()) o.report["map2"] = c.map2_path;
  o.report["constructor"] = c.constructor;
  if (c.constructor == "qp-affine") {
    const int horizon = c.horizon_or(64);
    ConjugacyMap<QpApprox> h = make_qp_affine_conjugacy(spec, horizon);
    const int n = c.precision_or(16);
    auto xs = qp_samples(spec.prime, n, c.samples_or(64), c.seed);
    fill_conjugacy(o, c, h, xs, true);
  } else {
    ZpConjugacy z = build_zp_conjugacy(c, spec);
    const int n = c.precision_or(z.default_precision);
    auto xs = zp_samples(spec.prime, n, c.samples_or(64), c.seed);
    fill_conjugacy(o, c, z.h, xs, z.isometric);
  }
  o.report["verified"] = o.passed;
  return o;
}

// ------------------------------------------------------------------ mahler

Outcome cmd_mahler(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  if (spec.domain() != Domain::Zp) throw PreconditionError("Mahler series need a Z_p map");
  Outcome o{header("mahler", c)};
  o.report["map"] = c.map_path;
  const int n = c.precision_or(8);
  MahlerSeries series = std::holds_alternative<MahlerMap>(spec.body)
                            ? std::get<MahlerMap>(spec.body).series
                            : mahler_coefficients(spec, c.max_index, n);
  o.report["series"] = to_json(series);
  OneLipschitzReport rep = one_lipschitz_test(series);
  o.report["one_lipschitz"] = to_json(rep);
  if (c.require_lipschitz) {
    o.passed = rep.passed;
    if (!rep.passed)
      o.report["reproduce"] = "padyn oracle mahler --map " + c.map_path + " --max-index " +
                              std::to_string(c.max_index) + " --precision " + std::to_string(n);
  }
  o.report["verified"] = o.passed;
  return o;
}

// ------------------------------------------------------------------ oracle

Outcome oracle_shadow(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  Outcome o{header("oracle shadow", c)};
  DigitFunctionTable t = table_of(c, spec);
  ZpOrbit orbit = load_orbit<ZpApprox>(c, spec, Domain::Zp);
  const ScalingClass cls = t.scaling_class();
  const int determined = cls.k + c.s + orbit.last_index() * cls.m;
  const int n = c.precision_or(determined);
  o.report["precision"] = n;
  std::optional<ZpApprox> y;
  try {
    auto r = shadow_locally_scaling(t, orbit, c.s);
    y = r.shadow;
    o.report["solver"] = {{"shadow", to_text(r.shadow)}, {"determined_digits", r.determined_digits}};
  } catch (const Error& e) {
    o.report["solver"] = {{"error", e.what()}};
  }
  ShadowOracleResult b = brute_force_shadows(spec, orbit, cls.k + c.s, n);
  Json sols = Json::array();
  for (const auto& s : b.solutions) sols.push_back(to_text(s));
  o.report["brute_force"] = {{"candidates", b.candidates},
                             {"solution_count", b.solution_count},
                             {"common_prefix", b.common_prefix},
                             {"solutions", sols}};
  if (y) {
    const int compare = std::min(y->precision(), n);
    o.passed = agrees_with_all(b, *y, compare);
    o.report["compared_digits"] = compare;
  } else {
    o.passed = b.solution_count == 0;
  }
  o.report["agree"] = o.passed;
  return o;
}

Outcome oracle_fixed_points(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  Outcome o{header("oracle fixed-points", c)};
  FixedPointReport lib;
  ScalingClass cls;
  if (std::get_if<TableMap>(&spec.body) || c.has_class()) {
    DigitFunctionTable t = table_of(c, spec);
    cls = t.scaling_class();
  } else {
    auto nc = natural_class(spec);
    if (!nc) throw PreconditionError("map has no known scaling class; pass --k and --m");
    cls = *nc;
  }
  const int big_k = c.iterate * cls.m + cls.l();
  const int n = c.precision_or(big_k + 2);
  if (n < big_k) throw PreconditionError("precision below k of the iterate");
  if (std::get_if<TableMap>(&spec.body) || c.has_class()) {
    DigitFunctionTable t = table_of(c, spec);
    lib = c.iterate == 1 ? fixed_points(t, std::max(n, cls.k + 1))
                         : periodic_points(t, c.iterate, n);
  } else {
    lib = fixed_points(spec, std::max(n, cls.k + 1), c.iterate);
  }
  FixedPointOracleResult b = brute_force_fixed_points(spec, c.iterate, n);
  o.report["precision"] = n;
  o.report["library_count"] = lib.count;
  o.report["brute_force_count"] = b.count;
  o.report["compared_digits"] = b.compared_digits;
  if (lib.closed_form) o.report["closed_form"] = *lib.closed_form;
  o.passed = lib.count == b.count;
  o.report["agree"] = o.passed;
  return o;
}

Outcome oracle_arithmetic(const Config& c) {
  Outcome o{header("oracle arithmetic", c)};
  const Prime p(c.p != 0 ? c.p : 2);
  const int n = c.precision_or(10);
  const std::uint64_t samples = c.samples_or(65536);
  ArithmeticOracleResult r = arithmetic_oracle(p, n, samples, c.seed);
  o.report["prime"] = r.prime;
  o.report["precision"] = r.precision;
  o.report["add_pairs"] = r.add_pairs;
  o.report["sub_pairs"] = r.sub_pairs;
  o.report["mul_pairs"] = r.mul_pairs;
  o.report["mismatches"] = r.mismatches;
  if (r.witness)
    o.report["witness"] = {{"op", r.witness_op}, {"a", r.witness->first}, {"b", r.witness->second}};
  o.passed = r.mismatches == 0;
  o.report["agree"] = o.passed;
  return o;
}

Outcome oracle_scaling(const Config& c) {
  MapSpec spec = load_map(c, c.map_path, false);
  Outcome o{header("oracle scaling", c)};
  auto cls = class_of(c, spec);
  if (!cls) throw PreconditionError("map has no known scaling class; pass --k and --m");
  const int n = c.precision_or(cls->k + cls->m + 2);
  ScalingReport lib = verify_scaling(spec, *cls, n, c.seed);
  ScalingOracleResult b = brute_force_scaling(spec, *cls, n);
  o.report["library"] = to_json(lib);
  o.report["brute_force"] = {{"pairs", b.pairs}, {"violations", b.violations}};
  if (b.witness)
    o.report["brute_force"]["witness"] = {{"x", to_text(b.witness->first)},
                                          {"y", to_text(b.witness->second)}};
  o.passed = lib.verified == (b.violations == 0);
  o.report["agree"] = o.passed;
  return o;
}

Outcome oracle_conjugacy(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  if (c.x.empty()) throw ParseError("--x is required");
  Outcome o{header("oracle conjugacy", c)};
  o.report["constructor"] = c.constructor;
  auto residual = [&](auto& h, const auto& x) {
    auto hx = h.forward(x);
    auto lhs = h.outer(hx);
    auto rhs = h.forward(h.inner(x));
    PNorm r = distance(lhs, rhs);
    o.report["x"] = to_text(x);
    o.report["h(x)"] = to_text(hx);
    o.report["outer(h(x))"] = to_text(lhs);
    o.report["h(inner(x))"] = to_text(rhs);
    o.report["residual"] = to_json(r);
    o.passed = !r.is_exact();
  };
  if (c.constructor == "qp-affine") {
    auto h = make_qp_affine_conjugacy(spec, c.horizon_or(64));
    residual(h, parse_qp(c.x));
  } else {
    ZpConjugacy z = build_zp_conjugacy(c, spec);
    residual(z.h, parse_zp(c.x));
  }
  o.report["agree"] = o.passed;
  return o;
}

// a_n = sum_j (-1)^{n-j} C(n, j) f(j), summed directly.
Outcome oracle_mahler(const Config& c) {
  MapSpec spec = load_map(c, c.map_path);
  Outcome o{header("oracle mahler", c)};
  const int n = c.precision_or(8);
  MahlerSeries lib = mahler_coefficients(spec, c.max_index, n);
  const Prime p = spec.prime;
  std::vector<ZpApprox> fj;
  for (int j = 0; j <= c.max_index; ++j) {
    int width = n;
    ZpApprox v = eval(spec, ZpApprox::from_integer(p, j, width));
    while (v.precision() < n) {
      width += 4;
      v = eval(spec, ZpApprox::from_integer(p, j, width));
    }
    fj.push_back(v.truncated(n));
  }
  Json mism = Json::array();
  for (int i = 0; i <= c.max_index; ++i) {
    ZpApprox sum = ZpApprox::zero(p, n);
    std::int64_t binom = 1;
    for (int j = 0; j <= i; ++j) {
      // binom = C(i, j), reduced mod p^n to stay small
      ZpApprox term = ZpApprox::from_integer(p, binom, n) * fj[static_cast<std::size_t>(j)];
      sum = (i - j) % 2 == 0 ? sum + term : sum - term;
      const auto mod = static_cast<std::int64_t>(ipow(p, n));
      binom = static_cast<std::int64_t>(
          (static_cast<__int128>(binom) * (i - j) / (j + 1)) % mod);
    }
    if (!(sum == lib.coefficients[static_cast<std::size_t>(i)].truncated(n)))
      mism.push_back({{"n", i}, {"direct", to_text(sum)},
                      {"library", to_text(lib.coefficients[static_cast<std::size_t>(i)])}});
  }
  o.report["max_index"] = c.max_index;
  o.report["precision"] = n;
  o.report["mismatches"] = mism;
  o.report["one_lipschitz"] = to_json(one_lipschitz_test(lib));
  o.passed = mism.empty();
  o.report["agree"] = o.passed;
  return o;
}

void add_common(CLI::App* sub, Config& c) {
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--out", c.out_path, "Write the report to this file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"padyn: exact p-adic dynamics", "padyn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto map_opt = [&](CLI::App* s) { s->add_option("--map", c.map_path, "Map spec (JSON)"); };
  auto class_opts = [&](CLI::App* s) {
    auto* k = s->add_option("--k", c.k, "Scaling class k")->check(CLI::PositiveNumber);
    s->add_option("--m", c.m, "Scaling class m")->check(CLI::PositiveNumber)->needs(k);
    k->needs("--m");
  };
  auto prec_opt = [&](CLI::App* s) {
    s->add_option("--precision", c.precision, "Digits N")->check(CLI::NonNegativeNumber);
  };
  auto p_opt = [&](CLI::App* s) { s->add_option("--p", c.p, "Prime"); };

  std::vector<CLI::App*> subs;
  auto* validate = app.add_subcommand("validate", "Check the scaling class and bijectivity");
  map_opt(validate);
  class_opts(validate);
  prec_opt(validate);
  p_opt(validate);
  subs.push_back(validate);

  auto* fixed = app.add_subcommand("fixed-points", "Enumerate fixed or periodic points");
  map_opt(fixed);
  class_opts(fixed);
  prec_opt(fixed);
  p_opt(fixed);
  fixed->add_option("--iterate", c.iterate, "Period n")->check(CLI::PositiveNumber);
  subs.push_back(fixed);

  auto* shadow = app.add_subcommand("shadow", "Shadow a pseudo-orbit");
  map_opt(shadow);
  class_opts(shadow);
  p_opt(shadow);
  shadow->add_option("--orbit", c.orbit_path, "Pseudo-orbit file");
  shadow->add_option("--solver", c.solver)
      ->check(CLI::IsMember({"auto", "scaling", "lipschitz", "affine-qp", "dilatation"}));
  shadow->add_option("--s", c.s, "Extra precision s")->check(CLI::NonNegativeNumber);
  shadow->add_option("--max-iterations", c.max_iterations, "Dilatation iteration budget");
  subs.push_back(shadow);

  auto* conj = app.add_subcommand("conjugate", "Build and verify a conjugacy");
  map_opt(conj);
  class_opts(conj);
  prec_opt(conj);
  p_opt(conj);
  conj->add_option("--constructor", c.constructor)
      ->check(CLI::IsMember({"shift", "nearby", "qp-affine", "affine-shell"}));
  conj->add_option("--map2", c.map2_path, "Second map (nearby)");
  conj->add_option("--horizon", c.horizon, "Orbit horizon")->check(CLI::NonNegativeNumber);
  conj->add_option("--samples", c.samples, "Sample count");
  subs.push_back(conj);

  auto* mahler = app.add_subcommand("mahler", "Mahler coefficients and the 1-Lipschitz test");
  map_opt(mahler);
  prec_opt(mahler);
  p_opt(mahler);
  mahler->add_option("--max-index", c.max_index, "Largest coefficient index");
  mahler->add_flag("--require-lipschitz", c.require_lipschitz, "Fail unless the test passes");
  subs.push_back(mahler);

  auto* orbit = app.add_subcommand("orbit", "Generate a seeded pseudo-orbit");
  map_opt(orbit);
  p_opt(orbit);
  orbit->add_option("--x0", c.x0, "Start point (textual encoding)");
  orbit->add_option("--delta", c.delta, "Noise exponent: residuals <= p^-delta (default: a true orbit)");
  orbit->add_option("--steps", c.steps, "Forward steps")->check(CLI::NonNegativeNumber);
  orbit->add_option("--back", c.back, "Backward steps (Q_p)")->check(CLI::NonNegativeNumber);
  subs.push_back(orbit);

  auto* oracle = app.add_subcommand("oracle", "Brute-force cross-checks at small N");
  oracle->require_subcommand(1);
  auto* o_shadow = oracle->add_subcommand("shadow", "Solver vs exhaustive shadow search");
  auto* o_fixed = oracle->add_subcommand("fixed-points", "Library vs exhaustive fixed points");
  auto* o_arith = oracle->add_subcommand("arithmetic", "add/sub/mul vs integers mod p^N");
  auto* o_scaling = oracle->add_subcommand("scaling", "verify_scaling vs all pairs");
  auto* o_conj = oracle->add_subcommand("conjugacy", "Semiconjugacy residual at one point");
  auto* o_mahler = oracle->add_subcommand("mahler", "Coefficients by direct binomial sums");
  for (auto* s : {o_shadow, o_fixed, o_scaling, o_conj, o_mahler}) {
    map_opt(s);
    class_opts(s);
    p_opt(s);
  }
  for (auto* s : {o_shadow, o_fixed, o_arith, o_scaling, o_conj, o_mahler}) {
    prec_opt(s);
    subs.push_back(s);
  }
  o_arith->add_option("--p", c.p, "Prime");
  o_shadow->add_option("--orbit", c.orbit_path, "Pseudo-orbit file");
  o_shadow->add_option("--s", c.s, "Extra precision s")->check(CLI::NonNegativeNumber);
  o_fixed->add_option("--iterate", c.iterate, "Period n")->check(CLI::PositiveNumber);
  o_arith->add_option("--samples", c.samples, "mul samples (0 = all pairs)");
  o_conj->add_option("--constructor", c.constructor)
      ->check(CLI::IsMember({"shift", "nearby", "qp-affine", "affine-shell"}));
  o_conj->add_option("--map2", c.map2_path, "Second map (nearby)");
  o_conj->add_option("--horizon", c.horizon, "Orbit horizon")->check(CLI::NonNegativeNumber);
  o_conj->add_option("--x", c.x, "Point (textual encoding)");
  o_mahler->add_option("--max-index", c.max_index, "Largest coefficient index");
  for (auto* s : subs) add_common(s, c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParse;
  }

  try {
    Outcome result;
    std::string text;
    if (validate->parsed()) result = cmd_validate(c);
    else if (fixed->parsed()) result = cmd_fixed_points(c);
    else if (shadow->parsed()) result = cmd_shadow(c);
    else if (conj->parsed()) result = cmd_conjugate(c);
    else if (mahler->parsed()) result = cmd_mahler(c);
    else if (orbit->parsed()) result = cmd_orbit(c, text);
    else if (o_shadow->parsed()) result = oracle_shadow(c);
    else if (o_fixed->parsed()) result = oracle_fixed_points(c);
    else if (o_arith->parsed()) result = oracle_arithmetic(c);
    else if (o_scaling->parsed()) result = oracle_scaling(c);
    else if (o_conj->parsed()) result = oracle_conjugacy(c);
    else if (o_mahler->parsed()) result = oracle_mahler(c);

    if (text.empty()) text = result.report.dump(2) + "\n";
    if (c.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(c.out_path, std::ios::binary);
      if (!f) throw ParseError("cannot write " + c.out_path);
      f << text;
    }
    return result.passed ? kOk : kVerification;
  } catch (const ParseError& e) {
    err << "padyn: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const PrimeMismatch& e) {
    err << "padyn: precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const PreconditionError& e) {
    err << "padyn: precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const DomainError& e) {
    err << "padyn: precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const PrecisionError& e) {
    err << "padyn: precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const HypothesisViolation& e) {
    err << "padyn: precondition: hypothesis violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const BijectivityViolation& e) {
    err << "padyn: verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const InconsistentScaling& e) {
    err << "padyn: verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const VerificationFailure& e) {
    err << "padyn: verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const ConstraintUnsolvable& e) {
    err << "padyn: verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const ConvergenceFailure& e) {
    err << "padyn: verification failed: " << e.what() << "\n";
    return kVerification;
  } catch (const std::exception& e) {
    err << "padyn: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace padyn::cli
