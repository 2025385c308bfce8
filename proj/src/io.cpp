#include "padyn/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "padyn/text.hpp"

namespace padyn {

namespace {

Json table_to_json(const DigitFunctionTable& t) {
  Json j;
  const ScalingClass c = t.scaling_class();
  switch (t.source()) {
    case DigitFunctionTable::Source::Dense: {
      j["source"] = "dense";
      j["k"] = c.k;
      j["m"] = c.m;
      j["depth"] = t.depth();
      Json arities = Json::array();
      for (int i = 0; i < t.depth(); ++i) arities.push_back(t.arity(i));
      j["arities"] = arities;
      j["digits"] = t.dense_tables();
      break;
    }
    case DigitFunctionTable::Source::Random:
      j["source"] = "random";
      j["k"] = c.k;
      j["m"] = c.m;
      if (t.bounded()) j["depth"] = t.depth();
      j["seed"] = t.seed();
      break;
    case DigitFunctionTable::Source::Perturbed:
      j["source"] = "perturbed";
      j["k"] = c.k;
      j["m"] = c.m;
      j["first_digit"] = t.first_perturbed_digit();
      j["seed"] = t.seed();
      j["base"] = table_to_json(t.base());
      break;
    case DigitFunctionTable::Source::Spec:
      j["source"] = "spec";
      j["k"] = c.k;
      j["m"] = c.m;
      if (t.bounded()) j["depth"] = t.depth();
      j["spec"] = to_json(t.spec());
      break;
  }
  return j;
}

template <class T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("field '") + name + "': " + e.what());
  }
}

DigitFunctionTable table_from_json(Prime p, const Json& j, bool check) {
  const std::string source = field<std::string>(j, "source");
  ScalingClass cls(field<int>(j, "k"), field<int>(j, "m"));
  int depth = j.contains("depth") ? field<int>(j, "depth") : DigitFunctionTable::kUnbounded;
  if (source == "dense") {
    auto digits = field<std::vector<std::vector<Digit>>>(j, "digits");
    auto arities = field<std::vector<int>>(j, "arities");
    if (static_cast<int>(digits.size()) != depth || arities.size() != digits.size())
      throw ParseError("dense table: depth, arities and digits disagree");
    auto t = check ? DigitFunctionTable::dense(p, cls, std::move(digits))
                   : DigitFunctionTable::dense_unchecked(p, cls, std::move(digits));
    for (int i = 0; i < depth; ++i)
      if (arities[static_cast<std::size_t>(i)] != t.arity(i))
        throw ParseError("dense table: declared arity of digit function " + std::to_string(i) +
                         " is " + std::to_string(arities[static_cast<std::size_t>(i)]) +
                         ", class gives " + std::to_string(t.arity(i)));
    return t;
  }
  if (source == "random")
    return DigitFunctionTable::random(p, cls, field<std::uint64_t>(j, "seed"), depth);
  if (source == "perturbed") {
    auto base = table_from_json(p, field<Json>(j, "base"), check);
    if (!(base.scaling_class() == cls)) throw ParseError("perturbed table: base class differs");
    return DigitFunctionTable::perturbed(base, field<int>(j, "first_digit"),
                                         field<std::uint64_t>(j, "seed"));
  }
  if (source == "spec")
    return DigitFunctionTable::from_spec(mapspec_from_json(field<Json>(j, "spec"), check), cls,
                                         depth);
  throw ParseError("unknown table source '" + source + "'");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Json to_json(const MapSpec& spec) {
  Json j;
  j["type"] = spec.type_name();
  j["prime"] = spec.prime.value();
  std::visit(overloaded{
                 [&](const ShiftPower& s) { j["m"] = s.m; },
                 [&](const Tj& t) {
                   j["m"] = t.m;
                   j["j"] = t.j;
                 },
                 [&](const Rmap& r) { j["m"] = r.m; },
                 [&](const AffineZp& a) {
                   j["a"] = to_text(a.a);
                   j["b"] = to_text(a.b);
                 },
                 [&](const AffineQp& a) {
                   j["a"] = to_text(a.a);
                   j["b"] = to_text(a.b);
                 },
                 [&](const PerturbedAffineQp& g) {
                   j["a"] = to_text(g.a);
                   j["b"] = to_text(g.b);
                   j["scale"] = g.scale;
                   j["psi"] = to_json(*g.psi);
                 },
                 [&](const GaModZp& g) { j["a"] = to_text(g.a); },
                 [&](const Substitution& s) { j["rules"] = s.rules; },
                 [&](const TableMap& t) { j["table"] = table_to_json(t.table); },
                 [&](const MahlerMap& m) {
                   Json c = Json::array();
                   for (const auto& a : m.series.coefficients) c.push_back(to_text(a));
                   j["coefficients"] = c;
                 },
                 [&](const Compose& c) {
                   Json parts = Json::array();
                   for (const auto& part : c.parts) parts.push_back(to_json(part));
                   j["parts"] = parts;
                 },
             },
             spec.body);
  return j;
}

MapSpec mapspec_from_json(const Json& j, bool check_tables) {
  if (!j.is_object()) throw ParseError("map spec must be a JSON object");
  const std::string type = field<std::string>(j, "type");
  Prime p(field<std::uint32_t>(j, "prime"));
  auto qp = [&](const char* name) { return parse_qp(field<std::string>(j, name)); };
  auto zp = [&](const char* name) { return parse_zp(field<std::string>(j, name)); };
  if (type == "shift_power") return MapSpec(p, ShiftPower{field<int>(j, "m")});
  if (type == "tj") return MapSpec(p, Tj{field<int>(j, "m"), field<int>(j, "j")});
  if (type == "rmap") return MapSpec(p, Rmap{field<int>(j, "m")});
  if (type == "affine_zp") return MapSpec(p, AffineZp{zp("a"), zp("b")});
  if (type == "affine_qp") return MapSpec(p, AffineQp{qp("a"), qp("b")});
  if (type == "perturbed_affine_qp")
    return MapSpec(p, PerturbedAffineQp{qp("a"), qp("b"),
                                        std::make_shared<const MapSpec>(
                                            mapspec_from_json(field<Json>(j, "psi"), check_tables)),
                                        field<int>(j, "scale")});
  if (type == "ga_mod_zp") return MapSpec(p, GaModZp{qp("a")});
  if (type == "substitution")
    return MapSpec(p, Substitution{field<std::vector<std::vector<Digit>>>(j, "rules")});
  if (type == "table")
    return MapSpec(p, TableMap{table_from_json(p, field<Json>(j, "table"), check_tables)});
  if (type == "mahler") {
    MahlerSeries s{p, {}};
    for (const auto& c : field<std::vector<std::string>>(j, "coefficients"))
      s.coefficients.push_back(parse_zp(c));
    return MapSpec(p, MahlerMap{std::move(s)});
  }
  if (type == "compose") {
    std::vector<MapSpec> parts;
    for (const auto& part : field<Json>(j, "parts"))
      parts.push_back(mapspec_from_json(part, check_tables));
    return MapSpec(p, Compose{std::move(parts)});
  }
  throw ParseError("unknown map type '" + type + "'");
}

std::string dump_mapspec(const MapSpec& spec) { return to_json(spec).dump(2) + "\n"; }

MapSpec parse_mapspec(const std::string& text, bool check_tables) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map spec is not valid JSON: ") + e.what());
  }
  return mapspec_from_json(j, check_tables);
}

MapSpec load_mapspec(const std::string& path, bool check_tables) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mapspec(ss.str(), check_tables);
}

Json to_json(const PNorm& n) {
  return Json{{"kind", n.is_exact() ? "exact" : "below"}, {"exponent", n.exponent}};
}

Json to_json(const ScalingReport& r) {
  Json j;
  j["k"] = r.claimed.k;
  j["m"] = r.claimed.m;
  j["precision"] = r.precision;
  j["verified"] = r.verified;
  j["mode"] = r.exhaustive ? "exhaustive" : "sampled";
  if (!r.exhaustive) j["seed"] = r.seed;
  j["pairs_checked"] = r.pairs_checked;
  if (r.witness) {
    j["witness"] = {{"x", to_text(r.witness->first)},
                    {"y", to_text(r.witness->second)},
                    {"input_distance", to_json(*r.witness_input_distance)},
                    {"output_distance", to_json(*r.witness_output_distance)}};
  }
  return j;
}

Json to_json(const ExpansivityReport& r) {
  Json j;
  j["c_exponent"] = r.c_exponent;
  j["horizon"] = r.horizon;
  j["precision"] = r.precision;
  j["mode"] = r.exhaustive ? "exhaustive" : "sampled";
  j["pairs_checked"] = r.pairs_checked;
  j["separated"] = r.separated;
  Json times = Json::array();
  for (const auto& [n, c] : r.separation_times) times.push_back({{"n", n}, {"pairs", c}});
  j["separation_times"] = times;
  j["undecided_count"] = r.undecided_count;
  Json und = Json::array();
  for (const auto& [x, y] : r.undecided) und.push_back({{"x", to_text(x)}, {"y", to_text(y)}});
  j["undecided"] = und;
  return j;
}

Json to_json(const FixedPointReport& r) {
  Json j;
  j["map"] = r.map_id;
  j["iterate"] = r.n;
  j["k"] = r.cls.k;
  j["m"] = r.cls.m;
  j["precision"] = r.precision;
  j["count"] = r.count;
  if (r.closed_form) j["closed_form"] = *r.closed_form;
  Json pts = Json::array();
  for (const auto& x : r.points) pts.push_back(to_text(x));
  j["points"] = pts;
  return j;
}

Json to_json(const MahlerSeries& s) {
  Json c = Json::array();
  for (const auto& a : s.coefficients) c.push_back(to_text(a));
  return Json{{"prime", s.prime.value()}, {"length", s.length()}, {"coefficients", c}};
}

Json to_json(const OneLipschitzReport& r) {
  Json j;
  j["criterion"] = "||a_n|| <= p^-floor(log_p n), running index n";
  j["passed"] = r.passed;
  if (r.first_violation) j["first_violation"] = *r.first_violation;
  j["undecided"] = r.undecided;
  Json e = Json::array();
  for (const auto& x : r.entries) {
    const char* st = x.status == OneLipschitzReport::Entry::Status::Pass   ? "pass"
                     : x.status == OneLipschitzReport::Entry::Status::Fail ? "fail"
                                                                           : "undecided";
    e.push_back({{"n", x.n},
                 {"required_exponent", x.required_exponent},
                 {"norm", to_json(x.norm)},
                 {"status", st}});
  }
  j["entries"] = e;
  return j;
}

template <class T>
Json shadow_json(const ShadowResult<T>& r) {
  Json j;
  j["solver"] = r.solver;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.certification.empty()) j["certification"] = r.certification;
  j["shadow"] = to_text(r.shadow);
  j["determined_digits"] = r.determined_digits;
  j["epsilon"] = to_json(r.epsilon);
  j["first_index"] = r.first_index;
  j["last_index"] = r.last_index;
  Json d = Json::array();
  for (std::size_t i = 0; i < r.distances.size(); ++i)
    d.push_back({{"n", r.first_index + static_cast<int>(i)},
                 {"kind", r.distances[i].is_exact() ? "exact" : "below"},
                 {"exponent", r.distances[i].exponent}});
  j["distances"] = d;
  if (r.iterations > 0) {
    j["iterations"] = r.iterations;
    Json c = Json::array();
    for (const auto& x : r.corrections) c.push_back(to_json(x));
    j["corrections"] = c;
  }
  return j;
}

Json to_json(const ShadowResult<ZpApprox>& r) { return shadow_json(r); }
Json to_json(const ShadowResult<QpApprox>& r) { return shadow_json(r); }

template <class T>
Json conjugacy_json(const ConjugacyReport<T>& r) {
  Json j;
  j["samples"] = r.samples;
  j["pairs"] = r.pairs;
  j["semiconjugacy_ok"] = r.semiconjugacy_ok;
  j["max_residual"] = to_json(r.max_residual);
  if (r.residual_witness) j["residual_witness"] = to_text(*r.residual_witness);
  j["isometry_deviation_count"] = r.isometry_deviation_count;
  Json iso = Json::array();
  for (const auto& [x, y] : r.isometry_deviations)
    iso.push_back({{"x", to_text(x)}, {"y", to_text(y)}});
  j["isometry_deviations"] = iso;
  j["collision_count"] = r.collision_count;
  Json col = Json::array();
  for (const auto& [x, y] : r.collisions) col.push_back({{"x", to_text(x)}, {"y", to_text(y)}});
  j["collisions"] = col;
  return j;
}

Json to_json(const ConjugacyReport<ZpApprox>& r) { return conjugacy_json(r); }
Json to_json(const ConjugacyReport<QpApprox>& r) { return conjugacy_json(r); }

namespace {

template <class T>
void write_orbit_impl(std::ostream& out, const PseudoOrbit<T>& orbit, const char* domain) {
  out << "prime " << orbit.points.front().prime().value() << "\n";
  out << "domain " << domain << "\n";
  out << "delta " << (orbit.certified_delta.is_exact() ? "exact " : "below ")
      << orbit.certified_delta.exponent << "\n";
  out << "indices " << orbit.first_index << " " << orbit.last_index() << "\n";
  for (const auto& x : orbit.points) out << to_text(x) << "\n";
}

}  // namespace

void write_orbit(std::ostream& out, const ZpOrbit& orbit) { write_orbit_impl(out, orbit, "zp"); }
void write_orbit(std::ostream& out, const QpOrbit& orbit) { write_orbit_impl(out, orbit, "qp"); }

OrbitFile read_orbit(std::istream& in) {
  OrbitFile f;
  std::string line;
  int last = 0;
  bool have_prime = false, have_domain = false, have_delta = false, have_indices = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "prime") {
      std::uint32_t p = 0;
      if (!(ls >> p)) throw ParseError("orbit: bad prime line");
      f.prime = Prime(p);
      have_prime = true;
    } else if (key == "domain") {
      std::string d;
      ls >> d;
      if (d != "zp" && d != "qp") throw ParseError("orbit: domain must be zp or qp");
      f.domain = d == "zp" ? Domain::Zp : Domain::Qp;
      have_domain = true;
    } else if (key == "delta") {
      std::string kind;
      int e = 0;
      if (!(ls >> kind >> e) || (kind != "exact" && kind != "below"))
        throw ParseError("orbit: delta line must be 'delta exact|below <e>'");
      f.delta = kind == "exact" ? PNorm::exact(e) : PNorm::below(e);
      have_delta = true;
    } else if (key == "indices") {
      if (!(ls >> f.first_index >> last)) throw ParseError("orbit: bad indices line");
      have_indices = true;
    } else {
      f.values.push_back(line);
    }
  }
  if (!have_prime || !have_domain || !have_delta || !have_indices)
    throw ParseError("orbit: header needs prime, domain, delta and indices");
  if (static_cast<int>(f.values.size()) != last - f.first_index + 1)
    throw ParseError("orbit: index range " + std::to_string(f.first_index) + ".." +
                     std::to_string(last) + " but " + std::to_string(f.values.size()) +
                     " values");
  return f;
}

}  // namespace padyn
