#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "padyn/analysis.hpp"
#include "padyn/conjugacy.hpp"
#include "padyn/mahler.hpp"
#include "padyn/map_spec.hpp"
#include "padyn/shadowing.hpp"

namespace padyn {

using Json = nlohmann::ordered_json;

// MapSpec <-> JSON, schema in docs/mapspec.md. Printing a parsed spec
// reproduces the input bytes when the input was printed by dump_mapspec.
// With check_tables off, dense tables are loaded without the bijectivity
// check so a validator can report the violation itself.
Json to_json(const MapSpec& spec);
MapSpec mapspec_from_json(const Json& j, bool check_tables = true);
std::string dump_mapspec(const MapSpec& spec);
MapSpec parse_mapspec(const std::string& text, bool check_tables = true);
MapSpec load_mapspec(const std::string& path, bool check_tables = true);

Json to_json(const PNorm& n);
Json to_json(const ScalingReport& r);
Json to_json(const ExpansivityReport& r);
Json to_json(const FixedPointReport& r);
Json to_json(const MahlerSeries& s);
Json to_json(const OneLipschitzReport& r);
Json to_json(const ShadowResult<ZpApprox>& r);
Json to_json(const ShadowResult<QpApprox>& r);
Json to_json(const ConjugacyReport<ZpApprox>& r);
Json to_json(const ConjugacyReport<QpApprox>& r);

// Pseudo-orbit text file:
//   prime <p>
//   domain zp|qp
//   delta exact <e> | delta below <e>
//   indices <first> <last>
//   one textual value per line
// Lines starting with '#' are comments.
struct OrbitFile {
  Prime prime{2};
  Domain domain = Domain::Zp;
  PNorm delta;
  int first_index = 0;
  std::vector<std::string> values;
};

void write_orbit(std::ostream& out, const ZpOrbit& orbit);
void write_orbit(std::ostream& out, const QpOrbit& orbit);
OrbitFile read_orbit(std::istream& in);

}  // namespace padyn
