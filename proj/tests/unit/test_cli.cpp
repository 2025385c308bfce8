#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support/oracles.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "padyn/io.hpp"
#include "padyn/text.hpp"

using namespace padyn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "padyn_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  fs::path path = scratch() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse errors exit with 2") {
  CHECK(run({"validate", "--map", write("bad.json", "{ not json")}).code == cli::kParse);
  CHECK(run({"validate", "--map", write("unknown.json", R"({"prime":2,"type":"nope"})")}).code ==
        cli::kParse);
  CHECK(run({"validate", "--map", (scratch() / "missing.json").string()}).code == cli::kParse);
  CHECK(run({"frobnicate"}).code == cli::kParse);
  CHECK(run({"shadow", "--solver", "magic"}).code == cli::kParse);
  auto r = run({"validate", "--map", write("digit.json", R"({"prime":3,"type":"affine_zp","a":"3^0 * [1 3]","b":"3^0 * [0]"})")});
  CHECK(r.code == cli::kParse);
  CHECK(r.err.find("parse error") != std::string::npos);
}

TEST_CASE("fixed points of T_j match p^(m+j)") {
  for (std::uint32_t p : {2u, 3u}) {
    auto map = write("tj" + std::to_string(p) + ".json",
                     R"({"prime":)" + std::to_string(p) + R"(,"type":"tj","m":1,"j":2})");
    auto r = run({"fixed-points", "--map", map});
    REQUIRE(r.code == cli::kOk);
    Json j = r.json();
    CHECK(j["fixed_points"]["count"] == oracle::power(p, 3));
    CHECK(j["closed_form_agrees"] == true);
    CHECK(j["tool"] == "padyn");
    CHECK(j["version"] == "0.1.0");
    CHECK(j["rng"] == "mt19937_64/rejection-v1");
    // every reported point is fixed by the digit rule
    for (const auto& s : j["fixed_points"]["points"]) {
      oracle::Digits x = oracle::digits_of(parse_zp(s.get<std::string>()));
      oracle::Digits y = oracle::tj(x, 1, 2);
      CHECK(oracle::first_difference(x, y) == -1);
    }
  }
}

TEST_CASE("a corrupted dense table fails validate with 4 and a reproduce line") {
  // S on 2 digits with the bijectivity of f_1 broken
  Json table = {{"source", "dense"}, {"k", 1}, {"m", 1}, {"depth", 2}, {"arities", {2, 3}},
                {"digits", {{0, 0, 1, 1}, {0, 0, 0, 0, 1, 1, 1, 1}}}};
  table["digits"][1][5] = 0;
  Json spec = {{"prime", 2}, {"type", "table"}, {"table", table}};
  auto r = run({"validate", "--map", write("corrupt.json", spec.dump())});
  CHECK(r.code == cli::kVerification);
  Json j = r.json();
  CHECK(j["verified"] == false);
  CHECK(j["bijectivity"]["ok"] == false);
  REQUIRE(j.contains("reproduce"));
  CHECK(j["reproduce"].get<std::string>().rfind("padyn oracle scaling", 0) == 0);

  Json good = spec;
  good["table"]["digits"][1][5] = 1;
  CHECK(run({"validate", "--map", write("good.json", good.dump())}).code == cli::kOk);
}

TEST_CASE("preconditions exit with 3") {
  auto s = write("s1.json", R"({"prime":2,"type":"shift_power","m":1})");
  // S is not 1-Lipschitz, so the Lipschitz solver refuses it
  auto orbit = write("s_orbit.txt", "prime 2\ndomain zp\ndelta below 12\nindices 0 1\n2^0 * [1 0 1 1 0 0 1 0 1 1 0 1]\n2^0 * [0 1 1 0 0 1 0 1 1 0 1]\n");
  CHECK(run({"shadow", "--map", s, "--orbit", orbit, "--solver", "lipschitz"}).code == cli::kPrecondition);
  auto t3 = write("t3.json", R"({"prime":3,"type":"shift_power","m":1})");
  CHECK(run({"shadow", "--map", t3, "--orbit", orbit}).code == cli::kPrecondition);
  CHECK(run({"validate", "--map", s, "--k", "2", "--m", "2", "--precision", "3"}).code ==
        cli::kPrecondition);
}

TEST_CASE("orbit and shadow round trip") {
  auto map = write("rt.json", R"({"prime":2,"type":"table","table":{"source":"random","k":2,"m":1,"seed":5}})");
  auto orbit = (scratch() / "o.txt").string();
  auto gen = run({"orbit", "--map", map, "--x0", "2^0 * [1 0 1 1 0 1 0 0 1 1 0 1]", "--delta", "3",
                  "--steps", "4", "--seed", "7", "--out", orbit});
  REQUIRE(gen.code == cli::kOk);
  const std::string first = read(orbit);
  run({"orbit", "--map", map, "--x0", "2^0 * [1 0 1 1 0 1 0 0 1 1 0 1]", "--delta", "3",
       "--steps", "4", "--seed", "7", "--out", orbit});
  CHECK(read(orbit) == first);

  auto sh = run({"shadow", "--map", map, "--orbit", orbit});
  REQUIRE(sh.code == cli::kOk);
  Json j = sh.json();
  CHECK(j["result"]["determined_digits"] == 2 + 4);
  auto again = run({"shadow", "--map", map, "--orbit", orbit});
  CHECK(again.out == sh.out);

  auto o = run({"oracle", "shadow", "--map", map, "--orbit", orbit});
  CHECK(o.code == cli::kOk);

  // a true orbit shadows itself
  auto exact = (scratch() / "exact.txt").string();
  REQUIRE(run({"orbit", "--map", map, "--x0", "2^0 * [0 1 1 0 1 0 0 1 1 1]", "--steps", "3",
               "--out", exact})
              .code == cli::kOk);
  Json e = run({"shadow", "--map", map, "--orbit", exact}).json();
  auto x0 = parse_zp("2^0 * [0 1 1 0 1 0 0 1 1 1]");
  auto y = parse_zp(e["result"]["shadow"].get<std::string>());
  CHECK(x0.truncated(y.precision()) == y);
}

TEST_CASE("orbits too noisy for the bound, or with a false header") {
  auto map = write("rt2.json", R"({"prime":2,"type":"table","table":{"source":"random","k":2,"m":1,"seed":5}})");
  auto gen = run({"orbit", "--map", map, "--x0", "2^0 * [1 0 1 1 0 1 0 0 1 1 0 1]", "--steps", "3"});
  REQUIRE(gen.code == cli::kOk);
  // flip digit 0 of the point at index 1
  auto forge = [&](const std::string& delta) {
    std::istringstream lines(gen.out);
    std::string line, text;
    int point = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("2^0", 0) == 0) {
        if (point == 1) line[7] = line[7] == '0' ? '1' : '0';
        ++point;
      }
      if (line.rfind("delta", 0) == 0) line = delta;
      text += line + "\n";
    }
    return text;
  };
  auto noisy = run({"shadow", "--map", map, "--orbit", write("noisy.txt", forge("delta exact 0"))});
  CHECK(noisy.code == cli::kPrecondition);
  auto lying = run({"shadow", "--map", map, "--orbit", write("lying.txt", forge("delta exact 3"))});
  CHECK(lying.code == cli::kPrecondition);
  CHECK(lying.err.find("claims delta") != std::string::npos);
}

TEST_CASE("conjugate constructors") {
  auto rt = write("kk.json", R"({"prime":2,"type":"table","table":{"source":"random","k":2,"m":2,"seed":3}})");
  auto r = run({"conjugate", "--map", rt, "--constructor", "shift", "--samples", "64"});
  CHECK(r.code == cli::kOk);
  Json j = r.json();
  auto again = run({"conjugate", "--map", rt, "--constructor", "shift", "--samples", "64"});
  CHECK(again.out == r.out);

  auto f = write("f21.json", R"({"prime":2,"type":"table","table":{"source":"random","k":2,"m":1,"seed":5}})");
  auto g = write("g21.json", R"({"prime":2,"type":"table","table":{"source":"perturbed","k":2,"m":1,"first_digit":1,"seed":9,"base":{"source":"random","k":2,"m":1,"seed":5}}})");
  CHECK(run({"conjugate", "--map", f, "--map2", g, "--constructor", "nearby"}).code == cli::kOk);
  auto g0 = write("g0.json", R"({"prime":2,"type":"table","table":{"source":"perturbed","k":2,"m":1,"first_digit":0,"seed":9,"base":{"source":"random","k":2,"m":1,"seed":5}}})");
  CHECK(run({"conjugate", "--map", f, "--map2", g0, "--constructor", "nearby"}).code ==
        cli::kPrecondition);

  auto qp = write("qp.json", R"({"prime":3,"type":"affine_qp","a":"3^-2 * [2 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0]","b":"3^-1 * [1 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 0]"})");
  CHECK(run({"conjugate", "--map", qp, "--constructor", "qp-affine"}).code == cli::kOk);
}

TEST_CASE("oracle subcommands agree with the library") {
  CHECK(run({"oracle", "arithmetic", "--p", "3", "--precision", "4", "--samples", "0"}).code == cli::kOk);
  auto t = write("tjo.json", R"({"prime":2,"type":"tj","m":1,"j":1})");
  CHECK(run({"oracle", "fixed-points", "--map", t, "--precision", "8"}).code == cli::kOk);
  CHECK(run({"oracle", "scaling", "--map", t, "--precision", "8", "--k", "2", "--m", "1"}).code == cli::kOk);
  auto sub = write("sub.json", R"({"prime":3,"type":"substitution","rules":[[0],[2,1],[1]]})");
  CHECK(run({"mahler", "--map", sub, "--max-index", "9", "--require-lipschitz"}).code == cli::kOk);
  CHECK(run({"oracle", "mahler", "--map", sub, "--max-index", "9"}).code == cli::kOk);
  auto s = write("s.json", R"({"prime":2,"type":"shift_power","m":1})");
  CHECK(run({"mahler", "--map", s, "--max-index", "4", "--require-lipschitz"}).code ==
        cli::kVerification);
}

TEST_CASE("reports written with --out match stdout") {
  auto t = write("tjw.json", R"({"prime":2,"type":"tj","m":1,"j":1})");
  auto path = (scratch() / "report.json").string();
  auto a = run({"fixed-points", "--map", t});
  REQUIRE(run({"fixed-points", "--map", t, "--out", path}).code == cli::kOk);
  CHECK(read(path) == a.out);
  CHECK(a.out.back() == '\n');
}
