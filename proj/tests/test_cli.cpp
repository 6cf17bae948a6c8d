#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "corpus.hpp"
#include "rankcert/io.hpp"

using namespace rankcert;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("rankcert_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  return fs::exists(p) ? read_file(p.string()) : std::string();
}

RunResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  std::string cmd = std::string(RANKCERT_CLI_PATH) + " " + args + " > " + out.string() +
                    " 2> " + err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// the draft-07 subset the report schema uses
bool schema_valid(const json& inst, const json& sch) {
  if (sch.contains("type")) {
    const std::string t = sch["type"].get<std::string>();
    if (t == "object" && !inst.is_object()) return false;
    if (t == "array" && !inst.is_array()) return false;
    if (t == "string" && !inst.is_string()) return false;
    if (t == "integer" && !inst.is_number_integer()) return false;
    if (t == "number" && !inst.is_number()) return false;
    if (t == "boolean" && !inst.is_boolean()) return false;
  }
  if (sch.contains("enum")) {
    bool hit = false;
    for (const auto& v : sch["enum"]) hit = hit || v == inst;
    if (!hit) return false;
  }
  if (sch.contains("required")) {
    if (!inst.is_object()) return false;
    for (const auto& key : sch["required"])
      if (!inst.contains(key.get<std::string>())) return false;
  }
  if (sch.contains("properties") && inst.is_object()) {
    for (const auto& [key, sub] : sch["properties"].items())
      if (inst.contains(key) && !schema_valid(inst.at(key), sub)) return false;
  }
  if (sch.contains("items") && inst.is_array()) {
    for (const auto& el : inst)
      if (!schema_valid(el, sch["items"])) return false;
  }
  if (sch.contains("anyOf")) {
    bool hit = false;
    for (const auto& sub : sch["anyOf"]) hit = hit || schema_valid(inst, sub);
    if (!hit) return false;
  }
  return true;
}

const json& report_schema() {
  static const json sch = json::parse(read_file(RANKCERT_SCHEMA_PATH));
  return sch;
}

// run with --json, expect the given exit code, and validate the envelope
json envelope(const std::string& args, int want_exit = 0) {
  RunResult r = run_cli("--json " + args);
  INFO("args: " << args << "\nstderr: " << r.err);
  REQUIRE(r.exit_code == want_exit);
  json j = json::parse(r.out);
  REQUIRE(schema_valid(j, report_schema()));
  return j;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("generate then analyze a plane") {
  const std::string fano = path_of("fano.txt");
  json g = envelope("gen plane --p 2 --out " + fano);
  CHECK(g["command"] == "gen");
  CHECK(g["result"]["written"] == fano);
  CHECK(g["result"]["m"] == 7);
  CHECK(g["result"]["params"]["q"] == 3);
  CHECK(g["result"]["params"]["t"] == 1);
  REQUIRE(fs::exists(fano));

  json a = envelope("analyze --input " + fano + " --actual");
  CHECK(a["command"] == "analyze");
  CHECK(a["inputs"]["actual"] == true);
  const std::string digest = a["inputs"]["input"]["digest"].get<std::string>();
  CHECK(digest.rfind("fnv1a:", 0) == 0);
  const json& rep = a["result"]["report"];
  CHECK(rep["params"]["q"] == 3);
  CHECK(rep["params"]["k"] == 3);
  CHECK(rep["params"]["t"] == 1);
  CHECK(rep["bound_main"] == "21/5");
  CHECK(rep["certified"] == 5);
  CHECK(rep["actual_rank"] == 7);
  CHECK(rep["bound_square"].is_string());

  // same digest on a second read
  json a2 = envelope("analyze --input " + fano);
  CHECK(a2["inputs"]["input"]["digest"] == digest);
  CHECK(a2["result"]["report"]["actual_rank"].is_null());

  RunResult human = run_cli("analyze --input " + fano);
  CHECK(human.exit_code == 0);
  CHECK(human.out.find("certified: 5") != std::string::npos);
}

TEST_CASE("scale writes a loadable matrix") {
  const std::string fano = path_of("fano_scale.txt");
  envelope("gen plane --p 2 --out " + fano);
  const std::string scaled = path_of("fano_scaled.txt");

  json s = envelope("scale --input " + fano + " --out " + scaled);
  CHECK(s["result"]["property_s"] == true);
  CHECK(s["result"]["scaling"]["converged"] == true);
  CHECK(s["result"]["scaling"]["max_row_sq_norm"].get<double>() <= 1.0 + 1e-6);
  CHECK(s["result"]["scaling"]["min_col_sq_norm"].get<double>() >= 1.0 - 1e-6);
  CHECK(s["result"]["out"] == scaled);
  ComplexMatrix back = read_matrix_file(scaled);
  CHECK(back.m == 7);
  CHECK(back.n == 7);

  json s2 = envelope("scale --input " + fano + " --eps 1e-3 --max-iter 7");
  CHECK(s2["inputs"]["eps"].get<double>() == Catch::Approx(1e-3));
  CHECK(s2["inputs"]["max_iter"] == 7);
  CHECK(s2["result"]["scaling"]["converged"] == true);
  CHECK(s2["result"]["scaling"]["iterations"].get<long long>() <= 7);
}

TEST_CASE("scaling an infeasible support is reported, not fatal") {
  const std::string bad = path_of("infeasible.txt");
  write_file(bad, "3 3\n1 0 0\n1 0 0\n1 1 1\n");
  json s = envelope("scale --input " + bad + " --max-iter 50");
  CHECK(s["result"]["property_s"] == false);
  CHECK(s["result"]["scaling"]["converged"] == false);
  CHECK(s["result"]["scaling"]["iterations"] == 50);
  CHECK(s["result"]["scaling"].contains("note"));
}

TEST_CASE("cover emits matrix plus sidecar") {
  const std::string fano = path_of("fano_cover.txt");
  envelope("gen plane --p 2 --out " + fano);
  const std::string out = path_of("cover_q.txt");

  json c = envelope("cover --input " + fano + " --type q --out " + out);
  CHECK(c["result"]["cover"]["rows"] == 21);
  CHECK(c["result"]["cover"]["cols"] == 7);
  CHECK(c["result"]["cover"]["c_target"] == 3);
  CHECK(c["result"]["cover"]["multiplicity"].get<int>() <= 3);
  CHECK(c["result"]["scaling"]["converged"] == true);
  CHECK(c["result"]["out"] == out);
  const std::string sidecar = c["result"]["sidecar"].get<std::string>();
  CHECK(sidecar == out + ".json");
  REQUIRE(fs::exists(sidecar));
  json side = json::parse(read_file(sidecar));
  CHECK(side["rows"] == 21);
  CHECK(side["origin"].size() == 21);
  ComplexMatrix B = read_matrix_file(out);
  CHECK(B.m == 21);
  CHECK(B.n == 7);

  json cg = envelope("cover --input " + fano + " --type group --out " + path_of("cover_g.txt"));
  CHECK(cg["result"]["cover"]["c_target"] == 10);

  RunResult badtype = run_cli("cover --input " + fano + " --type bogus --out " + out);
  CHECK(badtype.exit_code == 2);
}

TEST_CASE("rigidity floors") {
  const std::string p5 = path_of("plane5.txt");
  envelope("gen plane --p 5 --out " + p5);

  json r = envelope("rigidity --input " + p5 + " --s 2");
  CHECK(r["inputs"]["s"] == 2);
  CHECK(r["result"]["report"]["certified"] == 11);
  CHECK(r["result"]["report"]["params"]["k"] == 4);

  json a = envelope("analyze --input " + p5 + " --rigidity 2");
  CHECK(a["inputs"]["s"] == 2);
  CHECK(a["result"]["report"]["certified"] == 11);
}

TEST_CASE("sg family on the hesse points") {
  const std::string hesse = path_of("hesse.txt");
  json g = envelope("gen hesse --out " + hesse);
  CHECK(g["result"]["n"] == 9);
  CHECK(g["result"]["d"] == 2);

  json s = envelope("sg --points " + hesse);
  const json& rep = s["result"]["report"];
  CHECK(rep["delta"] == "1/1");
  CHECK(rep["kelly_route"] == true);
  CHECK(rep["certified_rank"] == 6);
  CHECK(rep["rank_measured"] == 6);
  CHECK(rep["pass"] == true);

  json e = envelope("sg --points " + hesse + " --extract 1/2");
  CHECK(e["inputs"]["extract"] == "1/2");
  CHECK(e["result"]["report"]["hypothesis_met"] == false);
  CHECK(e["result"]["report"]["survivors"].size() == 9);
  CHECK(e["result"]["report"]["measured_delta"] == "1/1");

  json f = envelope("sg --points " + hesse + " --k 1 --variant star");
  CHECK(f["result"]["report"]["k"] == 1);
  CHECK(f["result"]["report"]["variant"] == "star");
  CHECK(f["result"]["report"]["asserted"] == true);
  CHECK(f["result"]["report"]["pass"] == true);
  CHECK(f["result"]["report"]["delta"] == "1/1");
}

TEST_CASE("flats and freiman subcommands") {
  const std::string grid = path_of("grid3.txt");
  write_file(grid, points_to_text(testutil::grid3()));
  json f = envelope("flats --points " + grid + " --k 1");
  CHECK(f["inputs"]["k"] == 1);
  CHECK(f["result"]["report"]["delta"] == "5/9");
  CHECK(f["result"]["report"]["k_over_delta"] == "9/5");
  CHECK(f["result"]["report"]["asserted"] == true);
  CHECK(f["result"]["report"]["pass"] == true);

  PointConfiguration A(4, 1);
  for (int i = 0; i < 4; ++i) A.set(i, 0, Complex(i, 0));
  const std::string ap = path_of("ap.txt");
  write_file(ap, points_to_text(A));
  json fr = envelope("freiman --points " + ap + " --alpha 1/2");
  CHECK(fr["inputs"]["alpha"][0].get<double>() == Catch::Approx(0.5));
  CHECK(fr["result"]["report"]["set_size"] == 4);
  CHECK(fr["result"]["report"]["image_size"] == 5);
  CHECK(fr["result"]["report"]["K"] == "5/4");
  CHECK(fr["result"]["report"]["K_squared"] == "25/16");

  json bad = envelope("freiman --points " + ap + " --alpha 1", 1);
  CHECK(bad["result"]["error"]["code"] == "InvalidAlpha");
}

TEST_CASE("selftest criteria lines") {
  RunResult human = run_cli("selftest --only 1");
  CHECK(human.exit_code == 0);
  CHECK(human.out.find("criterion 1 (kelly-end-to-end): PASS") != std::string::npos);

  json j = envelope("selftest --only 4");
  REQUIRE(j["result"]["criteria"].size() == 1);
  CHECK(j["result"]["criteria"][0]["id"] == 4);
  CHECK(j["result"]["criteria"][0]["name"] == "property-s-equivalence");
  CHECK(j["result"]["criteria"][0]["pass"] == true);
  CHECK(j["result"]["all_pass"] == true);

  json oob = envelope("selftest --only 99", 1);
  CHECK(oob["result"]["error"]["code"] == "InvalidParams");
}

TEST_CASE("error paths and exit codes") {
  json miss = envelope("analyze --input " + path_of("does_not_exist.txt"), 1);
  CHECK(miss["result"]["error"]["code"] == "IoError");

  RunResult human = run_cli("analyze --input " + path_of("does_not_exist.txt"));
  CHECK(human.exit_code == 1);
  CHECK(human.err.find("error IoError:") != std::string::npos);

  const std::string garbage = path_of("garbage.txt");
  write_file(garbage, "not a matrix\n");
  json bad = envelope("analyze --input " + garbage, 1);
  CHECK(bad["result"]["error"]["code"] == "BadFormat");

  RunResult unknown = run_cli("analyze --bogus");
  CHECK(unknown.exit_code == 2);
  RunResult bare = run_cli("");
  CHECK(bare.exit_code == 2);

  const std::string never = path_of("never.txt");
  json inf = envelope("gen random --m 2 --n 5 --q 1 --k 2 --t 1 --seed 3 --out " + never);
  CHECK(inf["result"]["feasible"] == false);
  CHECK(!inf["result"].contains("written"));
  CHECK(!fs::exists(never));

  const std::string rnd = path_of("random.txt");
  json ok = envelope("gen random --m 7 --n 7 --q 3 --k 3 --t 1 --seed 11 --out " + rnd);
  if (ok["result"]["feasible"] == true) {
    CHECK(ok["result"]["written"] == rnd);
    CHECK(fs::exists(rnd));
    ComplexMatrix M = read_matrix_file(rnd);
    CHECK(M.m == 7);
  }
}
