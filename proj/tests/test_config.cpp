#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "penalab/driver.hpp"
#include "penalab/field_io.hpp"
#include "penalab/report_json.hpp"

using namespace penalab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {
const double pi = std::numbers::pi;

const fs::path kSchemas = fs::path(PENALAB_SOURCE_DIR) / "schemas";

json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

// Minimal structural validator: type / required / properties / items / $ref.
void validate(const json& doc, const json& schema) {
  if (schema.contains("$ref")) {
    validate(doc, load_json(kSchemas / schema["$ref"].get<std::string>()));
    return;
  }
  if (schema.contains("type")) {
    const std::string t = schema["type"].get<std::string>();
    if (t == "object") CHECK(doc.is_object());
    if (t == "array") CHECK(doc.is_array());
    if (t == "string") CHECK(doc.is_string());
    if (t == "boolean") CHECK(doc.is_boolean());
    if (t == "number") CHECK(doc.is_number());
    if (t == "integer") CHECK(doc.is_number_integer());
  }
  if (schema.contains("required"))
    for (const auto& key : schema["required"]) {
      INFO("missing key: ", key.get<std::string>());
      CHECK(doc.contains(key.get<std::string>()));
    }
  if (schema.contains("properties") && doc.is_object())
    for (const auto& [key, sub] : schema["properties"].items())
      if (doc.contains(key)) validate(doc[key], sub);
  if (schema.contains("items") && doc.is_array())
    for (const auto& item : doc) validate(item, schema["items"]);
}

void validate_file(const fs::path& doc_path, const std::string& schema_name) {
  validate(load_json(doc_path), load_json(kSchemas / schema_name));
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("penalab_cfg_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}
} // namespace

TEST_CASE("shipped presets carry the pinned constants") {
  ExperimentConfig toy = preset("toy-1node");
  CHECK(toy.domain.kind == DomainKind::interval);
  CHECK(toy.domain.lo[0] == 0.0);
  CHECK(toy.domain.hi[0] == 2.0);
  CHECK(toy.n[0] == 3);
  CHECK(toy.lambda == 5.0);
  CHECK(toy.p == 4.0);
  CHECK(toy.m == 10.0);
  CHECK(toy.make_grid()->num_interior() == 1);

  ExperimentConfig ip = preset("interval-pi");
  CHECK(ip.domain.hi[0] == doctest::Approx(pi));
  CHECK(ip.n[0] == 401);
  CHECK(ip.lambda == 3.0);
  CHECK(ip.p == 4.0);
  CHECK(ip.m_list == std::vector<double>{8, 16, 32, 64, 128});

  ExperimentConfig disk = preset("disk");
  CHECK(disk.domain.kind == DomainKind::disk);
  CHECK(disk.domain.radius == 1.0);
  CHECK(disk.n[0] == 161);
  CHECK(disk.lambda == 1.0);
  CHECK(disk.p == 30.0);

  CHECK(preset("square").domain.kind == DomainKind::rectangle);
  CHECK(preset("gz-hunt").radial.p_sweep.size() > 0);
  CHECK_THROWS(preset("no-such-preset"));
  CHECK(preset_names().size() == 5);
}

TEST_CASE("config serialization round trip is semantically identical") {
  ExperimentConfig a = preset("interval-pi");
  a.coeff_expr = "bump";
  a.beta = 1.5;
  a.psi0 = "sin";
  a.tol.tol_vi = 3e-7;
  a.seed = 42;
  ExperimentConfig b = parse_config(serialize_config(a));
  CHECK(serialize_config(b) == serialize_config(a));
  CHECK(b.domain.kind == a.domain.kind);
  CHECK(b.lambda == a.lambda);
  CHECK(b.m_list == a.m_list);
  CHECK(b.tol.tol_vi == a.tol.tol_vi);
  CHECK(b.seed == a.seed);
  CHECK(b.psi0 == a.psi0);
}

TEST_CASE("config validation rejects bad parameters with clear messages") {
  ExperimentConfig c = preset("toy-1node");
  c.p = 1.5;
  try {
    c.validate();
    CHECK(false);
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("p > 2") != std::string::npos);
  }
  CHECK_THROWS(parse_config("{\"p\": 1.5}"));
  CHECK_THROWS(parse_config("not json at all {"));

  ExperimentConfig t = preset("toy-1node");
  t.tol.tol_fp = -1.0;
  CHECK_THROWS(t.validate());
  ExperimentConfig m = preset("toy-1node");
  m.m = 3.0; // m <= p
  CHECK_THROWS(m.validate());
}

TEST_CASE("solve-min run emits a schema-conforming report") {
  ExperimentConfig cfg = preset("toy-1node");
  cfg.output_dir = fresh_dir("min").string();
  RunResult res = run("solve-min", cfg);
  CHECK(res.exit_code == 0);
  validate_file(fs::path(res.output_dir) / "solve_min_report.json",
                "solve_min_report.schema.json");
  validate_file(fs::path(res.output_dir) / "manifest.json", "manifest.schema.json");
  CHECK(fs::exists(fs::path(res.output_dir) / "solution_min.csv"));
  json rep = load_json(fs::path(res.output_dir) / "solve_min_report.json");
  CHECK(rep["level"].get<double>() == doctest::Approx(-0.5585).epsilon(1e-3));
}

TEST_CASE("solve-mp run emits a schema-conforming report") {
  ExperimentConfig cfg = preset("toy-1node");
  cfg.output_dir = fresh_dir("mp").string();
  RunResult res = run("solve-mp", cfg);
  CHECK(res.exit_code == 0);
  validate_file(fs::path(res.output_dir) / "solve_mp_report.json",
                "solve_mp_report.schema.json");
  json rep = load_json(fs::path(res.output_dir) / "solve_mp_report.json");
  CHECK(rep["level"].get<double>() == doctest::Approx(0.2011).epsilon(1e-3));
  CHECK(fs::exists(fs::path(res.output_dir) / "mp_path_levels.csv"));
}

TEST_CASE("obstacle run emits a schema-conforming report") {
  ExperimentConfig cfg = preset("toy-1node");
  cfg.output_dir = fresh_dir("vi").string();
  RunResult res = run("obstacle", cfg);
  CHECK(res.exit_code == 0);
  validate_file(fs::path(res.output_dir) / "vi_report.json", "vi_report.schema.json");
  json rep = load_json(fs::path(res.output_dir) / "vi_report.json");
  CHECK(rep["multiplier"]["g_max"].get<double>() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("sweep run emits records and a schema-conforming summary") {
  ExperimentConfig cfg = preset("toy-1node");
  cfg.m_list = {10, 20, 40};
  cfg.output_dir = fresh_dir("sweep").string();
  RunResult res = run("sweep", cfg);
  CHECK(res.exit_code == 0);
  validate_file(fs::path(res.output_dir) / "sweep_summary.json", "sweep_summary.schema.json");
  std::ifstream csv(fs::path(res.output_dir) / "sweep.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("m,u_level,z_level", 0) == 0);
  int rows = 0;
  for (std::string line; std::getline(csv, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("radial and eigen and constants runs") {
  ExperimentConfig cfg;
  cfg.radial.N = 1;
  cfg.radial.p = 4.0;
  cfg.radial.lambda = 1.0;
  cfg.radial.R = 1.0;
  cfg.radial.has_scaling = true;
  cfg.output_dir = fresh_dir("radial").string();
  RunResult res = run("radial", cfg);
  CHECK(res.exit_code == 0);
  validate_file(fs::path(res.output_dir) / "radial_report.json", "radial_report.schema.json");
  json rep = load_json(fs::path(res.output_dir) / "radial_report.json");
  CHECK(rep["U0"].get<double>() == doctest::Approx(1.85407).epsilon(1e-4));

  ExperimentConfig eig = preset("interval-pi");
  eig.n = {101, 101};
  eig.output_dir = fresh_dir("eigen").string();
  RunResult res2 = run("eigen", eig);
  CHECK(res2.exit_code == 0);
  validate_file(fs::path(res2.output_dir) / "eigen_report.json", "eigen_report.schema.json");
  json rep2 = load_json(fs::path(res2.output_dir) / "eigen_report.json");
  CHECK(rep2["lambda1"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));

  ExperimentConfig cst = preset("interval-pi");
  cst.n = {201, 201};
  cst.psi0 = "sin";
  cst.output_dir = fresh_dir("constants").string();
  RunResult res3 = run("constants", cst);
  CHECK(res3.exit_code == 0);
  validate_file(fs::path(res3.output_dir) / "constants_report.json",
                "constants_report.schema.json");
  json rep3 = load_json(fs::path(res3.output_dir) / "constants_report.json");
  CHECK(rep3["scaling"]["Lambda_psi"].get<double>() == doctest::Approx(8.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("exit code 2 flags completed but unconverged runs") {
  ExperimentConfig cfg = preset("interval-pi");
  cfg.n = {101, 101};
  cfg.m = 16.0;
  cfg.n_path = 9;
  cfg.tol.tol_resid = 1e-300; // unreachable tolerance
  cfg.output_dir = fresh_dir("noconv").string();
  RunResult res = run("solve-mp", cfg);
  CHECK(res.exit_code == 2);
}

TEST_CASE("unknown subcommand and output dir override") {
  ExperimentConfig cfg = preset("toy-1node");
  CHECK_THROWS(run("no-such-mode", cfg));

  const fs::path dir = fresh_dir("envover");
  setenv("PENALAB_OUT", dir.string().c_str(), 1);
  ExperimentConfig cfg2 = preset("toy-1node");
  cfg2.output_dir = fresh_dir("ignored").string();
  RunResult res = run("eigen", cfg2);
  unsetenv("PENALAB_OUT");
  CHECK(res.output_dir == dir.string());
  CHECK(fs::exists(dir / "eigen_report.json"));
}

TEST_CASE("numeric formatting carries 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(std::numbers::pi) == "3.1415926535897931");
}
