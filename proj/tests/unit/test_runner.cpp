#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "polyflow/errors.hpp"
#include "polyflow/runner.hpp"

using namespace polyflow;
using namespace polyflow::runner;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / "polyflow-unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunSpec circle_spec(double r) {
  return parse_run_spec("schema = polyflow-run/1\nname = circle_" + std::to_string(r) +
                        "\nshape = circle\nshape.r = " + std::to_string(r) +
                        "\nflow.n = 64\nflow.dt = 1e-4\nflow.max_steps = 50\nflow.kosc_stop = -1\n");
}

}  // namespace

TEST_CASE("spec parsing") {
  const auto s = parse_run_spec(R"(schema = polyflow-run/1
# comment
name = demo
shape = multi_mode
shape.r = 1
shape.modes = 0.02:3, 0.01:5:0.4
flow.p = 2
flow.scheme = imex_euler
flow.adaptive = true
track.multiplicity = yes
output.formats = csv, json
suites = conservation, kosc_identity
)");
  CHECK(s.name == "demo");
  CHECK(s.shape.modes.size() == 2);
  CHECK(s.shape.modes[1].phase == doctest::Approx(0.4));
  CHECK(s.flow.p == 2);
  CHECK(s.flow.scheme == flow::Scheme::imex_euler);
  CHECK(s.flow.adaptive);
  CHECK(s.flow.record.multiplicity);
  CHECK_FALSE(s.output.svg);
  CHECK(s.suites.size() == 2);
}

TEST_CASE("spec errors") {
  CHECK_THROWS_AS(parse_run_spec("name = x\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/2\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\nflow.dt = fast\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\ncolour = red\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\nsuites = everything\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\nflow.n = 16\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\nshape = perturbed_circle\nshape.delta = 1.0\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\nshape = hexagon\n"), InvalidSpec);
  CHECK_THROWS_AS(parse_run_spec("schema = polyflow-run/1\nshape = ellipse\nshape.b = -1\n"), InvalidSpec);
}

TEST_CASE("generated shapes") {
  ShapeSpec s;
  s.kind = "circle";
  const auto c = generate_shape(s, 256);
  CHECK(c.size() == 256);
  CHECK(std::hypot(c.x()[17], c.y()[17]) == doctest::Approx(1.0));
  s.kind = "double_circle";
  CHECK(geometry::derive_geometry(generate_shape(s, 256), 2).omega == 2);
  s.kind = "perturbed_circle";
  s.delta = 0.1;
  s.k = 3;
  s.phase = 0.0;
  const auto p = generate_shape(s, 64);
  CHECK(p.x()[0] == doctest::Approx(1.1));
}

TEST_CASE("execute writes the artifacts and passes on a circle") {
  const auto root = scratch("exec");
  auto spec = circle_spec(1.0);
  spec.output.snapshot_every = 10;
  const auto rep = execute(spec, root);
  CHECK(rep.exit_code == kPass);
  CHECK(fs::exists(rep.dir / "timeseries.csv"));
  CHECK(fs::exists(rep.dir / "summary.json"));
  CHECK(fs::exists(rep.dir / "snapshots" / "curve_0.000000e+00.svg"));
  CHECK(fs::exists(rep.dir / "snapshots" / "curve_0.000000e+00.csv"));
  const auto csv = slurp(rep.dir / "timeseries.csv");
  CHECK(csv.rfind("t,L,A,I,omega,kappa_bar,K_osc,min_kappa,D_p,norm_0,", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(rep.dir / "summary.json"));
  CHECK(j["schema"] == kSchema);
  CHECK(j["exit_code"] == 0);
  for (const auto& v : j["verdicts"]) {
    CHECK(v.contains("anchor"));
    CHECK(v.contains("measured"));
    CHECK(v.contains("bound"));
    CHECK(v.contains("tolerance"));
  }
  // Bit-identical reruns.
  const auto again = execute(spec, scratch("exec2"));
  CHECK(slurp(again.dir / "timeseries.csv") == csv);
}

TEST_CASE("execute: invalid specs and singularities have their exit codes") {
  const auto root = scratch("codes");
  auto bad = circle_spec(1.0);
  bad.flow.n = 16;
  CHECK(execute(bad, root).exit_code == kInvalidSpec);

  auto blow = parse_run_spec(R"(schema = polyflow-run/1
name = blow
shape = perturbed_circle
shape.delta = 0.1
shape.k = 4
flow.p = 2
flow.n = 64
flow.scheme = explicit_rk4
flow.dt = 1e-3
flow.max_steps = 500
output.formats = json
)");
  const auto rep = execute(blow, root);
  CHECK(rep.exit_code == kSingularity);
  CHECK(nlohmann::json::parse(slurp(rep.dir / "summary.json"))["stop_reason"] == "singularity_suspected");
}

TEST_CASE("failing suites are named") {
  // Sparse recording breaks the centered difference of L.
  auto spec = parse_run_spec(R"(schema = polyflow-run/1
name = sparse
shape = perturbed_circle
shape.delta = 0.05
shape.k = 3
flow.n = 64
flow.dt = 1e-3
flow.record_every = 50
flow.max_steps = 1000
suites = rate_identity
)");
  const auto rep = execute(spec, scratch("fail"));
  CHECK(rep.exit_code == kSuiteFailure);
  REQUIRE(rep.failing_suites.size() == 1);
  CHECK(rep.failing_suites[0] == "rate_identity");
}

TEST_CASE("waiting-time summary carries both values") {
  auto spec = parse_run_spec(R"(schema = polyflow-run/1
name = wait
shape = perturbed_circle
shape.delta = 0.016
shape.k = 8
flow.adaptive = true
flow.dt = 1e-9
flow.kosc_stop = 1e-6
output.formats = json
suites = waiting_time
)");
  const auto rep = execute(spec, scratch("wait"));
  CHECK(rep.exit_code == kPass);
  const auto j = nlohmann::json::parse(slurp(rep.dir / "summary.json"));
  CHECK(j["measured_waiting_time"].get<double>() > 0);
  CHECK(j["measured_waiting_time"].get<double>() <= j["prop_bound"].get<double>());
}

TEST_CASE("sweep: order preserved, aggregate written, empty is fine") {
  const auto root = scratch("sweep");
  const auto reps = sweep({circle_spec(0.5), circle_spec(1.0), circle_spec(3.0)}, 2, root);
  REQUIRE(reps.size() == 3);
  for (const auto& r : reps) CHECK(r.exit_code == kPass);
  CHECK(reps[2].name == circle_spec(3.0).name);
  const auto j = nlohmann::json::parse(slurp(root / "sweep.json"));
  CHECK(j["runs"].size() == 3);
  const auto empty_root = scratch("sweep-empty");
  CHECK(sweep({}, 4, empty_root).empty());
  CHECK(nlohmann::json::parse(slurp(empty_root / "sweep.json"))["runs"].empty());
}

TEST_CASE("spec directories load sorted") {
  const auto dir = scratch("dir");
  std::ofstream(dir / "b.spec") << "schema = polyflow-run/1\nname = b\n";
  std::ofstream(dir / "a.spec") << "schema = polyflow-run/1\nname = a\n";
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto specs = load_spec_dir(dir);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "a");
  CHECK_THROWS_AS(load_spec_dir(dir / "missing"), InvalidSpec);
}
