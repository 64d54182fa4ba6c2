#pragma once

// Run specifications, initial shapes, and the on-disk artifacts of a run.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyflow/diagnostics.hpp"
#include "polyflow/flow.hpp"
#include "polyflow/geometry.hpp"
#include "polyflow/oracles.hpp"

namespace polyflow::runner {

inline constexpr const char* kSchema = "polyflow-run/1";

struct Mode {
  double delta = 0.0;
  int k = 2;
  double phase = 0.0;
};

/// circle{r}, ellipse{a, b}, perturbed_circle{r, delta, k, phase},
/// multi_mode{r, modes}, double_circle{r}.
struct ShapeSpec {
  std::string kind = "circle";
  double r = 1.0;
  double a = 2.0;
  double b = 1.0;
  double delta = 0.0;
  int k = 2;
  double phase = 0.0;
  std::vector<Mode> modes;
};

/// Closed form of the shape. Throws InvalidSpec for unknown kinds or
/// parameters that do not give a regular curve (a polar radius that
/// reaches zero).
oracles::AnalyticShape analytic_shape(const ShapeSpec& spec);

geometry::ClosedCurve generate_shape(const ShapeSpec& spec, std::size_t n);

struct OutputSpec {
  std::string dir;  // relative to the output root unless absolute
  bool csv = true;
  bool json = true;
  bool svg = true;
  /// Snapshot every this many records (the final curve is always written).
  std::size_t snapshot_every = 0;
};

struct RunSpec {
  std::string name = "run";
  ShapeSpec shape;
  flow::FlowConfig flow;
  OutputSpec output;
  std::vector<std::string> suites{"all"};
};

/// Parses the flat `key = value` format ('#' starts a comment). The first
/// key must be `schema = polyflow-run/1`. Throws InvalidSpec.
RunSpec parse_run_spec(const std::string& text);
RunSpec load_run_spec(const std::filesystem::path& path);

/// Suites and the verdict names they gate.
const std::map<std::string, std::vector<std::string>>& suite_table();

enum ExitCode : int { kPass = 0, kSuiteFailure = 2, kInvalidSpec = 3, kSingularity = 4 };

struct ExecuteReport {
  std::string name;
  int exit_code = kPass;
  std::vector<std::string> failing_suites;
  std::string message;
  std::filesystem::path dir;
  std::optional<diagnostics::RunResult> result;
};

/// Output root: $POLYFLOW_OUT when set, otherwise `fallback`.
std::filesystem::path output_root(const std::filesystem::path& fallback);

/// Runs one spec and writes timeseries.csv, summary.json and snapshots under
/// root / spec.output.dir (or root / spec.name).
ExecuteReport execute(const RunSpec& spec, const std::filesystem::path& root);

/// Executes independent specs with at most `parallelism` concurrent runs and
/// writes sweep.json under root. Reports keep the input order.
std::vector<ExecuteReport> sweep(const std::vector<RunSpec>& specs, std::size_t parallelism,
                                 const std::filesystem::path& root);

/// Every *.spec file in dir, sorted by file name.
std::vector<RunSpec> load_spec_dir(const std::filesystem::path& dir);

}  // namespace polyflow::runner
