#include "polyflow/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "polyflow/errors.hpp"
#include "polyflow/spectral.hpp"

namespace polyflow::runner {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw InvalidSpec("'" + key + "': expected a number, got '" + v + "'");
}

long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long d = std::stol(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw InvalidSpec("'" + key + "': expected an integer, got '" + v + "'");
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long d = to_integer(key, v);
  if (d < 0) throw InvalidSpec("'" + key + "' must be non-negative");
  return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidSpec("'" + key + "': expected true or false, got '" + v + "'");
}

// "delta:k:phase, delta:k:phase, ..." with the phase optional.
std::vector<Mode> to_modes(const std::string& key, const std::string& v) {
  std::vector<Mode> modes;
  for (const auto& item : split(v, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() < 2 || parts.size() > 3) {
      throw InvalidSpec("'" + key + "': expected delta:k[:phase], got '" + item + "'");
    }
    Mode m;
    m.delta = to_double(key, parts[0]);
    m.k = static_cast<int>(to_integer(key, parts[1]));
    if (parts.size() == 3) m.phase = to_double(key, parts[2]);
    modes.push_back(m);
  }
  return modes;
}

void require_positive(const std::string& what, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidSpec(what + " must be positive, got " + std::to_string(v));
  }
}

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", t);
  return buf;
}

void write_snapshot(const fs::path& dir, const geometry::ClosedCurve& curve, double t,
                    double limit_radius, const OutputSpec& out) {
  const auto stem = dir / ("curve_" + format_time(t));
  if (out.csv) {
    std::FILE* f = std::fopen((stem.string() + ".csv").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + stem.string() + ".csv");
    std::fprintf(f, "x,y\n");
    for (std::size_t j = 0; j < curve.size(); ++j) {
      std::fprintf(f, "%.17g,%.17g\n", curve.x()[j], curve.y()[j]);
    }
    std::fclose(f);
  }
  if (out.svg) {
    const double cx = spectral::mean(curve.x()), cy = spectral::mean(curve.y());
    double extent = limit_radius;
    for (std::size_t j = 0; j < curve.size(); ++j) {
      extent = std::max({extent, std::abs(curve.x()[j] - cx), std::abs(curve.y()[j] - cy)});
    }
    extent *= 1.1;
    std::FILE* f = std::fopen((stem.string() + ".svg").c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + stem.string() + ".svg");
    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.9g %.9g %.9g %.9g\" "
                 "width=\"512\" height=\"512\">\n",
                 cx - extent, -cy - extent, 2 * extent, 2 * extent);
    std::fprintf(f, "<title>t = %s</title>\n", format_time(t).c_str());
    std::fprintf(f,
                 "<circle cx=\"%.9g\" cy=\"%.9g\" r=\"%.9g\" fill=\"none\" stroke=\"#c33\" "
                 "stroke-width=\"%.6g\" stroke-dasharray=\"%.6g\"/>\n",
                 cx, -cy, limit_radius, extent / 400, extent / 50);
    std::fprintf(f, "<polygon fill=\"none\" stroke=\"#124\" stroke-width=\"%.6g\" points=\"",
                 extent / 250);
    for (std::size_t j = 0; j < curve.size(); ++j) {
      std::fprintf(f, "%.9g,%.9g ", curve.x()[j], -curve.y()[j]);
    }
    std::fprintf(f, "\"/>\n</svg>\n");
    std::fclose(f);
  }
}

void write_timeseries(const fs::path& path, const std::vector<diagnostics::DiagnosticsRecord>& recs) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  const std::size_t norms = recs.empty() ? 0 : recs.front().deriv_norms.size();
  std::fprintf(f, "t,L,A,I,omega,kappa_bar,K_osc,min_kappa,D_p");
  for (std::size_t m = 0; m < norms; ++m) std::fprintf(f, ",norm_%zu", m);
  std::fprintf(f, ",kosc_residual\n");
  for (const auto& r : recs) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%.17g,%.17g", r.t, r.length, r.area,
                 r.iso_ratio, r.omega, r.kappa_bar, r.k_osc, r.min_kappa, r.dissipation);
    for (double v : r.deriv_norms) std::fprintf(f, ",%.17g", v);
    std::fprintf(f, ",%.17g\n", r.kosc_residual);
  }
  std::fclose(f);
}

json record_json(const diagnostics::DiagnosticsRecord& r) {
  return {{"t", r.t},         {"L", r.length},   {"A", r.area},
          {"I", r.iso_ratio}, {"omega", r.omega}, {"kappa_bar", r.kappa_bar},
          {"K_osc", r.k_osc}, {"min_kappa", r.min_kappa}, {"D_p", r.dissipation}};
}

std::string suite_of(const std::string& verdict) {
  for (const auto& [suite, names] : suite_table()) {
    if (std::find(names.begin(), names.end(), verdict) != names.end()) return suite;
  }
  return "other";
}

}  // namespace

// ---------------------------------------------------------------------------

oracles::AnalyticShape analytic_shape(const ShapeSpec& s) {
  using oracles::AnalyticShape;
  if (s.kind == "circle") {
    require_positive("circle radius", s.r);
    return AnalyticShape::circle(s.r);
  }
  if (s.kind == "double_circle") {
    require_positive("circle radius", s.r);
    return AnalyticShape::multiple_circle(s.r, 2);
  }
  if (s.kind == "ellipse") {
    require_positive("ellipse semi-axis a", s.a);
    require_positive("ellipse semi-axis b", s.b);
    return AnalyticShape::ellipse(s.a, s.b);
  }
  if (s.kind == "perturbed_circle" || s.kind == "multi_mode") {
    require_positive("base radius", s.r);
    std::vector<Mode> modes = s.modes;
    if (s.kind == "perturbed_circle") modes = {Mode{s.delta, s.k, s.phase}};
    double spread = 0.0;
    for (const auto& m : modes) {
      if (m.k < 0) throw InvalidSpec("mode numbers must be non-negative");
      spread += std::abs(m.delta);
    }
    // A polar curve is regular exactly when its radius stays positive.
    if (spread >= s.r) {
      throw InvalidSpec("polar radius reaches zero: sum |delta| = " + std::to_string(spread) +
                        " >= r = " + std::to_string(s.r));
    }
    const double r0 = s.r;
    return AnalyticShape::polar([r0, modes](double t) {
      std::array<double, 4> r{r0, 0.0, 0.0, 0.0};
      for (const auto& m : modes) {
        const double k = m.k;
        const double c = std::cos(k * t + m.phase), sn = std::sin(k * t + m.phase);
        r[0] += m.delta * c;
        r[1] -= m.delta * k * sn;
        r[2] -= m.delta * k * k * c;
        r[3] += m.delta * k * k * k * sn;
      }
      return r;
    });
  }
  throw InvalidSpec("unknown shape '" + s.kind +
                    "' (circle, ellipse, perturbed_circle, multi_mode, double_circle)");
}

geometry::ClosedCurve generate_shape(const ShapeSpec& spec, std::size_t n) {
  return analytic_shape(spec).sample(n);
}

RunSpec parse_run_spec(const std::string& text) {
  RunSpec spec;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool schema_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidSpec("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (!schema_seen) {
      if (key != "schema" || v != kSchema) {
        throw InvalidSpec(std::string("first entry must be 'schema = ") + kSchema + "'");
      }
      schema_seen = true;
      continue;
    }
    auto& f = spec.flow;
    auto& s = spec.shape;
    if (key == "name") spec.name = v;
    else if (key == "shape") s.kind = v;
    else if (key == "shape.r") s.r = to_double(key, v);
    else if (key == "shape.a") s.a = to_double(key, v);
    else if (key == "shape.b") s.b = to_double(key, v);
    else if (key == "shape.delta") s.delta = to_double(key, v);
    else if (key == "shape.k") s.k = static_cast<int>(to_integer(key, v));
    else if (key == "shape.phase") s.phase = to_double(key, v);
    else if (key == "shape.modes") s.modes = to_modes(key, v);
    else if (key == "flow.p") f.p = static_cast<int>(to_integer(key, v));
    else if (key == "flow.n") f.n = to_count(key, v);
    else if (key == "flow.scheme") f.scheme = flow::parse_scheme(v);
    else if (key == "flow.dt") f.dt = to_double(key, v);
    else if (key == "flow.adaptive") f.adaptive = to_bool(key, v);
    else if (key == "flow.safety") f.safety = to_double(key, v);
    else if (key == "flow.eta") f.eta = to_double(key, v);
    else if (key == "flow.t_end") f.t_end = to_double(key, v);
    else if (key == "flow.kosc_stop") f.kosc_stop = to_double(key, v);
    else if (key == "flow.max_steps") f.max_steps = to_count(key, v);
    else if (key == "flow.startup_ramp") f.startup_ramp = static_cast<int>(to_integer(key, v));
    else if (key == "flow.resample_every") f.resample_every = to_count(key, v);
    else if (key == "flow.record_every") f.record_every = to_count(key, v);
    else if (key == "flow.dealias") f.dealias = to_bool(key, v);
    else if (key == "flow.renormalize_area") f.renormalize_area = to_bool(key, v);
    else if (key == "flow.m_max") f.m_max = static_cast<int>(to_integer(key, v));
    else if (key == "track.multiplicity") f.record.multiplicity = to_bool(key, v);
    else if (key == "track.interpolation") f.record.interpolation = to_bool(key, v);
    else if (key == "output.dir") spec.output.dir = v;
    else if (key == "output.snapshot_every") spec.output.snapshot_every = to_count(key, v);
    else if (key == "output.formats") {
      spec.output.csv = spec.output.json = spec.output.svg = false;
      for (const auto& fmt : split(v, ',')) {
        if (fmt == "csv") spec.output.csv = true;
        else if (fmt == "json") spec.output.json = true;
        else if (fmt == "svg") spec.output.svg = true;
        else throw InvalidSpec("unknown output format '" + fmt + "' (csv, json, svg)");
      }
    } else if (key == "suites") {
      spec.suites = split(v, ',');
      for (const auto& suite : spec.suites) {
        if (suite != "all" && !suite_table().count(suite)) {
          throw InvalidSpec("unknown suite '" + suite + "'");
        }
      }
    } else {
      throw InvalidSpec("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!schema_seen) throw InvalidSpec(std::string("missing 'schema = ") + kSchema + "'");
  spec.flow.validate();
  analytic_shape(spec.shape);
  return spec;
}

RunSpec load_run_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read spec file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto spec = parse_run_spec(ss.str());
  return spec;
}

const std::map<std::string, std::vector<std::string>>& suite_table() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"conservation",
       {"area_conservation", "length_nonincreasing", "isoperimetric_nonincreasing",
        "winding_constant", "kappa_bar_nondecreasing"}},
      {"rate_identity", {"length_rate_identity"}},
      {"kosc_identity", {"kosc_identity"}},
      {"kosc_bound", {"kosc_a_priori_bound"}},
      {"waiting_time", {"waiting_time"}},
      {"decay", {"decay_rate_oscillation_l2", "decay_rate_dissipation"}},
      {"inequalities", {"sup_deviation", "iterated_interpolation"}},
      {"embeddedness", {"embeddedness"}},
  };
  return table;
}

fs::path output_root(const fs::path& fallback) {
  if (const char* env = std::getenv("POLYFLOW_OUT"); env && *env) return fs::path(env);
  return fallback;
}

ExecuteReport execute(const RunSpec& spec, const fs::path& root) {
  ExecuteReport report;
  report.name = spec.name;
  std::optional<geometry::ClosedCurve> initial;
  try {
    spec.flow.validate();
    initial = generate_shape(spec.shape, spec.flow.n);
  } catch (const Error& e) {
    report.exit_code = kInvalidSpec;
    report.message = e.what();
    return report;
  }

  const fs::path rel = spec.output.dir.empty() ? fs::path(spec.name) : fs::path(spec.output.dir);
  report.dir = rel.is_absolute() ? rel : root / rel;
  const auto snaps = report.dir / "snapshots";
  fs::create_directories(snaps);

  const bool want_snapshots = spec.output.svg || spec.output.csv;
  double limit_radius = 0.0;
  std::size_t index = 0;
  auto observer = [&](const flow::FlowState& s, const diagnostics::DiagnosticsRecord& r) {
    if (index == 0) limit_radius = std::sqrt(std::abs(r.area) / kPi);
    if (want_snapshots && (index == 0 || (spec.output.snapshot_every > 0 &&
                                          index % spec.output.snapshot_every == 0))) {
      write_snapshot(snaps, s.curve, s.t, limit_radius, spec.output);
    }
    ++index;
  };

  diagnostics::RunResult result;
  try {
    result = flow::run(*initial, spec.flow, observer);
  } catch (const Error& e) {
    // Failures before the first step: the initial curve itself is unusable.
    report.exit_code = kInvalidSpec;
    report.message = e.what();
    return report;
  }
  if (want_snapshots && result.final_curve && !result.records.empty()) {
    write_snapshot(snaps, *result.final_curve, result.records.back().t, limit_radius, spec.output);
  }
  if (spec.output.csv) write_timeseries(report.dir / "timeseries.csv", result.records);

  // Suite gating.
  std::vector<std::string> suites = spec.suites;
  if (std::find(suites.begin(), suites.end(), "all") != suites.end()) {
    suites.clear();
    for (const auto& [name, _] : suite_table()) suites.push_back(name);
  }
  json suite_json = json::object();
  for (const auto& suite : suites) {
    const auto& names = suite_table().at(suite);
    bool ok = true, any = false;
    for (const auto& v : result.verdicts) {
      if (std::find(names.begin(), names.end(), v.name) == names.end()) continue;
      any = true;
      ok = ok && v.passed && !v.inconclusive;
    }
    suite_json[suite] = any ? json(ok) : json("not applicable");
    if (!ok) report.failing_suites.push_back(suite);
  }

  if (result.stop_reason == diagnostics::StopReason::singularity) {
    report.exit_code = kSingularity;
    report.message = result.stop_detail;
  } else if (!report.failing_suites.empty()) {
    report.exit_code = kSuiteFailure;
    std::string m = "failing suites:";
    for (const auto& s : report.failing_suites) m += " " + s;
    report.message = m;
  }

  if (spec.output.json) {
    json j;
    j["schema"] = kSchema;
    j["name"] = spec.name;
    j["config"] = {{"shape", spec.shape.kind},
                   {"p", spec.flow.p},
                   {"n", spec.flow.n},
                   {"scheme", flow::to_string(spec.flow.scheme)},
                   {"dt", spec.flow.dt},
                   {"adaptive", spec.flow.adaptive},
                   {"startup_ramp", spec.flow.startup_ramp}};
    if (!result.records.empty()) {
      j["initial"] = record_json(result.records.front());
      j["final"] = record_json(result.records.back());
      j["limit_radius"] = limit_radius;
    }
    j["stop_reason"] = diagnostics::to_string(result.stop_reason);
    j["stop_detail"] = result.stop_detail;
    j["accepted_steps"] = result.accepted_steps;
    j["rejected_steps"] = result.rejected_steps;
    json fits = json::object();
    for (const auto& [name, fit] : result.fits) {
      fits[name] = {{"rate", fit.rate},
                    {"rms_residual", fit.rms_residual},
                    {"t_begin", fit.t_begin},
                    {"t_end", fit.t_end},
                    {"samples", fit.samples}};
    }
    j["fits"] = fits;
    json verdicts = json::array();
    for (const auto& v : result.verdicts) {
      verdicts.push_back({{"name", v.name},
                          {"suite", suite_of(v.name)},
                          {"anchor", v.anchor},
                          {"measured", v.measured},
                          {"bound", v.bound},
                          {"tolerance", v.tolerance},
                          {"passed", v.passed},
                          {"inconclusive", v.inconclusive},
                          {"detail", v.detail}});
      if (v.name == "waiting_time") {
        j["measured_waiting_time"] = v.measured;
        j["prop_bound"] = v.bound;
      }
    }
    j["verdicts"] = verdicts;
    j["suites"] = suite_json;
    j["exit_code"] = report.exit_code;
    std::ofstream(report.dir / "summary.json") << j.dump(2) << "\n";
  }
  report.result = std::move(result);
  return report;
}

std::vector<ExecuteReport> sweep(const std::vector<RunSpec>& specs, std::size_t parallelism,
                                 const fs::path& root) {
  std::vector<ExecuteReport> reports(specs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      reports[i] = execute(specs[i], root);
      reports[i].result.reset();  // keep the aggregate small
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(parallelism, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json agg = json::array();
  for (const auto& r : reports) {
    agg.push_back({{"name", r.name},
                   {"exit_code", r.exit_code},
                   {"failing_suites", r.failing_suites},
                   {"message", r.message},
                   {"dir", r.dir.string()}});
  }
  fs::create_directories(root);
  std::ofstream(root / "sweep.json") << json{{"runs", agg}}.dump(2) << "\n";
  return reports;
}

std::vector<RunSpec> load_spec_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidSpec("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".spec") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunSpec> specs;
  for (const auto& f : files) specs.push_back(load_run_spec(f));
  return specs;
}

}  // namespace polyflow::runner
