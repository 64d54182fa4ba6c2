// polyflow: run, sweep and verify the curvature-derivative flow.

#include <cstdio>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "polyflow/errors.hpp"
#include "polyflow/runner.hpp"
#include "polyflow/verification.hpp"

namespace fs = std::filesystem;
using namespace polyflow;

namespace {

struct Overrides {
  std::optional<std::size_t> n;
  std::optional<int> p;
  std::optional<double> dt;
  std::optional<std::string> scheme;
};

void apply(runner::RunSpec& spec, const Overrides& o) {
  if (o.n) spec.flow.n = *o.n;
  if (o.p) spec.flow.p = *o.p;
  if (o.dt) spec.flow.dt = *o.dt;
  if (o.scheme) spec.flow.scheme = flow::parse_scheme(*o.scheme);
  spec.flow.validate();
}

void print_report(const runner::ExecuteReport& r) {
  std::printf("%-28s exit=%d  %s\n", r.name.c_str(), r.exit_code, r.message.c_str());
  if (!r.result) return;
  for (const auto& v : r.result->verdicts) {
    std::printf("  %-30s %-6s measured=%-12.4g bound=%-12.4g %s\n", v.name.c_str(),
                v.inconclusive ? "INCONC" : (v.passed ? "ok" : "FAIL"), v.measured, v.bound,
                v.detail.c_str());
  }
  std::printf("  artifacts: %s\n", r.dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order curvature flow of closed plane curves"};
  app.require_subcommand(1);

  std::string out = "polyflow-out";
  Overrides over;
  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--n", over.n, "Grid size (overrides the spec file)");
    cmd->add_option("--p", over.p, "Flow order (overrides the spec file)");
    cmd->add_option("--dt", over.dt, "Time step (overrides the spec file)");
    cmd->add_option("--scheme", over.scheme, "explicit_rk4 | imex_euler | imex_bdf2");
    cmd->add_option("--out", out, "Output root ($POLYFLOW_OUT takes precedence)");
  };

  auto* run = app.add_subcommand("run", "Run one spec file");
  std::string spec_path;
  run->add_option("spec", spec_path, "Spec file")->required();
  add_overrides(run);

  auto* sweep = app.add_subcommand("sweep", "Run every *.spec in a directory");
  std::string spec_dir;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("dir", spec_dir, "Directory of spec files")->required();
  sweep->add_option("--jobs", jobs, "Concurrent runs");
  add_overrides(sweep);

  auto* verify = app.add_subcommand("verify", "Random checks of the periodic inequalities");
  std::uint64_t seed = 20240601;
  std::size_t trials = 1000;
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--trials", trials, "Random functions per period");

  auto* oracle = app.add_subcommand("oracle-check", "Pipeline against independent oracles");
  std::size_t oracle_n = 256;
  oracle->add_option("--n", oracle_n, "Grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : runner::kInvalidSpec;
  }

  try {
    if (*run) {
      auto spec = runner::load_run_spec(spec_path);
      apply(spec, over);
      const auto report = runner::execute(spec, runner::output_root(out));
      print_report(report);
      return report.exit_code;
    }
    if (*sweep) {
      auto specs = runner::load_spec_dir(spec_dir);
      for (auto& s : specs) apply(s, over);
      const auto root = runner::output_root(out);
      const auto reports = runner::sweep(specs, jobs, root);
      int worst = runner::kPass;
      for (const auto& r : reports) {
        print_report(r);
        worst = std::max(worst, r.exit_code);
      }
      std::printf("%zu runs, aggregate in %s\n", reports.size(),
                  (root / "sweep.json").string().c_str());
      return worst;
    }
    if (*verify) {
      bool ok = true;
      for (double period : {1.0, 6.283185307179586, 17.3}) {
        const auto s = verification::run_inequality_suite(period, trials, seed);
        std::printf(
            "period %-8.4g trials=%zu wirtinger_violations=%zu sup_violations=%zu "
            "false_equalities=%zu worst_ratio=%.12f worst_sup=%.6f equality_err=%.2e %s\n",
            period, s.trials, s.wirtinger_violations, s.sup_violations, s.false_equalities,
            s.worst_wirtinger_ratio, s.worst_sup_ratio, s.equality_error,
            s.passed() ? "PASS" : "FAIL");
        ok = ok && s.passed();
      }
      return ok ? runner::kPass : runner::kSuiteFailure;
    }
    if (*oracle) {
      bool ok = true;
      for (const auto& r : verification::oracle_battery(oracle_n)) {
        std::printf("%-4s %-30s %-30s pipeline=%-22.15g oracle=%-22.15g err=%.2e tol=%.1e\n",
                    r.passed ? "ok" : "FAIL", r.shape.c_str(), r.quantity.c_str(), r.pipeline,
                    r.oracle, r.error, r.tolerance);
        ok = ok && r.passed;
      }
      return ok ? runner::kPass : runner::kSuiteFailure;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return runner::kInvalidSpec;
  }
  return runner::kPass;
}
