// retlab: run experiment presets and merge their records.
//
//   retlab run <config.json> [--seed S] [--workers W] [--out DIR] [--tol T]
//   retlab report <run-dir>... [--out DIR]
//
// Exit status: 0 all assertions passed, 1 some assertion failed,
// 2 invalid config or usage, 3 precision abort or other runtime error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "retlab/errors.hpp"
#include "retlab/lab/config.hpp"
#include "retlab/lab/experiments.hpp"
#include "retlab/lab/report.hpp"

namespace fs = std::filesystem;
using namespace retlab;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

std::string default_root() {
  const char* env = std::getenv("RETLAB_OUT");
  return env && *env ? env : "runs";
}

int do_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<unsigned> workers,
           const std::string& out, std::optional<double> tol, bool quiet) {
  lab::ExperimentConfig cfg = lab::load_config(path);
  if (seed) {
    cfg.master_seed = *seed;
    if (!cfg.seeds.empty()) lab::reseed(cfg, *seed);
  }
  if (workers) cfg.workers = std::max(1u, *workers);
  if (tol) cfg.tol = *tol;
  const std::string root = !out.empty() ? out : !cfg.out_dir.empty() ? cfg.out_dir : default_root();
  const fs::path dir = fs::path(root) / cfg.id;

  lab::ProgressFn progress;
  if (!quiet) progress = [&](const std::string& msg) { std::cerr << "[" << cfg.id << "] " << msg << "\n"; };
  const lab::RunResult result = lab::run_experiment(cfg, progress);
  lab::write_run(result, dir.string());

  const auto& rec = result.record;
  std::cout << rec.id << " (" << rec.theorem << ") " << rec.config_hash << " " << rec.wall_seconds << "s\n";
  for (const auto& a : rec.assertions) {
    std::cout << "  " << (a.passed ? "PASS " : "FAIL ") << a.name << ": " << a.value << " vs " << a.threshold;
    if (!a.detail.empty()) std::cout << " (" << a.detail << ")";
    std::cout << "\n";
  }
  if (rec.undecided > 0) std::cout << "  undecided memberships: " << rec.undecided << "\n";
  std::cout << "  written to " << dir.string() << "\n";
  return rec.passed() ? kPass : kFail;
}

int do_report(const std::vector<std::string>& dirs, const std::string& out) {
  const lab::Report rep = lab::report_dirs(dirs);
  if (!rep.warning.empty()) std::cerr << "warning: " << rep.warning << "\n";
  if (out.empty()) {
    std::cout << rep.summary.to_csv();
    return kPass;
  }
  fs::create_directories(out);
  std::ofstream(fs::path(out) / "report.csv", std::ios::binary) << rep.summary.to_csv();
  std::ofstream(fs::path(out) / "report.json", std::ios::binary) << report_to_json(rep);
  std::cout << "report of " << rep.records.size() << " records written to " << out << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Return-time ergodic average experiments"};
  app.set_version_flag("--version", lab::code_version());
  app.require_subcommand(1);

  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<double> tol;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Master seed; per-seed values are re-derived from it");
  run->add_option("--workers", workers, "Worker threads");
  run->add_option("--out", out, "Output root (default $RETLAB_OUT or ./runs)");
  run->add_option("--tol", tol, "Override the preset tolerance");
  run->add_flag("-q,--quiet", quiet, "No progress messages");

  std::vector<std::string> dirs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Merge run records into one summary table");
  report->add_option("dirs", dirs, "Run directories")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "Write report.csv and report.json here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*run) return do_run(config_path, seed, workers, out, tol, quiet);
    return do_report(dirs, report_out);
  } catch (const ConfigInvalid& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kUsage;
  } catch (const PrecisionAbort& e) {
    std::cerr << "precision abort: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}
