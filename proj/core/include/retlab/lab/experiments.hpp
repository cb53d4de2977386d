#pragma once

#include <functional>
#include <string>
#include <vector>

#include "retlab/lab/config.hpp"
#include "retlab/lab/run_record.hpp"

namespace retlab::lab {

struct RunResult {
  RunRecord record;
  std::vector<Table> tables;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Executes the preset for cfg.theorem. Throws ConfigInvalid, PrecisionAbort.
RunResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

/// Writes record.json and <table>.csv files under `dir` (created if needed).
void write_run(const RunResult& result, const std::string& dir);

}  // namespace retlab::lab
