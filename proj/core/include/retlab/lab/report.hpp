#pragma once

#include <string>
#include <vector>

#include "retlab/lab/run_record.hpp"

namespace retlab::lab {

struct Report {
  std::vector<RunRecord> records;  // sorted by (theorem, config hash, id)
  Table summary;                   // one row per (theorem, params, key, seed)
  bool version_conflict = false;
  std::string warning;
};

Report build_report(std::vector<RunRecord> records);
/// Loads <dir>/record.json for each directory.
Report report_dirs(const std::vector<std::string>& dirs);
std::string report_to_json(const Report& r);

}  // namespace retlab::lab
