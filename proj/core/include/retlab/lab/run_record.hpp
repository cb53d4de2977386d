#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace retlab::lab {

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

/// Outputs of one seed (or one trial / instance).
struct TrialOutput {
  std::uint64_t seed = 0;
  std::map<std::string, double> values;
};

struct RunRecord {
  std::string id;
  std::string theorem;
  std::string config_hash;   // FNV-1a 64 of the canonical config, hex
  std::string config_json;
  std::string version;
  double wall_seconds = 0.0;
  std::uint64_t undecided = 0;
  std::map<std::string, double> metrics;
  std::vector<TrialOutput> trials;
  std::vector<Assertion> assertions;

  bool passed() const;
};

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string preformatted;  // used verbatim when non-empty

  std::string to_csv() const;
};

std::string fnv1a_hex(std::string_view text);
std::string code_version();

std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(std::string_view text);

}  // namespace retlab::lab
