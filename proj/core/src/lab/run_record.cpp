#include "retlab/lab/run_record.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>

#include "retlab/exact.hpp"

#ifndef RETLAB_VERSION
#define RETLAB_VERSION "0.0.0"
#endif

namespace retlab::lab {

using nlohmann::json;

bool RunRecord::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Doubles go through shortest round-trip text so records diff cleanly.
json number(double v) { return json::parse(format_double(v)); }

}  // namespace

std::string Table::to_csv() const {
  if (!preformatted.empty()) return preformatted;
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_field(header[i]);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string code_version() { return RETLAB_VERSION; }

std::string record_to_json(const RunRecord& r) {
  json j;
  j["id"] = r.id;
  j["theorem"] = r.theorem;
  j["config_hash"] = r.config_hash;
  j["config"] = json::parse(r.config_json.empty() ? "{}" : r.config_json);
  j["version"] = r.version;
  j["wall_seconds"] = number(r.wall_seconds);
  j["undecided"] = r.undecided;
  json metrics = json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
  j["metrics"] = metrics;
  json trials = json::array();
  for (const auto& t : r.trials) {
    json tj;
    tj["seed"] = t.seed;
    json vals = json::object();
    for (const auto& [k, v] : t.values) vals[k] = number(v);
    tj["values"] = vals;
    trials.push_back(tj);
  }
  j["trials"] = trials;
  json asserts = json::array();
  for (const auto& a : r.assertions) {
    asserts.push_back({{"name", a.name},
                       {"passed", a.passed},
                       {"value", number(a.value)},
                       {"threshold", number(a.threshold)},
                       {"detail", a.detail}});
  }
  j["assertions"] = asserts;
  j["passed"] = r.passed();
  return j.dump(2) + "\n";
}

RunRecord record_from_json(std::string_view text) {
  const json j = json::parse(text);
  RunRecord r;
  r.id = j.at("id").get<std::string>();
  r.theorem = j.at("theorem").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.config_json = j.at("config").dump();
  r.version = j.at("version").get<std::string>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.undecided = j.at("undecided").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("metrics").items()) r.metrics[k] = v.get<double>();
  for (const auto& tj : j.at("trials")) {
    TrialOutput t;
    t.seed = tj.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : tj.at("values").items()) t.values[k] = v.get<double>();
    r.trials.push_back(std::move(t));
  }
  for (const auto& aj : j.at("assertions")) {
    Assertion a;
    a.name = aj.at("name").get<std::string>();
    a.passed = aj.at("passed").get<bool>();
    a.value = aj.at("value").get<double>();
    a.threshold = aj.at("threshold").get<double>();
    a.detail = aj.at("detail").get<std::string>();
    r.assertions.push_back(std::move(a));
  }
  return r;
}

}  // namespace retlab::lab
