#include "retlab/lab/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "retlab/exact.hpp"

namespace retlab::lab {

using nlohmann::json;

Report build_report(std::vector<RunRecord> records) {
  Report rep;
  std::sort(records.begin(), records.end(), [](const RunRecord& x, const RunRecord& y) {
    return std::tie(x.theorem, x.config_hash, x.id) < std::tie(y.theorem, y.config_hash, y.id);
  });
  std::set<std::string> versions;
  for (const auto& r : records) versions.insert(r.version);
  if (versions.size() > 1) {
    rep.version_conflict = true;
    std::string list;
    for (const auto& v : versions) list += (list.empty() ? "" : ", ") + v;
    rep.warning = "records come from different code versions: " + list;
  }

  rep.summary.name = "summary";
  rep.summary.header = {"theorem", "experiment", "config_hash", "params", "key", "seed", "value"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : records) {
    json cfg = json::parse(r.config_json.empty() ? "{}" : r.config_json);
    json params = json::object();
    for (const char* k : {"a", "b", "c", "r", "N"}) {
      if (cfg.contains(k)) params[k] = cfg[k];
    }
    const std::string p = params.dump();
    for (const auto& [k, v] : r.metrics) {
      rows.push_back({r.theorem, r.id, r.config_hash, p, k, "", format_double(v)});
    }
    for (const auto& t : r.trials) {
      for (const auto& [k, v] : t.values) {
        rows.push_back({r.theorem, r.id, r.config_hash, p, k, std::to_string(t.seed), format_double(v)});
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
    return std::tie(x[0], x[3], x[4], x[1], x[5]) < std::tie(y[0], y[3], y[4], y[1], y[5]);
  });
  rep.summary.rows = std::move(rows);
  rep.records = std::move(records);
  return rep;
}

Report report_dirs(const std::vector<std::string>& dirs) {
  std::vector<RunRecord> records;
  for (const auto& d : dirs) {
    std::ifstream in(d + "/record.json");
    if (!in) throw std::runtime_error("no record.json in '" + d + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    records.push_back(record_from_json(ss.str()));
  }
  return build_report(std::move(records));
}

std::string report_to_json(const Report& r) {
  json j;
  j["version_conflict"] = r.version_conflict;
  j["warning"] = r.warning;
  json recs = json::array();
  for (const auto& rec : r.records) recs.push_back(json::parse(record_to_json(rec)));
  j["records"] = recs;
  return j.dump(2) + "\n";
}

}  // namespace retlab::lab
