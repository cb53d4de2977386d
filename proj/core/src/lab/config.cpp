#include "retlab/lab/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "retlab/errors.hpp"
#include "retlab/seeding.hpp"

namespace retlab::lab {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw ConfigInvalid(msg); }

Rational rational_field(const json& j, const char* key) {
  const json& v = j.at(key);
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number()) return parse_rational(v.dump());
  } catch (const std::invalid_argument& e) {
    invalid(std::string("field '") + key + "': " + e.what());
  }
  invalid(std::string("field '") + key + "' must be a number or a rational string");
}

std::optional<Rational> optional_rational(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return rational_field(j, key);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(std::string("field '") + key + "' has the wrong type");
  }
}

bool seeded_theorem(const std::string& t) {
  return t == "A" || t == "B" || t == "C" || t == "D" || t == "lemma-prop2" || t == "lln" ||
         t == "interaction";
}

void require_a(const ExperimentConfig& cfg) {
  if (!cfg.a) invalid("theorem " + cfg.theorem + " needs the target exponent a");
  if (!(*cfg.a > 0 && *cfg.a < 1)) invalid("hypothesis a in (0, 1) violated (a = " + to_fraction_string(*cfg.a) + ")");
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  const auto& t = cfg.theorem;
  if (std::find(std::begin(kTheoremTags), std::end(kTheoremTags), t) == std::end(kTheoremTags)) {
    invalid("unknown theorem tag '" + t + "'");
  }
  if (cfg.id.empty()) invalid("experiment id must not be empty");
  if (cfg.base < 2 || cfg.base > 256) invalid("base r must lie in [2, 256]");
  if (cfg.gamma <= 1) invalid("lacunary ratio gamma must exceed 1");
  if (cfg.workers == 0) invalid("workers must be >= 1");
  if (cfg.tol && !(*cfg.tol > 0.0)) invalid("tolerance must be positive");
  if (seeded_theorem(t) && cfg.seeds.empty()) invalid("seed list is empty");
  if (seeded_theorem(t) && cfg.n_max == 0) invalid("N must be >= 1");

  if (t == "A" || t == "lln" || t == "lemma-prop1" || t == "lemma-prop2" || t == "concentration") {
    require_a(cfg);
  } else if (t == "B") {
    require_a(cfg);
    if (!(*cfg.a < Rational(1, 2))) invalid("Theorem B hypothesis a < 1/2 violated");
  } else if (t == "C") {
    require_a(cfg);
    if (!(*cfg.a < Rational(1, 14))) invalid("Theorem C hypothesis a < 1/14 violated");
    if (!cfg.c || !(*cfg.c > 1)) invalid("Theorem C hypothesis c > 1 violated");
  } else if (t == "D") {
    require_a(cfg);
    if (!(*cfg.a < Rational(1, 2))) invalid("Theorem D hypothesis a < 1/2 violated");
    if (!cfg.b || !(*cfg.b > 0)) invalid("Theorem D needs b > 0");
    if (!(*cfg.b + 2 * *cfg.a < Rational(1, 2))) invalid("Theorem D hypothesis b + 2a < 1/2 violated");
  } else if (t == "interaction") {
    require_a(cfg);
    if (!cfg.b || !(*cfg.b > 0 && *cfg.b < 1)) invalid("interaction sums need b in (0, 1)");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");
  static const char* kKnown[] = {"id", "theorem", "a", "b", "c", "r", "gamma", "N", "seed", "seeds",
                                 "seed_count", "x_panel", "tol", "workers", "out", "params", "system"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      invalid("unknown config field '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  cfg.id = get_or<std::string>(j, "id", "");
  cfg.theorem = get_or<std::string>(j, "theorem", "");
  cfg.a = optional_rational(j, "a");
  cfg.b = optional_rational(j, "b");
  cfg.c = optional_rational(j, "c");
  cfg.base = get_or<unsigned>(j, "r", 2);
  if (j.contains("gamma")) cfg.gamma = rational_field(j, "gamma");
  cfg.n_max = get_or<std::uint64_t>(j, "N", 0);
  cfg.master_seed = get_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("seeds")) {
    cfg.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
  } else {
    const auto count = get_or<std::uint64_t>(j, "seed_count", 0);
    for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(derive_seed(cfg.master_seed, i));
  }
  cfg.x_panel = get_or<std::uint64_t>(j, "x_panel", 1);
  if (j.contains("tol")) cfg.tol = get_or<double>(j, "tol", 0.0);
  cfg.workers = get_or<unsigned>(j, "workers", 1);
  cfg.out_dir = get_or<std::string>(j, "out", "");
  if (j.contains("params")) {
    if (!j["params"].is_object()) invalid("'params' must be an object");
    cfg.params_json = j["params"].dump();
  }
  if (j.contains("system")) {
    if (!j["system"].is_object()) invalid("'system' must be an object");
    cfg.system_json = j["system"].dump();
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void reseed(ExperimentConfig& cfg, std::uint64_t master) {
  cfg.master_seed = master;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = derive_seed(master, i);
}

std::string ExperimentConfig::canonical_json() const {
  json j;  // nlohmann objects keep keys sorted
  j["id"] = id;
  j["theorem"] = theorem;
  if (a) j["a"] = to_fraction_string(*a);
  if (b) j["b"] = to_fraction_string(*b);
  if (c) j["c"] = to_fraction_string(*c);
  j["r"] = base;
  j["gamma"] = to_fraction_string(gamma);
  j["N"] = n_max;
  j["seed"] = master_seed;
  j["seeds"] = seeds;
  j["x_panel"] = x_panel;
  if (tol) j["tol"] = *tol;
  j["params"] = json::parse(params_json);
  j["system"] = json::parse(system_json);
  return j.dump();
}

}  // namespace retlab::lab
