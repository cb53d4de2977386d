#pragma once

// Experiment configuration files (JSON). Format: docs/config.md.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retlab/exact.hpp"

namespace retlab::lab {

inline constexpr const char* kTheoremTags[] = {
    "A",   "B",   "C",     "D",   "lemma-prop1",   "lemma-prop2", "lln",
    "concentration", "vdc", "cov-decay", "sup-bracket", "interaction"};

struct ExperimentConfig {
  std::string id;
  std::string theorem;
  std::optional<Rational> a;
  std::optional<Rational> b;
  std::optional<Rational> c;
  unsigned base = 2;
  Rational gamma = Rational(6, 5);
  std::uint64_t n_max = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t x_panel = 1;
  std::optional<double> tol;
  unsigned workers = 1;
  std::string out_dir;
  /// Preset-specific block ("params") and system block, as JSON text.
  std::string params_json = "{}";
  std::string system_json = "{}";

  /// Canonical JSON (sorted keys); hashed into the run record.
  std::string canonical_json() const;
};

/// Parses and validates; throws ConfigInvalid naming the violated hypothesis.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Re-checks parameter ranges against the hypotheses of the theorem tag.
void validate(const ExperimentConfig& cfg);

/// Replaces the seed list by derive_seed(master, i), keeping its length.
void reseed(ExperimentConfig& cfg, std::uint64_t master);

}  // namespace retlab::lab
