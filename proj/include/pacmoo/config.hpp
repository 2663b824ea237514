#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pacmoo/driver.hpp"

namespace pacmoo {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

struct Variant {
  std::string name;
  RunConfig run;  // seed is filled in per run
};

struct ExperimentConfig {
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "results";
  /// Write real elapsed_ms values instead of zeros (breaks byte-identical reruns).
  bool wallclock = false;
};

/// Parses a YAML experiment document. Unknown keys are rejected.
ExperimentConfig parse_experiment_config(const std::string& yaml_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// "N" means seeds 0..N-1; "a,b,c" is an explicit list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace pacmoo
