#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaborstab/gabor.hpp"
#include "gaborstab/numerics.hpp"
#include "gaborstab/serialize.hpp"
#include "gaborstab/windows.hpp"

namespace gaborstab {

inline constexpr int kSchemaVersion = 1;

// Configuration that fails to parse or validate (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_points;
  std::optional<std::filesystem::path> output;
};

struct ExperimentConfig {
  Json raw;                            // config as read, echoed into the report
  std::filesystem::path base_dir;      // relative file paths resolve against this
  Json window_spec;
  Json jitter_spec;
  Window window = Window::rect();
  GaborLattice lattice;
  GridSpec grid;
  OverflowPolicy overflow = OverflowPolicy::reject;
  std::uint64_t seed = 0;
  std::vector<Json> tasks;
  std::optional<std::filesystem::path> output;
};

// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const Json& j, const std::filesystem::path& base_dir, const Overrides& o = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& o = {});

// The jitter pattern described by the config.
JitterPattern build_jitter(const ExperimentConfig& cfg);

struct RunOutcome {
  Json report;
  int exit_code = 0;  // 0 success, 1 task failure or unmet expectation
  std::string csv;    // sweep table, empty for plain runs
};

RunOutcome run_experiment(const ExperimentConfig& cfg, bool timing = false);

// Reruns every non-sweep task once per value of `param`
// (jitter_amplitude | a | b | p). An empty value list is a ConfigError.
RunOutcome run_sweep(const ExperimentConfig& cfg, const std::string& param, const std::vector<double>& values,
                     bool timing = false);

// "0, 1/4, 0.5" -> {0, 0.25, 0.5}; throws ConfigError.
std::vector<double> parse_value_list(const std::string& text);
double parse_value(const std::string& text);

}  // namespace gaborstab
