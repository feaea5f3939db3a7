#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gaborstab/error.hpp"
#include "gaborstab/runner.hpp"

namespace {

namespace gs = gaborstab;

constexpr int kExitConfig = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_points;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  bool timing = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "Experiment config (JSON)")->required();
  sub->add_option("--seed", c.seed, "Override the config seed");
  sub->add_option("--grid-points", c.grid_points, "Override grid.n_points");
  sub->add_option("--out", c.out, "Write the JSON report here instead of the config output / stdout");
  sub->add_option("--csv", c.csv, "Write the sweep CSV table here");
  sub->add_flag("--timing", c.timing, "Add per-task wall-clock times (report is then not reproducible)");
}

void write_text(const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw gs::Error(gs::ErrorKind::io, "cannot write " + path->string());
  f << text;
}

int emit(const gs::ExperimentConfig& cfg, const Common& c, const gs::RunOutcome& r) {
  write_text(cfg.output, r.report.dump(2) + "\n");
  if (c.csv && !r.csv.empty()) write_text(std::filesystem::path(*c.csv), r.csv);
  return r.exit_code;
}

gs::ExperimentConfig load(const Common& c) {
  gs::Overrides o;
  o.seed = c.seed;
  o.grid_points = c.grid_points;
  if (c.out) o.output = std::filesystem::path(*c.out);
  return gs::load_config(c.config, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gabor frame bounds and timing-jitter stability certificates"};
  app.set_version_flag("--version", GABORSTAB_VERSION);
  app.require_subcommand(1);

  Common run_opts;
  auto* run = app.add_subcommand("run", "Run every task of a config and write a JSON report");
  add_common(run, run_opts);

  Common sweep_opts;
  std::string param;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Rerun the config tasks over a list of parameter values");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param, "jitter_amplitude | a | b | p")->required();
  sweep->add_option("--values", values, "Comma-separated values, fractions allowed (e.g. 1/4,1/3,1/2)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      const auto cfg = load(run_opts);
      return emit(cfg, run_opts, gs::run_experiment(cfg, run_opts.timing));
    }
    const auto cfg = load(sweep_opts);
    const auto list = gs::parse_value_list(values);
    return emit(cfg, sweep_opts, gs::run_sweep(cfg, param, list, sweep_opts.timing));
  } catch (const gs::ConfigError& e) {
    std::cerr << "gaborstab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "gaborstab: " << e.what() << "\n";
    return 1;
  }
}
