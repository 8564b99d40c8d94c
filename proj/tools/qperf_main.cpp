// qperf - scenario runner for queueing bounds on quantum channels.
//
// Verbs:
//   run <config>       run an experiment (config file path or builtin name)
//   list               list the builtin scenario catalog
//   validate <config>  parse and resolve a config without running it
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 bound-validity check failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <qperf/config.hpp>
#include <qperf/experiment.hpp>

namespace {

std::string load_config_text(const std::string& arg) {
  if (std::filesystem::exists(arg)) {
    std::ifstream is(arg);
    if (!is) throw qperf::ConfigError(0, "cannot read '" + arg + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  }
  for (const auto& entry : qperf::builtin_scenarios()) {
    if (entry.name == arg) return entry.text;
  }
  throw qperf::ConfigError(0, "'" + arg +
                                  "' is neither a config file nor a builtin "
                                  "scenario (see 'qperf list')");
}

// --grid x=a:b:n (the variable name is informational; it must match the
// configured measure's argument).
void parse_grid_override(const std::string& spec, qperf::RunOptions* opts) {
  const auto eq = spec.find('=');
  const std::string range = eq == std::string::npos ? spec : spec.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = range.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw qperf::ConfigError(0, "--grid expects <var>=a:b:n");
  }
  try {
    opts->grid_min = std::stod(range.substr(0, c1));
    opts->grid_max = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
    opts->grid_points = std::stoi(range.substr(c2 + 1));
  } catch (const std::exception&) {
    throw qperf::ConfigError(0, "--grid expects numeric a:b:n");
  }
  if (!(*opts->grid_max > *opts->grid_min) || *opts->grid_points < 2) {
    throw qperf::ConfigError(0, "--grid range must satisfy a < b, n >= 2");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"queueing performance bounds for quantum channels"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out_dir;
  std::optional<std::string> grid_spec;
  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", run_config,
                  "config file path or builtin scenario name")
      ->required();
  run->add_option("--seed", seed, "override the Monte Carlo base seed");
  run->add_option("--paths", paths, "override the number of Monte Carlo paths");
  run->add_option("--out-dir", out_dir, "override the output directory");
  run->add_option("--grid", grid_spec, "override the evaluation grid: x=a:b:n");

  CLI::App* list = app.add_subcommand("list", "list builtin scenario configs");

  std::string validate_config;
  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", validate_config, "config file path or name")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& entry : qperf::builtin_scenarios()) {
        std::cout << entry.name << " - " << entry.description << '\n';
      }
      return 0;
    }

    if (validate->parsed()) {
      const qperf::ExperimentConfig cfg =
          qperf::parse_config(load_config_text(validate_config));
      qperf::resolve_scenario(cfg);
      std::cout << "ok: " << cfg.name << '\n';
      return 0;
    }

    // run
    const qperf::ExperimentConfig cfg =
        qperf::parse_config(load_config_text(run_config));
    qperf::RunOptions opts;
    opts.seed = seed;
    opts.paths = paths;
    if (out_dir) {
      opts.out_dir = *out_dir;
    } else if (const char* env = std::getenv("QPERF_OUT_DIR")) {
      opts.out_dir = std::string(env);
    }
    if (grid_spec) parse_grid_override(*grid_spec, &opts);

    const qperf::ExperimentResult result = qperf::run_experiment(cfg, opts);
    std::cout << "wrote " << result.bounds_csv.string() << '\n';
    std::cout << "wrote " << result.empirical_csv.string() << '\n';
    std::cout << "wrote " << result.summary_path.string() << '\n';
    if (!result.validity_ok) {
      std::cerr << "bound-validity check failed; see "
                << result.summary_path.string() << '\n';
      return 3;
    }
    return 0;
  } catch (const qperf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
