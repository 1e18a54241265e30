// afs: argument facet similarity pipeline over two-party dialog summaries.
//
// Subcommands map onto the pipeline stages (select, pyramid, propositions,
// cluster, pairs, ingest-judgments, featurize, train, evaluate, compare);
// `run` executes the whole chain and prints the results table.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "afs/errors.hpp"
#include "afs/pipeline.hpp"

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  bool offline = false;
};

afs::ExperimentConfig load_config(const GlobalOptions& options) {
  afs::ExperimentConfig config = afs::load_experiment_config(options.config_path);
  if (options.seed.has_value()) {
    config.cv.seed = *options.seed;
  }
  if (options.output_dir.has_value()) {
    config.paths.output_dir = *options.output_dir;
  }
  if (options.offline) {
    config.sts.mode = "offline";
  }
  return config;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const afs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const afs::MissingResourceError& e) {
    std::cerr << "missing resource: " << e.what() << "\n";
    return 3;
  } catch (const afs::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const afs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"argument facet similarity pipeline"};
  app.require_subcommand(1);

  GlobalOptions options;
  app.add_option("--config", options.config_path, "experiment config file")
      ->required();
  std::uint64_t seed_value = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_value, "override the experiment seed");
  std::string output_value;
  auto* output_opt = app.add_option("--output", output_value,
                                    "override the output directory");
  app.add_flag("--offline", options.offline,
               "serve external similarity scores from the cache only");

  bool resume = false;
  std::string until_stage;
  auto* run_cmd = app.add_subcommand("run", "run the full pipeline");
  run_cmd->add_flag("--resume", resume, "skip stages whose artifacts exist");
  run_cmd->add_option("--stage", until_stage, "stop after this stage");

  for (afs::Stage stage : afs::kAllStages) {
    app.add_subcommand(afs::stage_name(stage),
                       std::string("run the ") + afs::stage_name(stage) +
                           " stage in isolation");
  }
  auto* report_cmd =
      app.add_subcommand("report", "re-render the results table from artifacts");

  CLI11_PARSE(app, argc, argv);

  if (seed_opt->count() > 0) options.seed = seed_value;
  if (output_opt->count() > 0) options.output_dir = output_value;

  return run_guarded([&]() -> int {
    const afs::ExperimentConfig config = load_config(options);
    if (run_cmd->parsed()) {
      const afs::Stage until = until_stage.empty()
                                   ? afs::Stage::kCompare
                                   : afs::stage_from_name(until_stage);
      const afs::ExperimentReport report =
          afs::run_experiment(config, resume, until);
      if (!report.rows.empty()) {
        std::cout << afs::render_report_table(report);
      }
      std::cout << "artifacts written to " << config.paths.output_dir.string()
                << "\n";
      return 0;
    }
    if (report_cmd->parsed()) {
      std::cout << afs::render_report_table(afs::load_report(config));
      return 0;
    }
    for (afs::Stage stage : afs::kAllStages) {
      if (app.get_subcommand(afs::stage_name(stage))->parsed()) {
        afs::run_stage(config, stage);
        std::cout << "stage " << afs::stage_name(stage) << " done\n";
        return 0;
      }
    }
    std::cerr << "no subcommand\n";
    return 1;
  });
}
