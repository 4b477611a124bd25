// hfpath command-line interface.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "hfpath/codes.hpp"
#include "hfpath/error.hpp"
#include "hfpath/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct CommandOptions {
  std::string config;
  std::string assignments;
  std::map<std::string, std::string> flags;  // config key -> raw value
};

void add_config_flags(CLI::App* cmd, CommandOptions& opts) {
  cmd->add_option("--config", opts.config, "key/value config file; flags override it");
  for (const auto& key : hfpath::config_keys()) {
    cmd->add_option_function<std::string>(
        key.flag, [&opts, k = key.key](const std::string& v) { opts.flags[k] = v; },
        key.help + " [" + key.key + "]");
  }
}

hfpath::PipelineConfig resolve(const CommandOptions& opts) {
  hfpath::ConfigValues values;
  if (!opts.config.empty()) values = hfpath::load_config(opts.config);
  for (const auto& [k, v] : opts.flags) values[k] = v;
  return hfpath::PipelineConfig::from_values(values);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfpath: hospitalization pathway mining, trajectory clustering and survival analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hfpath::kVersion));

  CommandOptions opts;
  const std::map<std::string, std::string> commands{
      {"synth", "generate a synthetic cohort (trajectories, covariates, labels)"},
      {"mine", "mine frequent sequential patterns"},
      {"dist", "compute the patient distance matrix"},
      {"cluster", "k-medoids clustering with medoid profiles"},
      {"tune", "random search over weights and k"},
      {"survival", "per-cluster Cox AIC, forest C-index and scenario curves"},
      {"run", "full pipeline"},
      {"export-sankey", "per-cluster Sankey flows"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_config_flags(cmd, opts);
    subs[name] = cmd;
  }
  subs["survival"]->add_option("--assignments", opts.assignments, "assignments CSV (default: one cluster)");
  subs["export-sankey"]->add_option("--assignments", opts.assignments, "assignments CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const hfpath::PipelineConfig cfg = resolve(opts);
    if (subs["synth"]->parsed()) {
      hfpath::run_synth(cfg);
    } else if (subs["mine"]->parsed()) {
      hfpath::run_mine(cfg);
    } else if (subs["dist"]->parsed()) {
      hfpath::run_dist(cfg);
    } else if (subs["cluster"]->parsed()) {
      hfpath::run_cluster(cfg);
    } else if (subs["tune"]->parsed()) {
      hfpath::run_tune(cfg);
    } else if (subs["survival"]->parsed()) {
      std::optional<std::filesystem::path> a;
      if (!opts.assignments.empty()) a = opts.assignments;
      hfpath::run_survival(cfg, a);
    } else if (subs["export-sankey"]->parsed()) {
      hfpath::run_export_sankey(cfg, opts.assignments);
    } else {
      const auto artifacts = hfpath::run_pipeline(cfg);
      std::cout << "wrote " << artifacts.size() << " artifacts to " << cfg.out.string() << '\n';
    }
  } catch (const hfpath::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const hfpath::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const hfpath::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
