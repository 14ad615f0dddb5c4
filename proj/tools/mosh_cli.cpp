// mosh: command-line front end for the two-step soft-hard sampling pipeline.
//
//   mosh dense        [--config cfg.json] [--seed-override 1,2,3] [--out DIR]
//   mosh sparse       [--config cfg.json] [--archive a.jsonl] [...]
//   mosh e2e          [--config cfg.json] [...]
//   mosh metrics      --archive a.jsonl [--config cfg.json] [...]
//   mosh oracle-build [--config cfg.json] [...]
//
// Every field of the config file has a default, so each subcommand also runs
// with no flags at all. Errors print a one-line diagnostic and exit 1.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <mosh/experiment.hpp>

namespace {

mosh::ExperimentConfig resolve_config(const std::string& config_path,
                                      const std::vector<std::uint64_t>& seed_override,
                                      const std::string& out_dir) {
  mosh::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = mosh::ExperimentConfig::load(config_path);
  if (!seed_override.empty()) cfg.seeds = seed_override;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  cfg.validate();
  return cfg;
}

void report(const mosh::RunManifest& manifest) {
  std::cout << "config " << manifest.config_hash << "\n";
  for (const auto& path : manifest.artifacts) std::cout << "  " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dense soft-hard Pareto sampling and sparsification"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string archive_path;
  std::vector<std::uint64_t> seed_override;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON experiment config (defaults when omitted)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed-override", seed_override,
                    "comma-separated seed list replacing the config's seeds")
        ->delimiter(',');
    cmd->add_option("--out", out_dir, "output directory (overrides the config)");
  };

  CLI::App* dense = app.add_subcommand("dense", "run step 1 for every seed");
  add_common(dense);

  CLI::App* sparse = app.add_subcommand("sparse", "sparsify step-1 archives");
  add_common(sparse);
  sparse
      ->add_option("--archive", archive_path,
                   "sparsify this one archive instead of the per-seed layout")
      ->check(CLI::ExistingFile);

  CLI::App* e2e = app.add_subcommand("e2e", "dense + sparse for every step-1 method");
  add_common(e2e);

  CLI::App* metrics = app.add_subcommand("metrics", "recompute the metric trace of one archive");
  add_common(metrics);
  metrics->add_option("--archive", archive_path, "archive to evaluate")
      ->required()
      ->check(CLI::ExistingFile);

  CLI::App* oracle = app.add_subcommand("oracle-build", "freeze the offline reference frontier");
  add_common(oracle);

  CLI11_PARSE(app, argc, argv);

  try {
    const mosh::ExperimentConfig cfg = resolve_config(config_path, seed_override, out_dir);
    mosh::RunManifest manifest;
    if (dense->parsed())
      manifest = mosh::cmd_dense(cfg);
    else if (sparse->parsed())
      manifest = mosh::cmd_sparse(cfg, archive_path);
    else if (e2e->parsed())
      manifest = mosh::cmd_e2e(cfg);
    else if (metrics->parsed())
      manifest = mosh::cmd_metrics(cfg, archive_path);
    else
      manifest = mosh::cmd_oracle_build(cfg);
    report(manifest);
  } catch (const std::exception& e) {
    std::cerr << "mosh: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
