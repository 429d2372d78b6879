// Command-line front end over the C API.

#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dmac/dmac.h"

namespace {

struct Options {
  std::string config;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out;
  unsigned int workers = 1;
};

void AddCommon(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "JSON run configuration")->required();
  cmd->add_option("--seed", opt.seed, "override the config seed");
  cmd->add_option("--out", opt.out, "override the output directory");
}

int Fail(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, dmac_last_error());
  return 1;
}

int Execute(const std::string& name, const Options& opt) {
  dmac_config* cfg = nullptr;
  if (dmac_config_load(opt.config.c_str(), &cfg) != DMAC_OK) {
    return Fail(opt.config.c_str());
  }
  if (opt.seed) dmac_config_set_seed(cfg, *opt.seed);
  if (opt.out && dmac_config_set_output_dir(cfg, opt.out->c_str()) != DMAC_OK) {
    dmac_config_free(cfg);
    return Fail("--out");
  }
  std::printf("seed %llu\n", dmac_config_seed(cfg));
  std::fflush(stdout);

  char* summary = nullptr;
  dmac_status status = DMAC_ERR_ARGUMENT;
  if (name == "gen-dataset") {
    status = dmac_gen_dataset(cfg, &summary);
  } else if (name == "train") {
    status = dmac_train(cfg, &summary);
  } else if (name == "run") {
    status = dmac_run(cfg, &summary);
  } else if (name == "sweep") {
    status = dmac_sweep(cfg, opt.workers, &summary);
  }
  dmac_config_free(cfg);
  if (status != DMAC_OK) return Fail(name.c_str());
  std::printf("%s: %s\n", name.c_str(), summary);
  dmac_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive thrust tracking: dataset, training, closed loop, sweeps"};
  app.set_version_flag("--version", std::string(dmac_version()));
  app.require_subcommand(1);

  Options opt;
  CLI::App* gen = app.add_subcommand("gen-dataset", "sample the surrogate thrust map");
  CLI::App* train = app.add_subcommand("train", "fit the output network");
  CLI::App* run = app.add_subcommand("run", "run one closed-loop experiment");
  CLI::App* sweep = app.add_subcommand("sweep", "one-at-a-time hyperparameter sweeps");
  for (CLI::App* cmd : {gen, train, run, sweep}) AddCommon(cmd, opt);
  sweep->add_option("--workers", opt.workers, "parallel runs")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  for (CLI::App* cmd : {gen, train, run, sweep}) {
    if (cmd->parsed()) return Execute(cmd->get_name(), opt);
  }
  return 1;
}
