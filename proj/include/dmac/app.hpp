#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dmac/config.hpp"

namespace dmac {

std::string Version();

std::unique_ptr<Plant> MakePlant(const RunConfig& config);

/// Dataset from nn.dataset_file (split rebuilt from the seed) or generated
/// from the surrogate.
TrainingDataset LoadOrGenerateDataset(const RunConfig& config);

/// Surrogate plants: the network from nn.model_file, or one trained on the
/// spot (model and history are then written to `out_dir`). LTI plants: the
/// exact output row.
std::unique_ptr<OutputModel> MakeOutputModel(const RunConfig& config,
                                             const std::string& out_dir);

struct CommandOutput {
  std::vector<std::string> files;  // relative to config.output_dir
  std::string message;
};

/// Each command creates output_dir, writes its files there plus
/// effective_config.json and manifest.json (command, seed, version, files).
CommandOutput CmdGenDataset(const RunConfig& config);
CommandOutput CmdTrain(const RunConfig& config);
CommandOutput CmdRun(const RunConfig& config);
CommandOutput CmdSweep(const RunConfig& config, std::size_t workers = 1);

}  // namespace dmac
