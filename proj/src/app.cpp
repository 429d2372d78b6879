#include "dmac/app.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmac/error.hpp"
#include "dmac/format.hpp"
#include "dmac/io.hpp"

#ifndef DMAC_VERSION
#define DMAC_VERSION "0.0.0"
#endif

namespace dmac {
namespace {

namespace fs = std::filesystem;

std::string InDir(const RunConfig& c, const std::string& file) {
  return (fs::path(c.output_dir) / file).string();
}

void Prepare(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::kIo,
                "cannot create " + c.output_dir + ": " + ec.message());
  }
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  os << text << '\n';
}

void Finish(const RunConfig& c, const std::string& command,
            CommandOutput& out) {
  WriteText(InDir(c, "effective_config.json"), ConfigToJson(c));
  nlohmann::json m;
  m["command"] = command;
  m["seed"] = c.seed;
  m["version"] = Version();
  m["files"] = out.files;
  WriteText(InDir(c, "manifest.json"), m.dump(2));
  out.files.push_back("effective_config.json");
  out.files.push_back("manifest.json");
}

const SurrogateConfig& RequireSurrogate(const RunConfig& c,
                                        const std::string& what) {
  const auto* s = std::get_if<SurrogateConfig>(&c.plant);
  if (s == nullptr) {
    throw ConfigurationError(what + " needs plant.surrogate");
  }
  return *s;
}

}  // namespace

std::string Version() { return DMAC_VERSION; }

std::unique_ptr<Plant> MakePlant(const RunConfig& config) {
  if (const auto* s = std::get_if<SurrogateConfig>(&config.plant)) {
    return std::make_unique<SurrogatePlant>(*s, config.actuator, PlantState{},
                                            config.seed);
  }
  const auto& l = std::get<LtiPlantSpec>(config.plant);
  return std::make_unique<LtiPlant>(l.a, l.b, l.c, l.x0);
}

TrainingDataset LoadOrGenerateDataset(const RunConfig& config) {
  if (config.nn.dataset_file) {
    TrainingDataset d = ReadDatasetCsv(*config.nn.dataset_file);
    d.split = SplitIndices(d.size(), config.seed);
    return d;
  }
  return GenerateDataset(RequireSurrogate(config, "dataset generation"),
                         config.nn.dataset, config.seed);
}

std::unique_ptr<OutputModel> MakeOutputModel(const RunConfig& config,
                                             const std::string& out_dir) {
  if (const auto* l = std::get_if<LtiPlantSpec>(&config.plant)) {
    return std::make_unique<LinearOutputModel>(l->c.row(0));
  }
  if (config.nn.model_file) {
    return std::make_unique<NeuralOutput>(ReadModelJson(*config.nn.model_file),
                                          config.loop.eps_jacobian);
  }
  const TrainResult trained =
      NnTrain(LoadOrGenerateDataset(config), config.seed, config.nn.train);
  WriteModelJson((fs::path(out_dir) / "model.json").string(), trained.model);
  WriteHistoryCsv((fs::path(out_dir) / "history.csv").string(),
                  trained.history);
  return std::make_unique<NeuralOutput>(trained.model,
                                        config.loop.eps_jacobian);
}

CommandOutput CmdGenDataset(const RunConfig& config) {
  Prepare(config);
  CommandOutput out;
  const TrainingDataset d = GenerateDataset(
      RequireSurrogate(config, "gen-dataset"), config.nn.dataset, config.seed);
  WriteDatasetCsv(InDir(config, "dataset.csv"), d);
  out.files.push_back("dataset.csv");
  out.message = std::to_string(d.size()) + " samples";
  Finish(config, "gen-dataset", out);
  return out;
}

CommandOutput CmdTrain(const RunConfig& config) {
  Prepare(config);
  CommandOutput out;
  const TrainResult r =
      NnTrain(LoadOrGenerateDataset(config), config.seed, config.nn.train);
  WriteModelJson(InDir(config, "model.json"), r.model);
  WriteHistoryCsv(InDir(config, "history.csv"), r.history);
  out.files = {"model.json", "history.csv"};
  const EpochStats& best = r.history[static_cast<std::size_t>(r.best_epoch)];
  out.message = "stopped: " + r.stop_reason + "; best epoch " +
                std::to_string(r.best_epoch) + ", train mse " +
                FormatDouble(best.train_mse) + " N^2, validation mse " +
                FormatDouble(best.validation_mse) + " N^2";
  Finish(config, "train", out);
  return out;
}

CommandOutput CmdRun(const RunConfig& config) {
  Prepare(config);
  CommandOutput out;
  const bool trains = config.is_surrogate() && !config.nn.model_file;
  const auto output = MakeOutputModel(config, config.output_dir);
  if (trains) out.files = {"model.json", "history.csv"};
  const std::unique_ptr<Plant> plant = MakePlant(config);
  const std::string log = config.name + "_log.csv";
  out.files.push_back(log);
  const auto records = RunToCsv(config.loop, *plant, *output, InDir(config, log));
  const SweepRecord s = Summarize(records, config.loop.horizon);
  out.message = std::to_string(records.size()) + " steps, terminal |z| " +
                FormatDouble(s.terminal_abs_z) + " N";
  Finish(config, "run", out);
  return out;
}

CommandOutput CmdSweep(const RunConfig& config, std::size_t workers) {
  Prepare(config);
  CommandOutput out;
  const bool trains = config.is_surrogate() && !config.nn.model_file;
  const auto output = MakeOutputModel(config, config.output_dir);
  if (trains) out.files = {"model.json", "history.csv"};
  const std::unique_ptr<Plant> plant = MakePlant(config);
  std::vector<SweepRecord> all;
  for (const SweepSpec& spec : SweepsFor(config)) {
    auto records =
        RunSweep(spec, *plant, *output, config.output_dir, workers);
    for (auto& r : records) {
      out.files.push_back(r.log_file);
      all.push_back(std::move(r));
    }
  }
  const std::string summary = config.name + "_summary.csv";
  WriteSummary(InDir(config, summary), all);
  out.files.push_back(summary);
  std::size_t finite = 0;
  for (const auto& r : all) finite += r.finite ? 1 : 0;
  out.message = std::to_string(all.size()) + " runs, " +
                std::to_string(finite) + " finite";
  Finish(config, "sweep", out);
  return out;
}

}  // namespace dmac
