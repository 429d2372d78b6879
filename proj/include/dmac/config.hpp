#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dmac/loop.hpp"
#include "dmac/nn.hpp"
#include "dmac/plant.hpp"
#include "dmac/sweep.hpp"

namespace dmac {

/// Exact LTI plant with output y = C xi; the closed loop then uses C as its
/// output model instead of a network.
struct LtiPlantSpec {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  Eigen::VectorXd x0;

  void Validate() const;
};

struct NnSection {
  std::optional<std::string> model_file;    // load instead of training
  std::optional<std::string> dataset_file;  // load instead of generating
  DatasetSpec dataset;
  TrainOptions train;
};

struct SweepEntry {
  SweepParameter parameter = SweepParameter::kRThetaScale;
  std::vector<double> values;
};

struct RunConfig {
  std::string name = "run";
  unsigned long long seed = 1;
  std::string output_dir = "out";
  std::variant<SurrogateConfig, LtiPlantSpec> plant = SurrogateConfig{};
  ActuatorConfig actuator;
  LoopConfig loop;  // loop.seed mirrors `seed`
  NnSection nn;
  std::vector<SweepEntry> sweep;  // empty: the four default grids

  bool is_surrogate() const {
    return std::holds_alternative<SurrogateConfig>(plant);
  }
  void Validate() const;
};

/// Strict parse: unknown keys are rejected (keys starting with "_note" are
/// ignored), defaults fill everything absent. Diagnostics name the full key
/// path, e.g. `loop.hyperparams.lambda`.
RunConfig ParseConfig(const std::string& json_text);
RunConfig LoadConfig(const std::string& path);

/// Every field, defaults included. ParseConfig(ConfigToJson(c)) == c.
std::string ConfigToJson(const RunConfig& config);

/// The sweeps the config asks for, defaults if none.
std::vector<SweepSpec> SweepsFor(const RunConfig& config);

}  // namespace dmac
