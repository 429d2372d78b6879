#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmac/loop.hpp"
#include "dmac/plant.hpp"

namespace dmac {

/// tansig(x) = 2 / (1 + exp(-2x)) - 1, which is tanh(x).
double Tansig(double x);

/// Fixed 2 -> 10 -> 10 -> 1 network with tansig hidden layers and a linear
/// output; maps (V_a, P_a) to thrust in N.
struct NeuralOutputModel {
  static constexpr int kInputs = 2;
  static constexpr int kHidden = 10;
  static constexpr int kParameterCount =
      kHidden * kInputs + kHidden + kHidden * kHidden + kHidden + kHidden + 1;

  Eigen::Matrix<double, kHidden, kInputs> w1 =
      Eigen::Matrix<double, kHidden, kInputs>::Zero();
  Eigen::Matrix<double, kHidden, 1> b1 = Eigen::Matrix<double, kHidden, 1>::Zero();
  Eigen::Matrix<double, kHidden, kHidden> w2 =
      Eigen::Matrix<double, kHidden, kHidden>::Zero();
  Eigen::Matrix<double, kHidden, 1> b2 = Eigen::Matrix<double, kHidden, 1>::Zero();
  Eigen::Matrix<double, 1, kHidden> w3 = Eigen::Matrix<double, 1, kHidden>::Zero();
  double b3 = 0.0;

  /// Parameters in the order w1 (row-major), b1, w2 (row-major), b2, w3, b3.
  Eigen::VectorXd Flatten() const;
  static NeuralOutputModel Unflatten(const Eigen::VectorXd& params);

  bool AllFinite() const;
};

double NnForward(const NeuralOutputModel& model, const Eigen::Vector2d& xi);

/// Central-difference gradient of the network output with respect to its
/// input, one coordinate at a time.
Eigen::RowVector2d NnJacobian(const NeuralOutputModel& model,
                              const Eigen::Vector2d& xi, double eps = 1e-7);

/// Adapts a network to the closed loop's output-model interface.
class NeuralOutput final : public OutputModel {
 public:
  explicit NeuralOutput(NeuralOutputModel model, double eps = 1e-7)
      : model_(std::move(model)), eps_(eps) {}

  double Evaluate(const Eigen::VectorXd& xi) const override;
  Eigen::RowVectorXd Jacobian(const Eigen::VectorXd& xi) const override;
  const NeuralOutputModel& model() const { return model_; }

 private:
  NeuralOutputModel model_;
  double eps_;
};

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

/// Seeded random partition into 70 / 15 / 15 percent of n.
DatasetSplit SplitIndices(std::size_t n, unsigned long long seed);

struct TrainingDataset {
  Eigen::MatrixX2d inputs;  // rows of (V_a, P_a)
  Eigen::VectorXd targets;  // thrust, N
  DatasetSplit split;

  std::size_t size() const { return static_cast<std::size_t>(targets.size()); }
};

struct DatasetSpec {
  std::size_t samples = 500;
  double v_min = 0.75;
  double v_max = 1.2;
  double p_min = 0.6;
  double p_max = 1.9;
};

/// Latin-hypercube samples over the (V_a, P_a) box labelled with the
/// surrogate's truth thrust, plus a seeded split.
TrainingDataset GenerateDataset(const SurrogateConfig& surrogate,
                                const DatasetSpec& spec,
                                unsigned long long seed);

struct TrainOptions {
  int max_epochs = 1000;
  double target_mse = 0.0;
  int patience = 50;
  double mu_init = 1e-3;
  double mu_increase = 10.0;
  double mu_decrease = 0.1;
  double mu_max = 1e10;
  double init_range = 0.5;
};

struct EpochStats {
  int epoch = 0;
  double train_mse = 0.0;
  double validation_mse = 0.0;
  double test_mse = 0.0;
  double mu = 0.0;
};

struct TrainResult {
  NeuralOutputModel model;  // best-validation snapshot
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_validation_mse = 0.0;
  std::string stop_reason;
};

/// Seeded uniform initialization in [-range, range].
NeuralOutputModel InitializeModel(unsigned long long seed, double range = 0.5);

/// Levenberg-Marquardt on the training partition with early stopping on the
/// validation partition. Epoch 0 in the history is the initial model.
TrainResult NnTrain(const TrainingDataset& dataset, unsigned long long seed,
                    const TrainOptions& options = {});

/// Mean squared error of the model over the given rows.
double MeanSquaredError(const NeuralOutputModel& model,
                        const TrainingDataset& dataset,
                        const std::vector<std::size_t>& rows);

}  // namespace dmac
