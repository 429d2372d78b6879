#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmac/lqi.hpp"
#include "dmac/plant.hpp"
#include "dmac/rls.hpp"

namespace dmac {

/// Scalar output map y = h(xi) and its linearization C = dh/dxi.
class OutputModel {
 public:
  virtual ~OutputModel() = default;
  virtual double Evaluate(const Eigen::VectorXd& xi) const = 0;
  virtual Eigen::RowVectorXd Jacobian(const Eigen::VectorXd& xi) const = 0;
};

class LinearOutputModel final : public OutputModel {
 public:
  explicit LinearOutputModel(Eigen::RowVectorXd c) : c_(std::move(c)) {}
  double Evaluate(const Eigen::VectorXd& xi) const override {
    return c_.dot(xi);
  }
  Eigen::RowVectorXd Jacobian(const Eigen::VectorXd&) const override {
    return c_;
  }

 private:
  Eigen::RowVectorXd c_;
};

struct ReferenceStep {
  std::size_t start = 0;
  double value = 0.0;  // N
};

/// Piecewise-constant reference; steps strictly increasing from 0.
class ReferenceSchedule {
 public:
  ReferenceSchedule() = default;
  explicit ReferenceSchedule(std::vector<ReferenceStep> steps);

  double At(std::size_t k) const;
  double Max() const;
  const std::vector<ReferenceStep>& steps() const { return steps_; }

 private:
  std::vector<ReferenceStep> steps_;
};

struct Hyperparameters {
  double r_theta_scale = 1e2;  // R_Theta = scale * I
  double lambda = 0.995;
  double r1_scale = 1.0;       // R1 = scale * I
  double r2 = 1.0;
};

/// Which control value enters the identification regressor.
enum class RegressorControl {
  kCommanded,  // u_k as computed by the control law
  kApplied,    // u_k after actuator clamping
};

struct LoopConfig {
  std::size_t horizon = 250;
  ReferenceSchedule reference{{{0, 1000.0}}};
  double sigma_v = 1e-2;
  unsigned long long seed = 1;
  std::size_t warmup_steps = 20;
  Hyperparameters hyperparams;
  double eps_jacobian = 1e-7;
  DareOptions dare;
  double covariance_ceiling = 1e6;
  RegressorControl regressor_control = RegressorControl::kApplied;

  void Validate() const;
};

/// Replaces the identified (A, B) when set; used to separate controller
/// behaviour from identification transients.
struct KnownModel {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
};

struct StepRecord {
  std::size_t k = 0;
  double r = 0.0;
  double y = 0.0;
  double z = 0.0;
  double u = 0.0;
  double w = 0.0;
  double v_a = 0.0;
  double p_a = 0.0;
  double q = 0.0;
  Eigen::MatrixXd theta;
  Eigen::RowVectorXd k_xi;
  double k_q = 0.0;
  bool dare_converged = false;
  bool saturated = false;

  // Not part of the CSV log.
  double dither = 0.0;
  double truth_y = 0.0;
  bool covariance_windup = false;
};

/// State carried from step k to k + 1.
struct LoopCarry {
  std::size_t k = 0;
  Eigen::VectorXd xi;
  double q = 0.0;
  std::optional<Eigen::VectorXd> phi_prev;
  std::optional<GainSet> gains;
  std::optional<Eigen::MatrixXd> p_warm;
};

/// Runs the adaptive tracking loop one step at a time.
class ClosedLoop {
 public:
  ClosedLoop(LoopConfig config, Plant& plant, const OutputModel& output,
             std::optional<KnownModel> known_model = std::nullopt);

  bool done() const { return carry_.k >= config_.horizon; }
  const LoopCarry& carry() const { return carry_; }
  const EstimatorState& estimator() const { return estimator_; }

  /// Executes step k: identify, linearize, synthesize, actuate, integrate.
  StepRecord Step();

 private:
  LoopConfig config_;
  Plant& plant_;
  const OutputModel& output_;
  std::optional<KnownModel> known_model_;
  EstimatorState estimator_;
  LoopCarry carry_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> dither_;
};

/// CSV header of the closed-loop log for l_xi = 2, l_u = 1.
std::string LogHeader();
void WriteLogRow(std::ostream& os, const StepRecord& rec);

using RecordSink = std::function<void(const StepRecord&)>;

/// Runs the full horizon on a copy of `plant`, invoking `sink` after each
/// step. On a numerical failure the records produced so far have already
/// been handed to `sink` and the error is rethrown.
std::vector<StepRecord> Run(const LoopConfig& config, const Plant& plant,
                            const OutputModel& output,
                            const RecordSink& sink = {},
                            std::optional<KnownModel> known_model = std::nullopt);

/// Runs and streams the CSV log to `path`.
std::vector<StepRecord> RunToCsv(const LoopConfig& config, const Plant& plant,
                                 const OutputModel& output,
                                 const std::string& path);

}  // namespace dmac
