#pragma once

#include <memory>
#include <random>
#include <utility>

#include <Eigen/Dense>

namespace dmac {

/// Heat-flux actuator w = clamp(w0 - k_w u, w_min, w_max), in W/m^2.
struct ActuatorConfig {
  double w0 = 2e6;
  double k_w = 1e5;
  double w_min = 0.5e6;
  double w_max = 6e6;

  void Validate() const;
};

struct ActuatorOutput {
  double w = 0.0;
  bool saturated = false;
};

ActuatorOutput ActuatorMap(const ActuatorConfig& cfg, double u);

/// Control value the plant actually sees after clamping: (w0 - w) / k_w.
double AppliedControl(const ActuatorConfig& cfg, double w);

/// (v_out / v_ref, p_out / p_ref). Throws on non-positive references.
std::pair<double, double> NormalizeState(double v_out, double p_out,
                                         double v_ref, double p_ref);

/// Normalized outlet velocity and pressure.
struct PlantState {
  double v_a = 1.0;
  double p_a = 1.0;

  Eigen::Vector2d AsVector() const { return {v_a, p_a}; }
};

/// Low-order stand-in for the combustor: two first-order lags toward
/// affine steady-state maps of the relative heat-flux deviation
/// d = (w - w0) / w0, and a product-form thrust.
struct SurrogateConfig {
  double tau_v = 5.0;
  double tau_p = 10.0;
  double a_v = -0.1;
  double a_p = 0.4;
  double thrust_scale = 950.0;  // N at (1, 1)
  double w0 = 2e6;              // nominal flux the deviation is taken from
  double process_noise_std = 0.0;

  void Validate() const;
};

/// Deterministic part of one surrogate step.
PlantState SurrogateStep(const SurrogateConfig& cfg, const PlantState& state,
                         double w);

/// Steady state reached under constant w.
PlantState SurrogateSteadyState(const SurrogateConfig& cfg, double w);

/// thrust_scale * p_a * v_a.
double TruthThrust(const SurrogateConfig& cfg, const PlantState& state);

/// a xi + b u. Throws a configuration error on dimension mismatch.
Eigen::VectorXd LtiStep(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const Eigen::VectorXd& state, const Eigen::VectorXd& u);

/// What the closed loop learns after one plant step.
struct PlantStepInfo {
  double w = 0.0;          // heat flux (surrogate) or u (LTI plant)
  double applied_u = 0.0;  // control after actuator clamping
  bool saturated = false;
};

/// Plant interface driven by the closed loop. Single-input.
class Plant {
 public:
  virtual ~Plant() = default;

  virtual Eigen::VectorXd Measure() const = 0;
  virtual PlantStepInfo Apply(double u) = 0;
  /// Ground-truth output at the current state (N for the surrogate).
  virtual double TruthOutput() const = 0;
  virtual std::unique_ptr<Plant> Clone() const = 0;
};

class SurrogatePlant final : public Plant {
 public:
  SurrogatePlant(SurrogateConfig surrogate, ActuatorConfig actuator,
                 PlantState initial = {}, unsigned long long noise_seed = 0);

  Eigen::VectorXd Measure() const override;
  PlantStepInfo Apply(double u) override;
  double TruthOutput() const override;
  std::unique_ptr<Plant> Clone() const override;

  const PlantState& state() const { return state_; }

 private:
  SurrogateConfig surrogate_;
  ActuatorConfig actuator_;
  PlantState state_;
  std::mt19937_64 noise_rng_;
};

/// Exact xi+ = A xi + B u with output y = C xi; used as an oracle plant.
class LtiPlant final : public Plant {
 public:
  LtiPlant(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
           Eigen::VectorXd initial);

  Eigen::VectorXd Measure() const override { return state_; }
  PlantStepInfo Apply(double u) override;
  double TruthOutput() const override;
  std::unique_ptr<Plant> Clone() const override;

 private:
  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd c_;
  Eigen::VectorXd state_;
};

}  // namespace dmac
