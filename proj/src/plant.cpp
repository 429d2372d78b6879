#include "dmac/plant.hpp"

#include <algorithm>
#include <sstream>

#include "dmac/error.hpp"

namespace dmac {

void ActuatorConfig::Validate() const {
  if (!(w0 > 0.0)) throw ConfigurationError("actuator.w0 must be positive");
  if (!(k_w > 0.0)) throw ConfigurationError("actuator.k_w must be positive");
  if (!(w_min < w0 && w0 < w_max)) {
    throw ConfigurationError("actuator.w_min < actuator.w0 < actuator.w_max must hold");
  }
}

ActuatorOutput ActuatorMap(const ActuatorConfig& cfg, double u) {
  const double raw = cfg.w0 - cfg.k_w * u;
  ActuatorOutput out;
  out.w = std::clamp(raw, cfg.w_min, cfg.w_max);
  out.saturated = out.w != raw;
  return out;
}

double AppliedControl(const ActuatorConfig& cfg, double w) {
  return (cfg.w0 - w) / cfg.k_w;
}

std::pair<double, double> NormalizeState(double v_out, double p_out,
                                         double v_ref, double p_ref) {
  if (!(v_ref > 0.0) || !(p_ref > 0.0)) {
    throw ConfigurationError("normalization references must be positive");
  }
  return {v_out / v_ref, p_out / p_ref};
}

void SurrogateConfig::Validate() const {
  if (!(tau_v >= 1.0) || !(tau_p >= 1.0)) {
    throw ConfigurationError("plant.surrogate time constants must be >= 1 step");
  }
  if (!(a_p > 0.0)) throw ConfigurationError("plant.surrogate.a_p must be positive");
  if (!(thrust_scale > 0.0)) {
    throw ConfigurationError("plant.surrogate.thrust_scale must be positive");
  }
  if (!(w0 > 0.0)) throw ConfigurationError("plant.surrogate.w0 must be positive");
  if (!(process_noise_std >= 0.0)) {
    throw ConfigurationError("plant.surrogate.process_noise_std must be >= 0");
  }
}

PlantState SurrogateSteadyState(const SurrogateConfig& cfg, double w) {
  const double d = (w - cfg.w0) / cfg.w0;
  return {1.0 + cfg.a_v * d, 1.0 + cfg.a_p * d};
}

PlantState SurrogateStep(const SurrogateConfig& cfg, const PlantState& state,
                         double w) {
  const PlantState ss = SurrogateSteadyState(cfg, w);
  PlantState next;
  next.v_a = state.v_a + (ss.v_a - state.v_a) / cfg.tau_v;
  next.p_a = state.p_a + (ss.p_a - state.p_a) / cfg.tau_p;
  return next;
}

double TruthThrust(const SurrogateConfig& cfg, const PlantState& state) {
  return cfg.thrust_scale * state.p_a * state.v_a;
}

Eigen::VectorXd LtiStep(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                        const Eigen::VectorXd& state,
                        const Eigen::VectorXd& u) {
  if (a.rows() != a.cols() || a.cols() != state.size() ||
      b.rows() != a.rows() || b.cols() != u.size()) {
    std::ostringstream os;
    os << "lti step: dimension mismatch (A " << a.rows() << "x" << a.cols()
       << ", B " << b.rows() << "x" << b.cols() << ", x " << state.size()
       << ", u " << u.size() << ")";
    throw ConfigurationError(os.str());
  }
  return a * state + b * u;
}

SurrogatePlant::SurrogatePlant(SurrogateConfig surrogate,
                               ActuatorConfig actuator, PlantState initial,
                               unsigned long long noise_seed)
    : surrogate_(surrogate),
      actuator_(actuator),
      state_(initial),
      noise_rng_(noise_seed) {
  surrogate_.Validate();
  actuator_.Validate();
}

Eigen::VectorXd SurrogatePlant::Measure() const { return state_.AsVector(); }

PlantStepInfo SurrogatePlant::Apply(double u) {
  const ActuatorOutput act = ActuatorMap(actuator_, u);
  state_ = SurrogateStep(surrogate_, state_, act.w);
  if (surrogate_.process_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, surrogate_.process_noise_std);
    state_.v_a += noise(noise_rng_);
    state_.p_a += noise(noise_rng_);
  }
  return {act.w, AppliedControl(actuator_, act.w), act.saturated};
}

double SurrogatePlant::TruthOutput() const {
  return TruthThrust(surrogate_, state_);
}

std::unique_ptr<Plant> SurrogatePlant::Clone() const {
  return std::make_unique<SurrogatePlant>(*this);
}

LtiPlant::LtiPlant(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c,
                   Eigen::VectorXd initial)
    : a_(std::move(a)),
      b_(std::move(b)),
      c_(std::move(c)),
      state_(std::move(initial)) {
  if (b_.cols() != 1) {
    throw ConfigurationError("closed-loop LTI plant must be single-input");
  }
  if (c_.rows() != 1 || c_.cols() != a_.rows()) {
    throw ConfigurationError("LTI plant output row has the wrong shape");
  }
  // Validates the remaining shapes.
  LtiStep(a_, b_, state_, Eigen::VectorXd::Zero(1));
}

PlantStepInfo LtiPlant::Apply(double u) {
  state_ = LtiStep(a_, b_, state_, Eigen::VectorXd::Constant(1, u));
  return {u, u, false};
}

double LtiPlant::TruthOutput() const { return (c_ * state_)(0); }

std::unique_ptr<Plant> LtiPlant::Clone() const {
  return std::make_unique<LtiPlant>(*this);
}

}  // namespace dmac
