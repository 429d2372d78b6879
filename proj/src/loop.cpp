#include "dmac/loop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dmac/error.hpp"
#include "dmac/format.hpp"

namespace dmac {

ReferenceSchedule::ReferenceSchedule(std::vector<ReferenceStep> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty() || steps_.front().start != 0) {
    throw ConfigurationError("loop.reference must start at step 0");
  }
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    if (steps_[i].start <= steps_[i - 1].start) {
      throw ConfigurationError(
          "loop.reference steps must be strictly increasing");
    }
  }
}

double ReferenceSchedule::At(std::size_t k) const {
  auto it = std::upper_bound(
      steps_.begin(), steps_.end(), k,
      [](std::size_t kk, const ReferenceStep& s) { return kk < s.start; });
  return std::prev(it)->value;
}

double ReferenceSchedule::Max() const {
  double m = steps_.front().value;
  for (const auto& s : steps_) m = std::max(m, s.value);
  return m;
}

void LoopConfig::Validate() const {
  if (!(sigma_v >= 0.0)) throw ConfigurationError("loop.sigma_v must be >= 0");
  if (reference.steps().empty()) {
    throw ConfigurationError("loop.reference must not be empty");
  }
  if (!(hyperparams.lambda > 0.0 && hyperparams.lambda <= 1.0)) {
    throw ConfigurationError("loop.hyperparams.lambda must lie in (0, 1]; got " +
                             FormatDouble(hyperparams.lambda));
  }
  if (!(hyperparams.r_theta_scale > 0.0)) {
    throw ConfigurationError("loop.hyperparams.r_theta_scale must be positive");
  }
  if (!(hyperparams.r1_scale >= 0.0)) {
    throw ConfigurationError("loop.hyperparams.r1_scale must be >= 0");
  }
  if (!(hyperparams.r2 > 0.0)) {
    throw ConfigurationError("loop.hyperparams.r2 must be positive");
  }
  if (!(eps_jacobian > 0.0)) {
    throw ConfigurationError("loop.eps_jacobian must be positive");
  }
  if (dare.max_iter <= 0 || !(dare.tol > 0.0)) {
    throw ConfigurationError("loop.dare.max_iter and loop.dare.tol must be positive");
  }
}

ClosedLoop::ClosedLoop(LoopConfig config, Plant& plant,
                       const OutputModel& output,
                       std::optional<KnownModel> known_model)
    : config_(std::move(config)),
      plant_(plant),
      output_(output),
      known_model_(std::move(known_model)),
      rng_(config_.seed),
      dither_(0.0, config_.sigma_v) {
  config_.Validate();
  carry_.xi = plant_.Measure();
  const int l_xi = static_cast<int>(carry_.xi.size());
  const int n = l_xi + 1;
  estimator_ = EstimatorInit(
      l_xi, 1,
      config_.hyperparams.r_theta_scale * Eigen::MatrixXd::Identity(n, n),
      config_.hyperparams.lambda);
}

StepRecord ClosedLoop::Step() {
  const std::size_t k = carry_.k;
  const Eigen::VectorXd& xi = carry_.xi;
  const int l_xi = static_cast<int>(xi.size());

  // (1) identification with (xi_k, phi_{k-1})
  if (carry_.phi_prev.has_value()) {
    estimator_ = EstimatorUpdate(estimator_, xi, *carry_.phi_prev);
  }

  // (2) output and tracking error
  StepRecord rec;
  rec.k = k;
  rec.r = config_.reference.At(k);
  rec.y = output_.Evaluate(xi);
  rec.z = rec.r - rec.y;
  rec.q = carry_.q;
  rec.truth_y = plant_.TruthOutput();

  // (3) linearized output row
  const Eigen::RowVectorXd c = output_.Jacobian(xi);

  // (4) gain synthesis, warm-started from the last converged solve
  auto [a, b] = ExtractAB(estimator_);
  if (known_model_.has_value()) {
    a = known_model_->a;
    b = known_model_->b;
  }
  const AugmentedSystem sys = BuildAugmented(a, b, c);
  const int n_aug = l_xi + 1;
  const Eigen::MatrixXd r1 =
      config_.hyperparams.r1_scale * Eigen::MatrixXd::Identity(n_aug, n_aug);
  const Eigen::MatrixXd r2 =
      Eigen::MatrixXd::Constant(1, 1, config_.hyperparams.r2);
  GainSet solved;
  try {
    solved = SolveDare(sys, r1, r2, carry_.p_warm, config_.dare);
  } catch (const Error& e) {
    throw NumericalError(e.what(), k);
  }
  if (solved.converged) {
    carry_.p_warm = solved.riccati_p;
    carry_.gains = solved;
  } else if (!carry_.gains.has_value()) {
    carry_.gains = GainSet::Zero(l_xi, 1, 1);
  }
  rec.dare_converged = solved.converged;
  const GainSet& gains = *carry_.gains;

  // (5) control law with dither
  rec.dither = config_.sigma_v > 0.0 ? dither_(rng_) : 0.0;
  if (k < config_.warmup_steps) {
    rec.u = rec.dither;
  } else {
    rec.u = (gains.k_xi * xi)(0) + gains.k_q(0, 0) * carry_.q + rec.dither;
  }
  if (!std::isfinite(rec.u)) {
    throw NumericalError("control signal is not finite", k);
  }

  // (6) actuate and advance the plant
  const PlantStepInfo info = plant_.Apply(rec.u);
  rec.w = info.w;
  rec.saturated = info.saturated;
  rec.v_a = xi(0);
  rec.p_a = l_xi > 1 ? xi(1) : 0.0;
  rec.theta = estimator_.theta;
  rec.k_xi = gains.k_xi.row(0);
  rec.k_q = gains.k_q(0, 0);
  rec.covariance_windup =
      CovarianceWindup(estimator_, config_.covariance_ceiling);

  Eigen::VectorXd phi(l_xi + 1);
  phi << xi, (config_.regressor_control == RegressorControl::kApplied
                  ? info.applied_u
                  : rec.u);
  carry_.phi_prev = std::move(phi);
  carry_.xi = plant_.Measure();

  // (7) integrator
  carry_.q += rec.z;
  carry_.k = k + 1;

  if (!std::isfinite(rec.y) || !carry_.xi.allFinite() ||
      !std::isfinite(carry_.q)) {
    throw NumericalError("closed-loop signal is not finite", k);
  }
  return rec;
}

std::string LogHeader() {
  return "k,r_N,y_N,z_N,u,w_Wm2,v_a,p_a,q,th11,th12,th13,th21,th22,th23,"
         "kxi1,kxi2,kq,dare_ok,sat";
}

void WriteLogRow(std::ostream& os, const StepRecord& rec) {
  os << rec.k;
  for (double v : {rec.r, rec.y, rec.z, rec.u, rec.w, rec.v_a, rec.p_a,
                   rec.q}) {
    os << ',' << FormatDouble(v);
  }
  // Row-major theta.
  for (Eigen::Index i = 0; i < rec.theta.rows(); ++i) {
    for (Eigen::Index j = 0; j < rec.theta.cols(); ++j) {
      os << ',' << FormatDouble(rec.theta(i, j));
    }
  }
  for (Eigen::Index j = 0; j < rec.k_xi.size(); ++j) {
    os << ',' << FormatDouble(rec.k_xi(j));
  }
  os << ',' << FormatDouble(rec.k_q) << ',' << (rec.dare_converged ? 1 : 0)
     << ',' << (rec.saturated ? 1 : 0) << '\n';
}

std::vector<StepRecord> Run(const LoopConfig& config, const Plant& plant,
                            const OutputModel& output, const RecordSink& sink,
                            std::optional<KnownModel> known_model) {
  std::unique_ptr<Plant> owned = plant.Clone();
  ClosedLoop loop(config, *owned, output, std::move(known_model));
  std::vector<StepRecord> log;
  log.reserve(config.horizon);
  while (!loop.done()) {
    log.push_back(loop.Step());
    if (sink) sink(log.back());
  }
  return log;
}

std::vector<StepRecord> RunToCsv(const LoopConfig& config, const Plant& plant,
                                 const OutputModel& output,
                                 const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  }
  os << LogHeader() << '\n';
  return Run(config, plant, output, [&os](const StepRecord& rec) {
    WriteLogRow(os, rec);
    os.flush();
  });
}

}  // namespace dmac
