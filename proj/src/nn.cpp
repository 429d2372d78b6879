#include "dmac/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dmac/error.hpp"

namespace dmac {
namespace {

constexpr int kH = NeuralOutputModel::kHidden;
using Hidden = Eigen::Matrix<double, kH, 1>;

Hidden Activate(const Hidden& x) { return x.unaryExpr(&Tansig); }

// Output and d(output)/d(params) for one sample, params in Flatten() order.
double ForwardWithGradient(const NeuralOutputModel& m, const Eigen::Vector2d& x,
                           Eigen::Ref<Eigen::RowVectorXd> grad) {
  const Hidden h1 = Activate(m.w1 * x + m.b1);
  const Hidden h2 = Activate(m.w2 * h1 + m.b2);
  const double y = m.w3.dot(h2) + m.b3;

  const Hidden d2 = m.w3.transpose().cwiseProduct(
      (1.0 - h2.array().square()).matrix());
  const Hidden d1 =
      (m.w2.transpose() * d2).cwiseProduct((1.0 - h1.array().square()).matrix());

  int o = 0;
  for (int i = 0; i < kH; ++i) {
    grad(o++) = d1(i) * x(0);
    grad(o++) = d1(i) * x(1);
  }
  grad.segment(o, kH) = d1.transpose();
  o += kH;
  for (int i = 0; i < kH; ++i) {
    grad.segment(o, kH) = d2(i) * h1.transpose();
    o += kH;
  }
  grad.segment(o, kH) = d2.transpose();
  o += kH;
  grad.segment(o, kH) = h2.transpose();
  o += kH;
  grad(o) = 1.0;
  return y;
}

// Affine map x -> (x - center) / half_range onto roughly [-1, 1].
struct MinMax {
  double center = 0.0;
  double half_range = 1.0;

  static MinMax Fit(const Eigen::VectorXd& values) {
    MinMax mm;
    const double lo = values.minCoeff();
    const double hi = values.maxCoeff();
    mm.center = 0.5 * (lo + hi);
    mm.half_range = hi > lo ? 0.5 * (hi - lo) : 1.0;
    return mm;
  }
};

// Composes input and target scaling into the first and last layers so the
// returned network consumes raw (V_a, P_a) and emits raw thrust.
NeuralOutputModel FoldScaling(const NeuralOutputModel& scaled,
                              const MinMax& v, const MinMax& p,
                              const MinMax& target) {
  NeuralOutputModel m = scaled;
  const Eigen::Vector2d inv_half(1.0 / v.half_range, 1.0 / p.half_range);
  const Eigen::Vector2d center(v.center, p.center);
  m.w1 = scaled.w1 * inv_half.asDiagonal();
  m.b1 = scaled.b1 - m.w1 * center;
  m.w3 = target.half_range * scaled.w3;
  m.b3 = target.half_range * scaled.b3 + target.center;
  return m;
}

double SubsetMse(const Eigen::VectorXd& residuals) {
  return residuals.size() == 0 ? 0.0 : residuals.squaredNorm() / residuals.size();
}

}  // namespace

double Tansig(double x) { return 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0; }

Eigen::VectorXd NeuralOutputModel::Flatten() const {
  Eigen::VectorXd p(kParameterCount);
  int o = 0;
  for (int i = 0; i < kHidden; ++i)
    for (int j = 0; j < kInputs; ++j) p(o++) = w1(i, j);
  for (int i = 0; i < kHidden; ++i) p(o++) = b1(i);
  for (int i = 0; i < kHidden; ++i)
    for (int j = 0; j < kHidden; ++j) p(o++) = w2(i, j);
  for (int i = 0; i < kHidden; ++i) p(o++) = b2(i);
  for (int i = 0; i < kHidden; ++i) p(o++) = w3(i);
  p(o) = b3;
  return p;
}

NeuralOutputModel NeuralOutputModel::Unflatten(const Eigen::VectorXd& p) {
  if (p.size() != kParameterCount) {
    throw ConfigurationError("network parameter vector has the wrong length");
  }
  NeuralOutputModel m;
  int o = 0;
  for (int i = 0; i < kHidden; ++i)
    for (int j = 0; j < kInputs; ++j) m.w1(i, j) = p(o++);
  for (int i = 0; i < kHidden; ++i) m.b1(i) = p(o++);
  for (int i = 0; i < kHidden; ++i)
    for (int j = 0; j < kHidden; ++j) m.w2(i, j) = p(o++);
  for (int i = 0; i < kHidden; ++i) m.b2(i) = p(o++);
  for (int i = 0; i < kHidden; ++i) m.w3(i) = p(o++);
  m.b3 = p(o);
  return m;
}

bool NeuralOutputModel::AllFinite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() &&
         b2.allFinite() && w3.allFinite() && std::isfinite(b3);
}

double NnForward(const NeuralOutputModel& m, const Eigen::Vector2d& xi) {
  const Hidden h1 = Activate(m.w1 * xi + m.b1);
  const Hidden h2 = Activate(m.w2 * h1 + m.b2);
  return m.w3.dot(h2) + m.b3;
}

Eigen::RowVector2d NnJacobian(const NeuralOutputModel& model,
                              const Eigen::Vector2d& xi, double eps) {
  Eigen::RowVector2d c;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d plus = xi;
    Eigen::Vector2d minus = xi;
    plus(i) += eps;
    minus(i) -= eps;
    c(i) = (NnForward(model, plus) - NnForward(model, minus)) / (2.0 * eps);
  }
  return c;
}

double NeuralOutput::Evaluate(const Eigen::VectorXd& xi) const {
  return NnForward(model_, Eigen::Vector2d(xi(0), xi(1)));
}

Eigen::RowVectorXd NeuralOutput::Jacobian(const Eigen::VectorXd& xi) const {
  return NnJacobian(model_, Eigen::Vector2d(xi(0), xi(1)), eps_);
}

DatasetSplit SplitIndices(std::size_t n, unsigned long long seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(0.70 * n));
  const auto n_val = static_cast<std::size_t>(std::llround(0.15 * n));
  DatasetSplit split;
  split.train.assign(perm.begin(), perm.begin() + n_train);
  split.validation.assign(perm.begin() + n_train,
                          perm.begin() + n_train + n_val);
  split.test.assign(perm.begin() + n_train + n_val, perm.end());
  return split;
}

TrainingDataset GenerateDataset(const SurrogateConfig& surrogate,
                                const DatasetSpec& spec,
                                unsigned long long seed) {
  if (spec.samples < 3) {
    throw ConfigurationError("nn.dataset.samples must be >= 3");
  }
  if (!(spec.v_max > spec.v_min) || !(spec.p_max > spec.p_min)) {
    throw ConfigurationError("nn.dataset ranges must satisfy v_min < v_max and p_min < p_max");
  }
  const std::size_t n = spec.samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // One stratified coordinate per axis, strata shuffled independently.
  auto strata = [&](double lo, double hi) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double cell = (static_cast<double>(order[i]) + unit(rng)) / n;
      out[i] = lo + (hi - lo) * cell;
    }
    return out;
  };
  const std::vector<double> v = strata(spec.v_min, spec.v_max);
  const std::vector<double> p = strata(spec.p_min, spec.p_max);

  TrainingDataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(n), 2);
  ds.targets.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    ds.inputs(r, 0) = v[i];
    ds.inputs(r, 1) = p[i];
    ds.targets(r) = TruthThrust(surrogate, PlantState{v[i], p[i]});
  }
  ds.split = SplitIndices(n, seed);
  return ds;
}

NeuralOutputModel InitializeModel(unsigned long long seed, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-range, range);
  Eigen::VectorXd p(NeuralOutputModel::kParameterCount);
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = dist(rng);
  return NeuralOutputModel::Unflatten(p);
}

double MeanSquaredError(const NeuralOutputModel& model,
                        const TrainingDataset& dataset,
                        const std::vector<std::size_t>& rows) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t r : rows) {
    const auto i = static_cast<Eigen::Index>(r);
    const double e =
        NnForward(model, dataset.inputs.row(i).transpose()) - dataset.targets(i);
    sum += e * e;
  }
  return sum / static_cast<double>(rows.size());
}

TrainResult NnTrain(const TrainingDataset& dataset, unsigned long long seed,
                    const TrainOptions& options) {
  const std::size_t n = dataset.size();
  if (n == 0 || dataset.inputs.rows() != static_cast<Eigen::Index>(n)) {
    throw Error(ErrorKind::kTraining, "dataset is empty or malformed");
  }
  if ((dataset.inputs.rowwise() - dataset.inputs.row(0)).cwiseAbs().maxCoeff() ==
      0.0) {
    throw Error(ErrorKind::kTraining,
                "dataset is degenerate: all inputs are identical");
  }
  const auto& train = dataset.split.train;
  if (train.empty()) {
    throw Error(ErrorKind::kTraining, "training partition is empty");
  }
  for (const auto* part : {&dataset.split.train, &dataset.split.validation,
                           &dataset.split.test}) {
    for (std::size_t r : *part) {
      if (r >= n) throw Error(ErrorKind::kTraining, "split index out of range");
    }
  }

  // Train on min-max scaled copies; errors are reported in raw units.
  Eigen::VectorXd train_v(train.size()), train_p(train.size()),
      train_t(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(train[i]);
    const auto j = static_cast<Eigen::Index>(i);
    train_v(j) = dataset.inputs(r, 0);
    train_p(j) = dataset.inputs(r, 1);
    train_t(j) = dataset.targets(r);
  }
  const MinMax v_scale = MinMax::Fit(train_v);
  const MinMax p_scale = MinMax::Fit(train_p);
  const MinMax t_scale = MinMax::Fit(train_t);
  TrainingDataset scaled = dataset;
  scaled.inputs.col(0) =
      (dataset.inputs.col(0).array() - v_scale.center) / v_scale.half_range;
  scaled.inputs.col(1) =
      (dataset.inputs.col(1).array() - p_scale.center) / p_scale.half_range;
  scaled.targets =
      (dataset.targets.array() - t_scale.center) / t_scale.half_range;
  const double mse_unit = t_scale.half_range * t_scale.half_range;

  constexpr int kP = NeuralOutputModel::kParameterCount;
  const auto m = static_cast<Eigen::Index>(train.size());
  Eigen::VectorXd params = InitializeModel(seed, options.init_range).Flatten();

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> jac(m, kP);
  Eigen::VectorXd residual(m);
  auto linearize = [&](const Eigen::VectorXd& p) {
    const NeuralOutputModel model = NeuralOutputModel::Unflatten(p);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto r = static_cast<Eigen::Index>(train[static_cast<std::size_t>(i)]);
      residual(i) = ForwardWithGradient(model, scaled.inputs.row(r).transpose(),
                                        jac.row(i)) -
                    scaled.targets(r);
    }
  };
  auto train_mse = [&](const Eigen::VectorXd& p) {
    return MeanSquaredError(NeuralOutputModel::Unflatten(p), scaled, train);
  };

  TrainResult result;
  auto record = [&](int epoch, const Eigen::VectorXd& p, double mu) {
    const NeuralOutputModel model = NeuralOutputModel::Unflatten(p);
    EpochStats s;
    s.epoch = epoch;
    s.train_mse = mse_unit * MeanSquaredError(model, scaled, train);
    s.validation_mse =
        mse_unit * MeanSquaredError(model, scaled, scaled.split.validation);
    s.test_mse = mse_unit * MeanSquaredError(model, scaled, scaled.split.test);
    s.mu = mu;
    if (!std::isfinite(s.train_mse) || !std::isfinite(s.validation_mse)) {
      throw NumericalError("training loss is not finite at epoch " +
                           std::to_string(epoch));
    }
    result.history.push_back(s);
    return s;
  };

  const bool has_validation = !dataset.split.validation.empty();
  double mu = options.mu_init;
  EpochStats first = record(0, params, mu);
  Eigen::VectorXd best = params;
  double best_val = has_validation ? first.validation_mse : first.train_mse;
  result.best_epoch = 0;
  int since_best = 0;
  result.stop_reason = "max_epochs";

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    if (best_val <= options.target_mse) {
      result.stop_reason = "target_mse";
      break;
    }
    linearize(params);
    const double current = SubsetMse(residual);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jte = jac.transpose() * residual;

    bool accepted = false;
    while (mu <= options.mu_max) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal().array() += mu;
      const Eigen::VectorXd step = damped.ldlt().solve(-jte);
      const Eigen::VectorXd trial = params + step;
      const double trial_mse = train_mse(trial);
      if (std::isfinite(trial_mse) && trial_mse < current) {
        params = trial;
        mu *= options.mu_decrease;
        accepted = true;
        break;
      }
      mu *= options.mu_increase;
    }
    if (!accepted) {
      result.stop_reason = "mu_max";
      break;
    }

    const EpochStats s = record(epoch, params, mu);
    const double monitored = has_validation ? s.validation_mse : s.train_mse;
    if (monitored < best_val) {
      best_val = monitored;
      best = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= options.patience) {
      result.stop_reason = "validation_patience";
      break;
    }
  }

  result.model = FoldScaling(NeuralOutputModel::Unflatten(best), v_scale,
                             p_scale, t_scale);
  result.best_validation_mse = best_val;
  return result;
}

}  // namespace dmac
