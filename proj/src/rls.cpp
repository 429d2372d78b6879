#include "dmac/rls.hpp"

#include <sstream>

#include "dmac/error.hpp"

namespace dmac {

Eigen::VectorXd Regressor::Stacked() const {
  Eigen::VectorXd phi(xi.size() + u.size());
  phi << xi, u;
  return phi;
}

EstimatorState EstimatorInit(int l_xi, int l_u, const Eigen::MatrixXd& r_theta,
                             double lambda) {
  if (l_xi <= 0 || l_u <= 0) {
    throw ConfigurationError("estimator dimensions must be positive");
  }
  const int n = l_xi + l_u;
  if (r_theta.rows() != n || r_theta.cols() != n) {
    std::ostringstream os;
    os << "r_theta must be " << n << "x" << n << ", got " << r_theta.rows()
       << "x" << r_theta.cols();
    throw ConfigurationError(os.str());
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    std::ostringstream os;
    os << "lambda must lie in (0, 1], got " << lambda;
    throw ConfigurationError(os.str());
  }
  if (!r_theta.allFinite() || !r_theta.isApprox(r_theta.transpose(), 1e-12)) {
    throw ConfigurationError("r_theta must be symmetric and finite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(r_theta);
  if (llt.info() != Eigen::Success) {
    throw ConfigurationError("r_theta must be positive definite");
  }

  EstimatorState state;
  state.theta = Eigen::MatrixXd::Zero(l_xi, n);
  // Diagonal regularizers invert exactly; everything else goes through LLT.
  if (r_theta.isDiagonal(0.0)) {
    state.cov = r_theta.diagonal().cwiseInverse().asDiagonal();
  } else {
    state.cov = llt.solve(Eigen::MatrixXd::Identity(n, n));
    state.cov = 0.5 * (state.cov + state.cov.transpose());
  }
  state.lambda = lambda;
  state.r_theta = r_theta;
  state.step_count = 0;
  return state;
}

EstimatorState EstimatorUpdate(const EstimatorState& state,
                               const Eigen::VectorXd& xi_next,
                               const Eigen::VectorXd& phi_prev) {
  const auto n = state.theta.cols();
  if (phi_prev.size() != n || xi_next.size() != state.theta.rows()) {
    throw ConfigurationError("estimator update: dimension mismatch");
  }
  const std::size_t k = state.step_count + 1;
  if (!xi_next.allFinite() || !phi_prev.allFinite()) {
    throw NumericalError("estimator update: non-finite input", k);
  }

  const Eigen::VectorXd p_phi = state.cov * phi_prev;
  const double gamma = state.lambda + phi_prev.dot(p_phi);
  if (!(gamma > 0.0)) {
    throw NumericalError("estimator update: gamma is not positive", k);
  }

  EstimatorState next = state;
  next.cov = (state.cov - p_phi * p_phi.transpose() / gamma) / state.lambda;
  next.cov = 0.5 * (next.cov + next.cov.transpose());

  const Eigen::VectorXd residual = xi_next - state.theta * phi_prev;
  next.theta = state.theta + residual * (phi_prev.transpose() * next.cov);
  next.step_count = k;

  if (!next.theta.allFinite() || !next.cov.allFinite()) {
    throw NumericalError("estimator update: non-finite estimate", k);
  }
  return next;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ExtractAB(
    const EstimatorState& state) {
  const int l_xi = state.state_dim();
  const int l_u = state.input_dim();
  return {state.theta.leftCols(l_xi), state.theta.rightCols(l_u)};
}

bool CovarianceWindup(const EstimatorState& state, double ceiling) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.cov,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff() > ceiling;
}

}  // namespace dmac
