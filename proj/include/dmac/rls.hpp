#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Dense>

namespace dmac {

/// Stacked regressor phi = [xi; u].
struct Regressor {
  Eigen::VectorXd xi;
  Eigen::VectorXd u;

  Eigen::VectorXd Stacked() const;
};

/// Recursive least-squares estimate of Theta = [A B] for
/// xi_{k+1} ~= A xi_k + B u_k, with geometric forgetting and a
/// regularizer R_Theta that sets the initial covariance.
struct EstimatorState {
  Eigen::MatrixXd theta;    // l_xi x (l_xi + l_u)
  Eigen::MatrixXd cov;      // (l_xi + l_u) square, symmetric positive definite
  double lambda = 1.0;      // forgetting factor in (0, 1]
  Eigen::MatrixXd r_theta;  // regularizer
  std::size_t step_count = 0;

  int state_dim() const { return static_cast<int>(theta.rows()); }
  int input_dim() const {
    return static_cast<int>(theta.cols() - theta.rows());
  }
};

/// Theta = 0, cov = R_Theta^{-1}. Throws a configuration error when
/// r_theta is not symmetric positive definite or lambda is outside (0, 1].
EstimatorState EstimatorInit(int l_xi, int l_u, const Eigen::MatrixXd& r_theta,
                             double lambda);

/// One recursive step using the newest measurement xi_k and the previous
/// regressor phi_{k-1}:
///
///   gamma_k = lambda + phi' P_{k-1} phi
///   P_k     = (P_{k-1} - P_{k-1} phi gamma_k^{-1} phi' P_{k-1}) / lambda
///   Theta_k = Theta_{k-1} + (xi_k - Theta_{k-1} phi) phi' P_k
///
/// P_k is re-symmetrized afterwards. Throws a numerical error (tagged with
/// the step index) on gamma_k <= 0 or a non-finite result.
EstimatorState EstimatorUpdate(const EstimatorState& state,
                               const Eigen::VectorXd& xi_next,
                               const Eigen::VectorXd& phi_prev);

inline EstimatorState EstimatorUpdate(const EstimatorState& state,
                                      const Eigen::VectorXd& xi_next,
                                      const Regressor& phi_prev) {
  return EstimatorUpdate(state, xi_next, phi_prev.Stacked());
}

/// Splits Theta into (A, B) at column l_xi.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ExtractAB(
    const EstimatorState& state);

/// True when the largest covariance eigenvalue exceeds `ceiling`, which
/// signals windup under weak excitation.
bool CovarianceWindup(const EstimatorState& state, double ceiling = 1e6);

}  // namespace dmac
