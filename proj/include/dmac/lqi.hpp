#pragma once

#include <optional>

#include <Eigen/Dense>

namespace dmac {

/// Plant (A, B, C) augmented with the tracking-error integrator
/// q_{k+1} = q_k + r_k - C xi_k:
///
///   a_aug = [ A  0 ]    b_aug = [ B ]
///           [-C  I ]            [ 0 ]
///
/// The reference feedthrough is left out; it does not change the gain.
struct AugmentedSystem {
  Eigen::MatrixXd a_aug;
  Eigen::MatrixXd b_aug;
  int state_dim = 0;   // l_xi
  int output_dim = 0;  // l_y
};

AugmentedSystem BuildAugmented(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& b,
                               const Eigen::MatrixXd& c);

struct DareOptions {
  int max_iter = 10000;
  double tol = 1e-12;
};

/// Fixed-point iterate of P <- A'PA - A'PB (R2 + B'PB)^{-1} B'PA + R1 and
/// the gain K = -(R2 + B'PB)^{-1} B'PA, so that u = K x.
struct RiccatiSolution {
  Eigen::MatrixXd p;
  Eigen::MatrixXd k;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Solves the DARE by fixed-point iteration starting at `p_warm` (or R1).
/// Non-convergence is reported through `converged`, not thrown; a
/// non-finite iterate throws a numerical error.
RiccatiSolution SolveRiccati(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const Eigen::MatrixXd& r1,
                             const Eigen::MatrixXd& r2,
                             const std::optional<Eigen::MatrixXd>& p_warm = {},
                             const DareOptions& options = {});

/// ||P - Ric(P)||_F for the Riccati map Ric above.
double RiccatiResidual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2,
                       const Eigen::MatrixXd& p);

/// Time-varying LQI gains; u = k_xi xi + k_q q.
struct GainSet {
  Eigen::MatrixXd k_xi;  // l_u x l_xi
  Eigen::MatrixXd k_q;   // l_u x l_y
  Eigen::MatrixXd riccati_p;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  static GainSet Zero(int l_xi, int l_y, int l_u);
};

GainSet SolveDare(const AugmentedSystem& sys, const Eigen::MatrixXd& r1,
                  const Eigen::MatrixXd& r2,
                  const std::optional<Eigen::MatrixXd>& p_warm = {},
                  const DareOptions& options = {});

/// Spectral radius of a_aug + b_aug [k_xi k_q].
double ClosedLoopSpectralRadius(const AugmentedSystem& sys,
                                const GainSet& gains);

}  // namespace dmac
