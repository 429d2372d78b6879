#include "dmac/lqi.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "dmac/error.hpp"

namespace dmac {
namespace {

// One application of the Riccati map; also returns the gain at P.
Eigen::MatrixXd RiccatiMap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const Eigen::MatrixXd& r1,
                           const Eigen::MatrixXd& r2, const Eigen::MatrixXd& p,
                           Eigen::MatrixXd* gain) {
  const Eigen::MatrixXd pa = p * a;
  const Eigen::MatrixXd s = r2 + b.transpose() * p * b;
  const Eigen::MatrixXd k = -s.ldlt().solve(b.transpose() * pa);
  if (gain != nullptr) {
    *gain = k;
  }
  // A'PA + A'PB K with K = -(S^{-1} B'PA).
  Eigen::MatrixXd next = a.transpose() * pa + (pa.transpose() * b) * k + r1;
  return 0.5 * (next + next.transpose());
}

void CheckSquare(const Eigen::MatrixXd& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << name << " must be " << n << "x" << n << ", got " << m.rows() << "x"
       << m.cols();
    throw ConfigurationError(os.str());
  }
}

}  // namespace

AugmentedSystem BuildAugmented(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& b,
                               const Eigen::MatrixXd& c) {
  const auto l_xi = a.rows();
  if (a.cols() != l_xi || b.rows() != l_xi || c.cols() != l_xi ||
      b.cols() == 0 || c.rows() == 0) {
    std::ostringstream os;
    os << "augmented system: inconsistent dimensions A " << a.rows() << "x"
       << a.cols() << ", B " << b.rows() << "x" << b.cols() << ", C "
       << c.rows() << "x" << c.cols();
    throw ConfigurationError(os.str());
  }
  const auto l_y = c.rows();
  const auto l_u = b.cols();

  AugmentedSystem sys;
  sys.state_dim = static_cast<int>(l_xi);
  sys.output_dim = static_cast<int>(l_y);
  sys.a_aug = Eigen::MatrixXd::Zero(l_xi + l_y, l_xi + l_y);
  sys.a_aug.topLeftCorner(l_xi, l_xi) = a;
  sys.a_aug.bottomLeftCorner(l_y, l_xi) = -c;
  sys.a_aug.bottomRightCorner(l_y, l_y).setIdentity();
  sys.b_aug = Eigen::MatrixXd::Zero(l_xi + l_y, l_u);
  sys.b_aug.topRows(l_xi) = b;
  return sys;
}

double RiccatiResidual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                       const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r2,
                       const Eigen::MatrixXd& p) {
  return (p - RiccatiMap(a, b, r1, r2, p, nullptr)).norm();
}

RiccatiSolution SolveRiccati(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             const Eigen::MatrixXd& r1,
                             const Eigen::MatrixXd& r2,
                             const std::optional<Eigen::MatrixXd>& p_warm,
                             const DareOptions& options) {
  const auto n = a.rows();
  CheckSquare(a, n, "A");
  CheckSquare(r1, n, "R1");
  CheckSquare(r2, b.cols(), "R2");
  if (b.rows() != n) {
    throw ConfigurationError("B row count must match A");
  }

  RiccatiSolution sol;
  sol.p = p_warm.has_value() ? *p_warm : r1;
  CheckSquare(sol.p, n, "warm start");

  for (int it = 0; it < options.max_iter; ++it) {
    Eigen::MatrixXd next = RiccatiMap(a, b, r1, r2, sol.p, nullptr);
    if (!next.allFinite()) {
      throw NumericalError("Riccati iteration produced a non-finite iterate");
    }
    const double step = (next - sol.p).norm();
    const double scale = 1.0 + sol.p.norm();
    sol.p = std::move(next);
    sol.iterations = it + 1;
    if (step < options.tol * scale) {
      sol.converged = true;
      break;
    }
  }

  Eigen::MatrixXd image = RiccatiMap(a, b, r1, r2, sol.p, &sol.k);
  sol.residual = (sol.p - image).norm();
  if (!sol.k.allFinite()) {
    throw NumericalError("Riccati gain is not finite");
  }
  return sol;
}

GainSet GainSet::Zero(int l_xi, int l_y, int l_u) {
  GainSet g;
  g.k_xi = Eigen::MatrixXd::Zero(l_u, l_xi);
  g.k_q = Eigen::MatrixXd::Zero(l_u, l_y);
  g.riccati_p = Eigen::MatrixXd::Zero(l_xi + l_y, l_xi + l_y);
  return g;
}

GainSet SolveDare(const AugmentedSystem& sys, const Eigen::MatrixXd& r1,
                  const Eigen::MatrixXd& r2,
                  const std::optional<Eigen::MatrixXd>& p_warm,
                  const DareOptions& options) {
  RiccatiSolution sol =
      SolveRiccati(sys.a_aug, sys.b_aug, r1, r2, p_warm, options);
  GainSet g;
  g.k_xi = sol.k.leftCols(sys.state_dim);
  g.k_q = sol.k.rightCols(sys.output_dim);
  g.riccati_p = std::move(sol.p);
  g.residual = sol.residual;
  g.iterations = sol.iterations;
  g.converged = sol.converged;
  return g;
}

double ClosedLoopSpectralRadius(const AugmentedSystem& sys,
                                const GainSet& gains) {
  Eigen::MatrixXd k(gains.k_xi.rows(), gains.k_xi.cols() + gains.k_q.cols());
  k << gains.k_xi, gains.k_q;
  const Eigen::MatrixXd closed = sys.a_aug + sys.b_aug * k;
  return Eigen::EigenSolver<Eigen::MatrixXd>(closed, false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace dmac
