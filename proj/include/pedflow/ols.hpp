#ifndef PEDFLOW_OLS_HPP
#define PEDFLOW_OLS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "pedflow/errors.hpp"

namespace pedflow {

/// Ordinary least squares fit of y = X·beta.
template <typename Scalar>
struct OlsResult {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector beta;
  Vector std_error;
  Vector t_stat;
  Vector residuals;
  Scalar r2 = std::numeric_limits<Scalar>::quiet_NaN();
  Eigen::Index dof = 0;
};

/// Column-pivoted QR solve with standard errors from sigma² = RSS/(n − p).
/// r2 is NaN when y has zero variance. Throws RankDeficiencyError when X is
/// rank deficient or has no residual degrees of freedom.
template <typename DerivedX, typename DerivedY>
OlsResult<typename DerivedX::Scalar> ols(const Eigen::MatrixBase<DerivedX>& X,
                                         const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw RankDeficiencyError("design and response sizes differ");
  if (n <= p) throw RankDeficiencyError("need more observations than coefficients");

  const Eigen::ColPivHouseholderQR<Matrix> qr(X);
  if (qr.rank() < p) throw RankDeficiencyError("design matrix is rank deficient");

  OlsResult<Scalar> out;
  out.beta = qr.solve(y);
  out.residuals = y - X * out.beta;
  out.dof = n - p;

  const Scalar rss = out.residuals.squaredNorm();
  const Scalar sigma2 = rss / Scalar(out.dof);
  const Matrix xtx_inv = (X.transpose() * X).inverse();
  out.std_error = (sigma2 * xtx_inv.diagonal().array()).sqrt().matrix();
  out.t_stat = out.beta.array() / out.std_error.array();

  const Scalar sst = (y.array() - y.mean()).square().sum();
  if (sst > Scalar(0)) out.r2 = Scalar(1) - rss / sst;
  return out;
}

}  // namespace pedflow

#endif  // PEDFLOW_OLS_HPP
