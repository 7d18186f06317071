#ifndef PEDFLOW_AFFINE_HPP
#define PEDFLOW_AFFINE_HPP

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace pedflow {

/// Image to world map X = u + v·Xi + w·Yi, Y = x0 + y0·Xi + z0·Yi.
/// Rows of `coef` hold (u, v, w) and (x0, y0, z0).
struct AffineModel {
  Eigen::Matrix<double, 2, 3> coef = (Eigen::Matrix<double, 2, 3>() << 0, 1, 0, 0, 0, 1).finished();
  double r2_x = 1.0;
  double r2_y = 1.0;
  Eigen::Matrix<double, 2, 3> t_stats = Eigen::Matrix<double, 2, 3>::Zero();
  Eigen::Matrix<double, 2, 3> std_errors = Eigen::Matrix<double, 2, 3>::Zero();
};

/// Image point first, world point second.
using AffinePair = std::pair<Eigen::Vector2d, Eigen::Vector2d>;

/// Per-coordinate OLS. Needs at least four non-collinear image points.
AffineModel fit_affine(const std::vector<AffinePair>& pairs);

inline Eigen::Vector2d apply_affine(const AffineModel& m, const Eigen::Vector2d& image) {
  return m.coef * Eigen::Vector3d(1.0, image.x(), image.y());
}

}  // namespace pedflow

#endif  // PEDFLOW_AFFINE_HPP
