#include "pedflow/affine.hpp"

#include <Eigen/Dense>

#include "pedflow/errors.hpp"
#include "pedflow/ols.hpp"

namespace pedflow {

AffineModel fit_affine(const std::vector<AffinePair>& pairs) {
  if (pairs.size() < 4) throw RankDeficiencyError("affine fit needs at least 4 point pairs");
  const auto n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::MatrixXd world(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [img, w] = pairs[static_cast<std::size_t>(i)];
    design.row(i) << 1.0, img.x(), img.y();
    world.row(i) = w.transpose();
  }

  AffineModel model;
  for (int axis = 0; axis < 2; ++axis) {
    const auto fit = ols(design, world.col(axis));
    model.coef.row(axis) = fit.beta.transpose();
    model.std_errors.row(axis) = fit.std_error.transpose();
    model.t_stats.row(axis) = fit.t_stat.transpose();
    (axis == 0 ? model.r2_x : model.r2_y) = fit.r2;
  }
  return model;
}

}  // namespace pedflow
