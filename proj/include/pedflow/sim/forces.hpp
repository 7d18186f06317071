#ifndef PEDFLOW_SIM_FORCES_HPP
#define PEDFLOW_SIM_FORCES_HPP

// Intended-velocity kernels. Each returns the velocity a pedestrian would
// adopt under one force alone; the engine sums them into an acceleration.

#include <Eigen/Core>

#include <cmath>

#include "pedflow/errors.hpp"

namespace pedflow::sim {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

/// (vmax/alpha) times the unit vector from p to e.
template <typename Scalar>
Vec2<Scalar> forward_velocity(const Vec2<Scalar>& p, const Vec2<Scalar>& e, Scalar vmax,
                              Scalar alpha) {
  const Vec2<Scalar> g = e - p;
  const Scalar len = g.norm();
  if (!(len > Scalar(0))) throw DomainError("forward direction undefined: position equals destination");
  return (vmax / alpha) * (g / len);
}

/// Turn-away velocity from the closest pedestrian ahead.
///
/// The local frame has x along the current velocity. Candidates lie in
/// local x in (0, sight] and |local y| < 2r; the nearest one by Euclidean
/// distance d (first column on ties) sets the magnitude vmax(2r - |y|)/(chi d).
/// The push is along local -sign(y), with y = 0 pushing toward local +y.
/// Returns zero when the actor is stationary or nobody qualifies.
template <typename Scalar, typename DerivedP>
Vec2<Scalar> repulse_away_velocity(const Vec2<Scalar>& p, const Vec2<Scalar>& v, Scalar vmax,
                                   const Eigen::MatrixBase<DerivedP>& others, Scalar chi,
                                   Scalar r, Scalar sight) {
  const Scalar speed = v.norm();
  if (!(speed > Scalar(0))) return Vec2<Scalar>::Zero();
  const Scalar c = v.x() / speed;
  const Scalar s = v.y() / speed;

  Eigen::Index best = -1;
  Scalar best_d = Scalar(0);
  Scalar best_y = Scalar(0);
  for (Eigen::Index j = 0; j < others.cols(); ++j) {
    const Vec2<Scalar> rel = others.col(j) - p;
    const Scalar lx = c * rel.x() + s * rel.y();
    const Scalar ly = -s * rel.x() + c * rel.y();
    if (!(lx > Scalar(0)) || lx > sight || !(std::abs(ly) < Scalar(2) * r)) continue;
    const Scalar d = rel.norm();
    if (best < 0 || d < best_d) {
      best = j;
      best_d = d;
      best_y = ly;
    }
  }
  if (best < 0) return Vec2<Scalar>::Zero();

  const Scalar magnitude = vmax * (Scalar(2) * r - std::abs(best_y)) / (chi * best_d);
  const Scalar side = best_y > Scalar(0) ? Scalar(-1) : Scalar(1);
  // Local (0, side*magnitude) rotated back to world coordinates.
  return side * magnitude * Vec2<Scalar>(-s, c);
}

/// Distance floor for coincident neighbours in the collision kernel.
inline constexpr double kMinSeparation = 0.01;

/// (vmax/beta) times the sum over neighbours with d < 2r of (2r/d - 1) times
/// the unit vector pointing away from the neighbour. Columns are summed in
/// order; exactly coincident points have no direction and contribute nothing.
template <typename Scalar, typename DerivedP>
Vec2<Scalar> collision_avoid_velocity(const Vec2<Scalar>& p, Scalar vmax,
                                      const Eigen::MatrixBase<DerivedP>& others, Scalar beta,
                                      Scalar r) {
  Vec2<Scalar> sum = Vec2<Scalar>::Zero();
  for (Eigen::Index j = 0; j < others.cols(); ++j) {
    const Vec2<Scalar> rel = p - others.col(j);
    const Scalar raw = rel.norm();
    if (raw == Scalar(0) || !(raw < Scalar(2) * r)) continue;
    const Scalar d = std::max(raw, Scalar(kMinSeparation));
    sum += (Scalar(2) * r / d - Scalar(1)) * (rel / raw);
  }
  return (vmax / beta) * sum;
}

/// (intended - v)/mass, scaled down to magnitude a_max when longer.
template <typename Scalar>
Vec2<Scalar> acceleration(const Vec2<Scalar>& v, const Vec2<Scalar>& intended, Scalar mass,
                          Scalar a_max) {
  Vec2<Scalar> a = (intended - v) / mass;
  const Scalar len = a.norm();
  if (len > a_max) a *= a_max / len;
  return a;
}

}  // namespace pedflow::sim

#endif  // PEDFLOW_SIM_FORCES_HPP
