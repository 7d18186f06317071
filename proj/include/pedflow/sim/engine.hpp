#ifndef PEDFLOW_SIM_ENGINE_HPP
#define PEDFLOW_SIM_ENGINE_HPP

#include <Eigen/Core>

#include <map>
#include <optional>
#include <vector>

#include "pedflow/atxy.hpp"
#include "pedflow/sim/params.hpp"

namespace pedflow::sim {

/// Walking direction: `up` heads toward +Y, `down` toward -Y.
enum class Group { up, down };

struct PedestrianState {
  PedId id = 0;
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  double vmax = 1.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  Eigen::Vector2d destination = Eigen::Vector2d::Zero();
  Group group = Group::up;
  bool elderly = false;
  bool active = true;
  std::optional<Frame> t_enter_trap;
  std::optional<Frame> t_exit_trap;
};

struct StepDiagnostics {
  Frame t = 0;
  int active = 0;
  int overlap_count = 0;
  int pushback_count = 0;
  /// Largest |a| applied and largest |v| - vmax over pedestrians moved this step.
  double max_accel = 0.0;
  double max_speed_excess = -1.0;
};

struct World {
  std::vector<PedestrianState> peds;
  Frame t = 0;
};

/// Places all pedestrians in the generators at t = 0. Each pedestrian draws
/// from its own random stream keyed by (seed, id). Throws CapacityError when
/// a body disk cannot be placed without overlap in 10,000 attempts.
std::vector<PedestrianState> generate_pedestrians(const SimParams& params);

/// Advances the world by one synchronous Euler step.
StepDiagnostics step(World& world, const SimParams& params);

/// Push-back threshold on the velocity component toward the destination.
inline constexpr double kPushbackSpeed = -0.05;

struct RunResult {
  AtxyDatabase trap_db;
  AtxyDatabase full_db;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<PedestrianState> final_states;
  /// True when t_max stopped the run with pedestrians still walking.
  bool truncated = false;

  std::map<PedId, double> vmax_map() const;
  std::map<PedId, Group> group_map() const;
};

RunResult run(const SimParams& params);
/// Runs from caller-supplied initial states instead of generating them.
RunResult run(const SimParams& params, std::vector<PedestrianState> initial);

/// Pooled overlap and push-back rates (events per active pedestrian-step)
/// over steps at or after `after_seconds`.
struct HealthRates {
  double overlap_rate = 0.0;
  double pushback_rate = 0.0;
};
HealthRates health_rates(const std::vector<StepDiagnostics>& diags, double dt,
                         double after_seconds = 5.0);

}  // namespace pedflow::sim

#endif  // PEDFLOW_SIM_ENGINE_HPP
