#ifndef PEDFLOW_SIM_PARAMS_HPP
#define PEDFLOW_SIM_PARAMS_HPP

#include <cstdint>
#include <string_view>

#include "pedflow/atxy.hpp"

namespace pedflow::sim {

enum class Scenario { mixed, segregated };

std::string_view to_string(Scenario s);

/// Simulation parameters. Defaults are the calibrated reference set.
struct SimParams {
  // forces
  double mass = 0.750;   // seconds
  double alpha = 0.205;
  double beta = 0.001;   // metres
  double chi = 0.250;

  // pedestrian
  double body_diameter = 0.60;
  double influence_diameter = 1.67;
  double vmax_mean = 1.775;
  double vmax_std = 0.30;
  double a_max = 1.750;
  double sight_distance = 4.0;
  double elderly_fraction = 0.0;
  double elderly_vmax = 0.84;

  // world
  TrapRect trap{0.0, 0.0, 12.0, 32.0};
  int n_ways = 2;
  double generator_distance = 21.0;
  /// Longitudinal extent of each generator rectangle.
  double generator_depth = 40.0;
  double generator_spread_mean_pct = 50.0;
  double generator_spread_std_pct = 10.0;
  Scenario scenario = Scenario::mixed;

  // run
  double dt = 1.0 / 15.0;
  int n_pedestrians = 300;
  std::uint64_t seed = 0;
  double t_max = 300.0;
  double destination_radius = 0.835;
  int decimation = 1;

  double influence_radius() const { return 0.5 * influence_diameter; }
  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

}  // namespace pedflow::sim

#endif  // PEDFLOW_SIM_PARAMS_HPP
