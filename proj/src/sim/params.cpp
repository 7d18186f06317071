#include "pedflow/sim/params.hpp"

#include <cmath>
#include <string>

#include "pedflow/errors.hpp"

namespace pedflow::sim {

std::string_view to_string(Scenario s) {
  return s == Scenario::segregated ? "segregated" : "mixed";
}

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("invalid parameter: ") + what);
}
bool positive(double v) { return std::isfinite(v) && v > 0.0; }
}  // namespace

void SimParams::validate() const {
  require(positive(mass), "mass must be > 0");
  require(positive(alpha), "alpha must be > 0");
  require(positive(beta), "beta must be > 0");
  require(std::isfinite(chi) && chi != 0.0, "chi must be non-zero");
  require(positive(body_diameter), "body_diameter must be > 0");
  require(positive(influence_diameter), "influence_diameter must be > 0");
  require(positive(vmax_mean), "vmax_mean must be > 0");
  require(std::isfinite(vmax_std) && vmax_std >= 0.0, "vmax_std must be >= 0");
  require(positive(a_max), "a_max must be > 0");
  require(positive(sight_distance), "sight_distance must be > 0");
  require(elderly_fraction >= 0.0 && elderly_fraction <= 1.0, "elderly_fraction must be in [0,1]");
  require(positive(elderly_vmax), "elderly_vmax must be > 0");
  require(trap.xmin < trap.xmax && trap.ymin < trap.ymax, "trap needs xmin < xmax and ymin < ymax");
  require(n_ways == 1 || n_ways == 2, "n_ways must be 1 or 2");
  require(positive(generator_distance), "generator_distance must be > 0");
  require(positive(generator_depth), "generator_depth must be > 0");
  require(generator_spread_mean_pct >= 0.0 && generator_spread_mean_pct <= 100.0,
          "generator_spread_mean_pct must be in [0,100]");
  require(std::isfinite(generator_spread_std_pct) && generator_spread_std_pct >= 0.0,
          "generator_spread_std_pct must be >= 0");
  require(positive(dt) && dt <= 1.0, "dt must be in (0,1]");
  require(n_pedestrians >= 0, "n_pedestrians must be >= 0");
  require(positive(t_max), "t_max must be > 0");
  require(positive(destination_radius), "destination_radius must be > 0");
  require(decimation >= 1, "decimation must be >= 1");
}

}  // namespace pedflow::sim
