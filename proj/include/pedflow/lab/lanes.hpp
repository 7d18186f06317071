#ifndef PEDFLOW_LAB_LANES_HPP
#define PEDFLOW_LAB_LANES_HPP

#include <map>
#include <vector>

#include "pedflow/atxy.hpp"

namespace pedflow::lab {

struct LaneReport {
  Frame t = 0;
  int group = 0;  ///< +1 walks toward +Y, -1 toward -Y
  int lane_count = 0;
  double mean_width = 0.0;  ///< mean lateral extent of the lanes, m
};

/// Same-group pedestrians of each sampled frame clustered on X by single
/// linkage: a gap wider than `gap` metres starts a new lane. Frames are
/// sampled every `every` frames from the first one.
std::vector<LaneReport> lane_formation_report(const AtxyDatabase& db,
                                              const std::map<PedId, int>& groups, double gap,
                                              Frame every = 1);

/// Groups from the sign of each pedestrian's mean Y velocity.
std::map<PedId, int> infer_groups(const AtxyDatabase& db);

}  // namespace pedflow::lab

#endif  // PEDFLOW_LAB_LANES_HPP
