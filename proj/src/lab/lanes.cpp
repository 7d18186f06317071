#include "pedflow/lab/lanes.hpp"

#include <algorithm>

#include "pedflow/errors.hpp"
#include "pedflow/metrics/flow.hpp"

namespace pedflow::lab {

std::vector<LaneReport> lane_formation_report(const AtxyDatabase& db,
                                              const std::map<PedId, int>& groups, double gap,
                                              Frame every) {
  if (!(gap > 0.0)) throw DomainError("lane gap must be positive");
  if (every < 1) throw DomainError("lane sampling interval must be >= 1");
  std::vector<LaneReport> out;
  if (db.empty()) return out;
  const Frame first = *db.first_frame();

  std::map<Frame, std::map<int, std::vector<double>>> xs;
  for (const AtxyRecord& r : db.records()) {
    if ((r.t - first) % every != 0) continue;
    const auto g = groups.find(r.ped_id);
    if (g == groups.end()) continue;
    xs[r.t][g->second].push_back(r.x);
  }
  for (auto& [t, by_group] : xs) {
    for (auto& [group, x] : by_group) {
      std::sort(x.begin(), x.end());
      int lanes = 1;
      double width_sum = 0.0;
      double lane_start = x.front();
      for (std::size_t i = 1; i < x.size(); ++i) {
        if (x[i] - x[i - 1] > gap) {
          width_sum += x[i - 1] - lane_start;
          lane_start = x[i];
          ++lanes;
        }
      }
      width_sum += x.back() - lane_start;
      out.push_back({t, group, lanes, width_sum / lanes});
    }
  }
  return out;
}

std::map<PedId, int> infer_groups(const AtxyDatabase& db) {
  std::map<PedId, int> out;
  for (const auto& [id, dir] : metrics::infer_directions(db)) out[id] = dir.y() > 0.0 ? 1 : -1;
  return out;
}

}  // namespace pedflow::lab
