#ifndef PEDFLOW_TRACKER_TRACKER_HPP
#define PEDFLOW_TRACKER_TRACKER_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedflow/atxy.hpp"

namespace pedflow::tracker {

using ObjectId = std::int64_t;

/// Any feature equal to this value is missing.
inline constexpr double kMissing = -1.0;

/// Feature row of one detected object in one slice.
struct DescriptorRow {
  Frame slice = 0;
  int slot = 0;  ///< 1-based ordinal within the slice
  std::vector<double> features;
  std::optional<ObjectId> object_id;
  bool interpolated = false;
};

/// Rows plus the feature layout they share.
struct DescriptorTable {
  std::vector<std::string> feature_names;
  std::size_t x_index = 0;
  std::size_t y_index = 1;
  std::vector<DescriptorRow> rows;

  /// Throws IntegrityError on ragged rows, bad xy indices, non-finite
  /// features, or a repeated (slice, slot).
  void validate() const;
};

/// Header `slice,slot,<feature names>`; the X and Y columns are located by name.
DescriptorTable read_descriptors(std::istream& in);
DescriptorTable read_descriptors_file(const std::string& path);
void write_descriptors(std::ostream& out, const DescriptorTable& table);

/// How the distance threshold scales with tracing depth k.
enum class DepthRule {
  shrinking,  ///< distance·k < threshold
  growing,    ///< distance < threshold·k
};

struct TrackerParams {
  int n = 3;  ///< maximum searching depth
  double distance_threshold = 1.0;
  DepthRule depth_rule = DepthRule::shrinking;
  double similarity_threshold = 0.8;
  /// Features entering the similarity index; empty means every non-xy feature.
  std::vector<std::size_t> similarity_features;
  double dt = 1.0 / 15.0;
  int min_rows = 5;
  double min_motion_index = 0.7;

  /// Throws ConfigError unless n > 1, the thresholds are in range and dt > 0.
  void validate() const;
};

/// Similarity index over the chosen features, or nullopt when every feature
/// is skipped. Throws DomainError on mismatched layouts.
std::optional<double> similarity_index(const DescriptorRow& base, const DescriptorRow& cand,
                                       const std::vector<std::size_t>& features);

/// Index into `rows` of the matched candidate for `base` at tracing depth
/// `depth`, or nullopt.
std::optional<std::size_t> match_in_frame(const DescriptorRow& base,
                                          const std::vector<const DescriptorRow*>& rows,
                                          int depth, const TrackerParams& params,
                                          const DescriptorTable& layout);

enum class EventKind { enter, exit, continue_, occlusion_bridged };
const char* to_string(EventKind kind);

struct TrackEvent {
  EventKind kind = EventKind::enter;
  ObjectId object_id = 0;
  Frame first = 0;
  Frame last = 0;
};

struct TraceResult {
  /// The input rows in input order with object ids set, followed by the
  /// rows synthesized across occlusions.
  DescriptorTable table;
  std::vector<TrackEvent> events;
};

/// Forward tracing over the slices of `table`.
TraceResult trace(const DescriptorTable& table, const TrackerParams& params);

struct MotionConstants {
  double c1 = 0.02564664719377529;  ///< -ln(0.95)/2
  double c2 = 0.055613;
};

/// exp(-c1·delta/d1 - c2·(delta/d2)·tan(beta/2)): 0 when d1 or d2 is 0,
/// 1 when delta is 0. `beta` in radians.
double motion_score(double delta, double d1, double d2, double beta, const MotionConstants& k = {});

/// Smoothness of the step 2 -> 3 given the step 1 -> 2, in [0, 1].
double motion_index(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                    const Eigen::Vector2d& p3, const MotionConstants& k = {});

struct RecognitionResult {
  AtxyDatabase db;
  /// Traced object id -> pedestrian id for the kept tracks.
  std::map<ObjectId, PedId> renumbered;
  /// Mean motion index of every track long enough to score.
  std::map<ObjectId, double> mean_motion_index;
};

/// Keeps tracks with at least `min_rows` rows and a mean motion index of at
/// least `min_motion_index`, renumbered from 1 in object id order.
RecognitionResult recognize(const DescriptorTable& labeled, const TrackerParams& params,
                            const MotionConstants& k = {});

struct Occlusion {
  PedId ped_id = 0;
  Frame first = 0;
  Frame last = 0;
};

struct SynthOptions {
  double noise_sigma = 0.0;
  std::vector<Occlusion> occlusions;
  int clutter = 0;
  int clutter_length = 3;
  std::uint64_t seed = 0;
};

struct SynthResult {
  DescriptorTable table;
  /// Truth pedestrian of each row, 0 for clutter.
  std::vector<PedId> truth;
};

/// Descriptor rows (X, Y, area, perimeter) for every truth record, minus the
/// occluded ranges, plus static jittery clutter. Each pedestrian keeps its
/// own body size; slots are shuffled per slice.
SynthResult synthesize_descriptors(const AtxyDatabase& truth, const SynthOptions& options);

}  // namespace pedflow::tracker

#endif  // PEDFLOW_TRACKER_TRACKER_HPP
