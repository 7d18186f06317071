#ifndef PEDFLOW_ATXY_HPP
#define PEDFLOW_ATXY_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pedflow {

using PedId = std::int64_t;
using Frame = std::int64_t;

/// One pedestrian position in one frame (world metres).
struct AtxyRecord {
  PedId ped_id = 0;
  Frame t = 0;
  double x = 0.0;
  double y = 0.0;

  Eigen::Vector2d position() const { return {x, y}; }
  friend bool operator==(const AtxyRecord&, const AtxyRecord&) = default;
};

/// Measurement rectangle. Width runs along X, length along Y (walking direction).
struct TrapRect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 12.0;
  double ymax = 32.0;

  double width() const { return xmax - xmin; }
  double length() const { return ymax - ymin; }
  double area() const { return width() * length(); }
  /// Closed containment: boundary points are inside.
  bool contains(double x, double y) const {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  }
  bool contains(const Eigen::Vector2d& p) const { return contains(p.x(), p.y()); }
  /// Throws GeometryError unless xmin < xmax and ymin < ymax.
  void validate() const;

  friend bool operator==(const TrapRect&, const TrapRect&) = default;
};

/// Contiguous run of one pedestrian's records inside an AtxyDatabase.
struct Track {
  PedId ped_id;
  std::span<const AtxyRecord> records;
};

/// Trajectory table sorted by (ped_id, t). Construction validates every invariant:
/// unique (ped_id, t), finite coordinates, positive ids, non-negative frames, dt > 0.
class AtxyDatabase {
 public:
  AtxyDatabase() = default;
  AtxyDatabase(std::vector<AtxyRecord> records, double dt_seconds,
               std::optional<TrapRect> trap = std::nullopt);

  const std::vector<AtxyRecord>& records() const { return records_; }
  double dt_seconds() const { return dt_; }
  const std::optional<TrapRect>& trap() const { return trap_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }

  /// One entry per pedestrian, in ascending id order.
  std::vector<Track> tracks() const;
  std::vector<PedId> pedestrian_ids() const;
  /// Record of `ped_id` at frame `t`, if present.
  const AtxyRecord* find(PedId ped_id, Frame t) const;
  std::optional<Frame> first_frame() const;
  std::optional<Frame> last_frame() const;

  friend bool operator==(const AtxyDatabase&, const AtxyDatabase&) = default;

 private:
  std::vector<AtxyRecord> records_;
  double dt_ = 1.0;
  std::optional<TrapRect> trap_;
};

/// Reads the text format: `# dt=<s>`, optional `# trap=xmin,ymin,xmax,ymax`,
/// then `ped_id,t,x,y` rows in any order. Other `#` lines are comments.
AtxyDatabase read_atxy(std::istream& in);
void write_atxy(const AtxyDatabase& db, std::ostream& out);

AtxyDatabase read_atxy_file(const std::string& path);
void write_atxy_file(const AtxyDatabase& db, const std::string& path);

/// Image-space quadrilateral bounding the trap. Corner naming follows the world
/// trap: a = bottom-left, b = bottom-right, c = top-left, d = top-right, so the
/// boundary is traversed a -> b -> d -> c.
struct ImageQuad {
  Eigen::Vector2d a, b, c, d;

  std::array<Eigen::Vector2d, 4> boundary() const { return {a, b, d, c}; }
  /// Signed shoelace area of the boundary polygon.
  double signed_area() const;
  /// Throws GeometryError for non-convex or zero-area quads.
  void validate() const;
  /// Closed containment by uniform-sign edge cross products.
  bool contains(const Eigen::Vector2d& p) const;
};

AtxyDatabase trim_to_trap_image(const AtxyDatabase& db, const ImageQuad& quad);
AtxyDatabase trim_to_trap_world(const AtxyDatabase& db, const TrapRect& trap);

}  // namespace pedflow

#endif  // PEDFLOW_ATXY_HPP
