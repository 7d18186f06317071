#include "pedflow/atxy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pedflow/errors.hpp"
#include "pedflow/text.hpp"

namespace pedflow {

void TrapRect::validate() const {
  if (!(xmin < xmax) || !(ymin < ymax)) {
    throw GeometryError("trap rectangle must satisfy xmin < xmax and ymin < ymax");
  }
}

AtxyDatabase::AtxyDatabase(std::vector<AtxyRecord> records, double dt_seconds,
                           std::optional<TrapRect> trap)
    : records_(std::move(records)), dt_(dt_seconds), trap_(trap) {
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw IntegrityError("dt_seconds must be positive");
  if (trap_) trap_->validate();
  std::sort(records_.begin(), records_.end(), [](const AtxyRecord& a, const AtxyRecord& b) {
    return a.ped_id != b.ped_id ? a.ped_id < b.ped_id : a.t < b.t;
  });
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.ped_id <= 0) throw IntegrityError("ped_id must be positive: " + std::to_string(r.ped_id));
    if (r.t < 0) throw IntegrityError("frame index must be non-negative");
    if (!std::isfinite(r.x) || !std::isfinite(r.y)) {
      throw IntegrityError("non-finite coordinate for ped " + std::to_string(r.ped_id));
    }
    if (i > 0 && records_[i - 1].ped_id == r.ped_id && records_[i - 1].t == r.t) {
      throw IntegrityError("duplicate record (ped_id=" + std::to_string(r.ped_id) +
                           ", t=" + std::to_string(r.t) + ")");
    }
  }
}

std::vector<Track> AtxyDatabase::tracks() const {
  std::vector<Track> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= records_.size(); ++i) {
    if (i == records_.size() || records_[i].ped_id != records_[start].ped_id) {
      out.push_back({records_[start].ped_id,
                     std::span<const AtxyRecord>(records_.data() + start, i - start)});
      start = i;
    }
  }
  return out;
}

std::vector<PedId> AtxyDatabase::pedestrian_ids() const {
  std::vector<PedId> ids;
  for (const auto& tr : tracks()) ids.push_back(tr.ped_id);
  return ids;
}

const AtxyRecord* AtxyDatabase::find(PedId ped_id, Frame t) const {
  const auto it = std::lower_bound(
      records_.begin(), records_.end(), std::pair{ped_id, t},
      [](const AtxyRecord& r, const std::pair<PedId, Frame>& key) {
        return r.ped_id != key.first ? r.ped_id < key.first : r.t < key.second;
      });
  if (it == records_.end() || it->ped_id != ped_id || it->t != t) return nullptr;
  return &*it;
}

std::optional<Frame> AtxyDatabase::first_frame() const {
  if (records_.empty()) return std::nullopt;
  return std::min_element(records_.begin(), records_.end(),
                          [](const auto& a, const auto& b) { return a.t < b.t; })
      ->t;
}

std::optional<Frame> AtxyDatabase::last_frame() const {
  if (records_.empty()) return std::nullopt;
  return std::max_element(records_.begin(), records_.end(),
                          [](const auto& a, const auto& b) { return a.t < b.t; })
      ->t;
}

AtxyDatabase read_atxy(std::istream& in) {
  std::optional<double> dt;
  std::optional<TrapRect> trap;
  std::vector<AtxyRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const auto kv = text::trim(body.substr(1));
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = text::trim(kv.substr(0, eq));
      const auto value = text::trim(kv.substr(eq + 1));
      if (key == "dt") {
        dt = text::parse_double(value);
        if (!dt || !(*dt > 0.0)) throw ParseError("invalid dt header", line_no);
      } else if (key == "trap") {
        const auto parts = text::split(value, ',');
        if (parts.size() != 4) throw ParseError("trap header needs four values", line_no);
        double v[4];
        for (int i = 0; i < 4; ++i) {
          const auto p = text::parse_double(parts[i]);
          if (!p) throw ParseError("invalid trap value", line_no);
          v[i] = *p;
        }
        trap = TrapRect{v[0], v[1], v[2], v[3]};
        try {
          trap->validate();
        } catch (const GeometryError& e) {
          throw ParseError(e.what(), line_no);
        }
      }
      continue;
    }
    const auto fields = text::split(body, ',');
    if (fields.size() != 4) throw ParseError("expected ped_id,t,x,y", line_no);
    const auto id = text::parse_int(fields[0]);
    const auto t = text::parse_int(fields[1]);
    const auto x = text::parse_double(fields[2]);
    const auto y = text::parse_double(fields[3]);
    if (!id || !t || !x || !y) throw ParseError("malformed record", line_no);
    if (*id <= 0) throw ParseError("ped_id must be positive", line_no);
    if (*t < 0) throw ParseError("frame must be non-negative", line_no);
    records.push_back({*id, *t, *x, *y});
  }
  if (!dt) throw ParseError("missing '# dt=' header", 0);
  return AtxyDatabase(std::move(records), *dt, trap);
}

void write_atxy(const AtxyDatabase& db, std::ostream& out) {
  out << "# dt=" << text::format_double(db.dt_seconds()) << '\n';
  if (const auto& trap = db.trap()) {
    out << "# trap=" << text::format_double(trap->xmin) << ',' << text::format_double(trap->ymin)
        << ',' << text::format_double(trap->xmax) << ',' << text::format_double(trap->ymax) << '\n';
  }
  for (const auto& r : db.records()) {
    out << r.ped_id << ',' << r.t << ',' << text::format_double(r.x) << ','
        << text::format_double(r.y) << '\n';
  }
  if (!out) throw std::ios_base::failure("failed writing aTXY data");
}

AtxyDatabase read_atxy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read_atxy(in);
}

void write_atxy_file(const AtxyDatabase& db, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot create " + path);
  write_atxy(db, out);
}

namespace {
double cross(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  return u.x() * v.y() - u.y() * v.x();
}
}  // namespace

double ImageQuad::signed_area() const {
  const auto pts = boundary();
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += cross(pts[i], pts[(i + 1) % 4]);
  return 0.5 * s;
}

void ImageQuad::validate() const {
  const auto pts = boundary();
  const double area = signed_area();
  if (!std::isfinite(area) || area == 0.0) throw GeometryError("degenerate image quadrilateral");
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector2d e1 = pts[(i + 1) % 4] - pts[i];
    const Eigen::Vector2d e2 = pts[(i + 2) % 4] - pts[(i + 1) % 4];
    const double turn = cross(e1, e2);
    if (turn == 0.0 || (turn > 0.0) != (area > 0.0)) {
      throw GeometryError("image quadrilateral is not strictly convex");
    }
  }
}

bool ImageQuad::contains(const Eigen::Vector2d& p) const {
  const auto pts = boundary();
  const double orientation = signed_area() > 0.0 ? 1.0 : -1.0;
  for (int i = 0; i < 4; ++i) {
    if (orientation * cross(pts[(i + 1) % 4] - pts[i], p - pts[i]) < 0.0) return false;
  }
  return true;
}

AtxyDatabase trim_to_trap_image(const AtxyDatabase& db, const ImageQuad& quad) {
  quad.validate();
  std::vector<AtxyRecord> kept;
  for (const auto& r : db.records()) {
    if (quad.contains(r.position())) kept.push_back(r);
  }
  return AtxyDatabase(std::move(kept), db.dt_seconds(), db.trap());
}

AtxyDatabase trim_to_trap_world(const AtxyDatabase& db, const TrapRect& trap) {
  trap.validate();
  std::vector<AtxyRecord> kept;
  for (const auto& r : db.records()) {
    if (trap.contains(r.x, r.y)) kept.push_back(r);
  }
  return AtxyDatabase(std::move(kept), db.dt_seconds(), trap);
}

}  // namespace pedflow
