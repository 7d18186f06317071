#include "pedflow/tracker/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <utility>

#include "pedflow/errors.hpp"
#include "pedflow/rng.hpp"
#include "pedflow/text.hpp"

namespace pedflow::tracker {

namespace {

bool missing(double v) { return v == kMissing; }

bool has_position(const DescriptorRow& r, const DescriptorTable& layout) {
  return !missing(r.features[layout.x_index]) && !missing(r.features[layout.y_index]);
}

Eigen::Vector2d position(const DescriptorRow& r, const DescriptorTable& layout) {
  return {r.features[layout.x_index], r.features[layout.y_index]};
}

std::vector<std::size_t> resolve_features(const TrackerParams& params,
                                          const DescriptorTable& layout) {
  if (!params.similarity_features.empty()) return params.similarity_features;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < layout.feature_names.size(); ++i) {
    if (i != layout.x_index && i != layout.y_index) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> match_with(const DescriptorRow& base,
                                      const std::vector<const DescriptorRow*>& rows, int depth,
                                      const TrackerParams& params, const DescriptorTable& layout,
                                      const std::vector<std::size_t>& features) {
  if (base.object_id) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i]->object_id == base.object_id) return i;
    }
  }
  if (!has_position(base, layout)) return std::nullopt;
  const Eigen::Vector2d pb = position(base, layout);

  std::optional<std::size_t> best;
  double best_lambda = 0.0, best_dist = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const DescriptorRow& c = *rows[i];
    if (c.object_id || !has_position(c, layout)) continue;
    const double dist = (position(c, layout) - pb).norm();
    const bool near = params.depth_rule == DepthRule::shrinking
                          ? dist * depth < params.distance_threshold
                          : dist < params.distance_threshold * depth;
    if (!near) continue;
    const auto lambda = similarity_index(base, c, features);
    if (!lambda || !(*lambda > params.similarity_threshold)) continue;
    const bool better = !best || *lambda > best_lambda ||
                        (*lambda == best_lambda &&
                         (dist < best_dist || (dist == best_dist && c.slot < rows[*best]->slot)));
    if (better) {
      best = i;
      best_lambda = *lambda;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace

void DescriptorTable::validate() const {
  const std::size_t h = feature_names.size();
  if (x_index >= h || y_index >= h || x_index == y_index) {
    throw IntegrityError("descriptor table needs distinct X and Y feature columns");
  }
  std::set<std::pair<Frame, int>> seen;
  for (const DescriptorRow& r : rows) {
    if (r.features.size() != h) {
      throw IntegrityError("descriptor row at slice " + std::to_string(r.slice) + " has " +
                           std::to_string(r.features.size()) + " features, expected " +
                           std::to_string(h));
    }
    if (r.slice < 0) throw IntegrityError("negative slice " + std::to_string(r.slice));
    for (double f : r.features) {
      if (!std::isfinite(f)) {
        throw IntegrityError("non-finite feature at slice " + std::to_string(r.slice));
      }
    }
    if (!seen.insert({r.slice, r.slot}).second) {
      throw IntegrityError("duplicate slot " + std::to_string(r.slot) + " in slice " +
                           std::to_string(r.slice));
    }
  }
}

DescriptorTable read_descriptors(std::istream& in) {
  DescriptorTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto cells = text::split(body, ',');
    if (!have_header) {
      if (cells.size() < 4 || text::trim(cells[0]) != "slice" || text::trim(cells[1]) != "slot") {
        throw ParseError("descriptor header must start with slice,slot and name features",
                         line_no);
      }
      bool has_x = false, has_y = false;
      for (std::size_t i = 2; i < cells.size(); ++i) {
        const std::string name(text::trim(cells[i]));
        if (name == "X") table.x_index = i - 2, has_x = true;
        if (name == "Y") table.y_index = i - 2, has_y = true;
        table.feature_names.push_back(name);
      }
      if (!has_x || !has_y) throw ParseError("descriptor header lacks X or Y", line_no);
      have_header = true;
      continue;
    }
    if (cells.size() != table.feature_names.size() + 2) {
      throw ParseError("expected " + std::to_string(table.feature_names.size() + 2) +
                           " fields, got " + std::to_string(cells.size()),
                       line_no);
    }
    DescriptorRow row;
    const auto slice = text::parse_int(cells[0]);
    const auto slot = text::parse_int(cells[1]);
    if (!slice || !slot) throw ParseError("bad slice or slot", line_no);
    row.slice = *slice;
    row.slot = static_cast<int>(*slot);
    for (std::size_t i = 2; i < cells.size(); ++i) {
      const auto v = text::parse_double(cells[i]);
      if (!v) throw ParseError("bad feature value '" + std::string(cells[i]) + "'", line_no);
      row.features.push_back(*v);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("empty descriptor table", 0);
  table.validate();
  return table;
}

DescriptorTable read_descriptors_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  return read_descriptors(in);
}

void write_descriptors(std::ostream& out, const DescriptorTable& table) {
  out << "slice,slot";
  for (const auto& name : table.feature_names) out << ',' << name;
  out << '\n';
  for (const DescriptorRow& r : table.rows) {
    out << r.slice << ',' << r.slot;
    for (double f : r.features) out << ',' << text::format_double(f);
    out << '\n';
  }
}

void TrackerParams::validate() const {
  if (n <= 1) throw ConfigError("tracker n must be greater than one");
  if (!(distance_threshold > 0.0)) throw ConfigError("distance_threshold must be positive");
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0)) {
    throw ConfigError("similarity_threshold must lie in [0, 1]");
  }
  if (!(dt > 0.0)) throw ConfigError("tracker dt must be positive");
  if (min_rows < 3) throw ConfigError("min_rows must be at least 3");
  if (!(min_motion_index >= 0.0 && min_motion_index <= 1.0)) {
    throw ConfigError("min_motion_index must lie in [0, 1]");
  }
}

std::optional<double> similarity_index(const DescriptorRow& base, const DescriptorRow& cand,
                                       const std::vector<std::size_t>& features) {
  if (base.features.size() != cand.features.size()) {
    throw DomainError("descriptor rows have different feature layouts");
  }
  double sum = 0.0;
  int used = 0;
  for (std::size_t i : features) {
    if (i >= base.features.size()) throw DomainError("similarity feature index out of range");
    const double fb = base.features[i];
    const double fc = cand.features[i];
    if (missing(fb) || missing(fc) || fb + fc == 0.0) continue;
    sum += 1.0 - std::abs(fb - fc) / (fb + fc);
    ++used;
  }
  if (used == 0) return std::nullopt;
  return std::clamp(sum / used, 0.0, 1.0);
}

std::optional<std::size_t> match_in_frame(const DescriptorRow& base,
                                          const std::vector<const DescriptorRow*>& rows,
                                          int depth, const TrackerParams& params,
                                          const DescriptorTable& layout) {
  if (depth < 1) throw DomainError("tracing depth must be at least 1");
  return match_with(base, rows, depth, params, layout, resolve_features(params, layout));
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::enter: return "enter";
    case EventKind::exit: return "exit";
    case EventKind::continue_: return "continue";
    case EventKind::occlusion_bridged: return "occlusion_bridged";
  }
  return "enter";
}

TraceResult trace(const DescriptorTable& table, const TrackerParams& params) {
  params.validate();
  table.validate();
  TraceResult out;
  out.table = table;
  auto& rows = out.table.rows;
  for (auto& r : rows) r.object_id.reset();
  if (rows.empty()) return out;

  const auto features = resolve_features(params, table);
  std::map<Frame, std::vector<std::size_t>> by_slice;
  for (std::size_t i = 0; i < rows.size(); ++i) by_slice[rows[i].slice].push_back(i);
  for (auto& [s, idx] : by_slice) {
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return rows[a].slot < rows[b].slot; });
  }
  const Frame first = by_slice.begin()->first;
  const Frame last = by_slice.rbegin()->first;

  ObjectId next_id = 1;
  auto label_new = [&](Frame s) {
    for (std::size_t i : by_slice[s]) {
      if (rows[i].object_id) continue;
      rows[i].object_id = next_id;
      out.events.push_back({EventKind::enter, next_id, s, s});
      ++next_id;
    }
  };
  label_new(first);

  for (Frame s = first; s < last; ++s) {
    // Copy: bridging appends rows to later slices only, but may reallocate `rows`.
    const std::vector<std::size_t> bases = by_slice[s];
    for (std::size_t bi : bases) {
      bool matched = false;
      for (int k = 1; k <= params.n && s + k <= last; ++k) {
        const auto& cand_idx = by_slice[s + k];
        std::vector<const DescriptorRow*> cands;
        cands.reserve(cand_idx.size());
        for (std::size_t ci : cand_idx) cands.push_back(&rows[ci]);
        const auto hit = match_with(rows[bi], cands, k, params, table, features);
        if (!hit) continue;
        const std::size_t mi = cand_idx[*hit];
        const ObjectId id = *rows[bi].object_id;
        rows[mi].object_id = id;
        if (k == 1) {
          out.events.push_back({EventKind::continue_, id, s, s + 1});
        } else {
          const DescriptorRow a = rows[bi];
          const DescriptorRow b = rows[mi];
          for (int j = 1; j < k; ++j) {
            const double w = static_cast<double>(j) / k;
            DescriptorRow r;
            r.slice = s + j;
            r.slot = 0;
            r.object_id = id;
            r.interpolated = true;
            r.features.resize(a.features.size());
            for (std::size_t f = 0; f < a.features.size(); ++f) {
              r.features[f] = missing(a.features[f]) || missing(b.features[f])
                                  ? kMissing
                                  : (1.0 - w) * a.features[f] + w * b.features[f];
            }
            rows.push_back(std::move(r));
            by_slice[s + j].push_back(rows.size() - 1);
          }
          out.events.push_back({EventKind::occlusion_bridged, id, s + 1, s + k - 1});
        }
        matched = true;
        break;
      }
      if (!matched) {
        out.events.push_back({EventKind::exit, *rows[bi].object_id, s + 1, s + 1});
      }
    }
    label_new(s + 1);
  }
  return out;
}

double motion_score(double delta, double d1, double d2, double beta, const MotionConstants& k) {
  if (d1 == 0.0 || d2 == 0.0) return 0.0;
  if (delta == 0.0) return 1.0;
  const double p = std::exp(-k.c1 * delta / d1 - k.c2 * (delta / d2) * std::tan(beta / 2.0));
  return std::clamp(p, 0.0, 1.0);
}

double motion_index(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                    const Eigen::Vector2d& p3, const MotionConstants& k) {
  const Eigen::Vector2d a = p2 - p1;
  const Eigen::Vector2d b = p3 - p2;
  const double cross = a.x() * b.y() - a.y() * b.x();
  return motion_score((p3 - (p2 + a)).norm(), a.norm(), b.norm(),
                      std::atan2(std::abs(cross), a.dot(b)), k);
}

RecognitionResult recognize(const DescriptorTable& labeled, const TrackerParams& params,
                            const MotionConstants& k) {
  params.validate();
  std::map<ObjectId, std::vector<const DescriptorRow*>> tracks;
  for (const DescriptorRow& r : labeled.rows) {
    if (r.object_id && has_position(r, labeled)) tracks[*r.object_id].push_back(&r);
  }
  RecognitionResult out;
  std::vector<AtxyRecord> records;
  PedId next = 1;
  for (auto& [id, rows] : tracks) {
    std::sort(rows.begin(), rows.end(),
              [](const DescriptorRow* a, const DescriptorRow* b) { return a->slice < b->slice; });
    if (rows.size() >= 3) {
      double sum = 0.0;
      for (std::size_t i = 2; i < rows.size(); ++i) {
        sum += motion_index(position(*rows[i - 2], labeled), position(*rows[i - 1], labeled),
                            position(*rows[i], labeled), k);
      }
      out.mean_motion_index[id] = sum / static_cast<double>(rows.size() - 2);
    }
    if (rows.size() < static_cast<std::size_t>(params.min_rows)) continue;
    if (out.mean_motion_index[id] < params.min_motion_index) continue;
    out.renumbered[id] = next;
    for (const DescriptorRow* r : rows) {
      const Eigen::Vector2d p = position(*r, labeled);
      records.push_back({next, r->slice, p.x(), p.y()});
    }
    ++next;
  }
  out.db = AtxyDatabase(std::move(records), params.dt);
  return out;
}

SynthResult synthesize_descriptors(const AtxyDatabase& truth, const SynthOptions& options) {
  if (options.noise_sigma < 0.0) throw DomainError("noise_sigma must be non-negative");
  if (options.clutter < 0 || options.clutter_length < 1) {
    throw DomainError("clutter count and length must be non-negative and positive");
  }
  struct Pending {
    DescriptorRow row;
    PedId truth;
  };
  std::map<Frame, std::vector<Pending>> by_slice;
  auto blob = [](RandomStream& rng, double x, double y, double radius, double sigma) {
    const double area = std::numbers::pi * radius * radius;
    const double perimeter = 2.0 * std::numbers::pi * radius;
    return std::vector<double>{x + sigma * rng.normal(), y + sigma * rng.normal(),
                               area * (1.0 + sigma * rng.normal()),
                               perimeter * (1.0 + sigma * rng.normal())};
  };
  auto occluded = [&](PedId id, Frame t) {
    return std::any_of(options.occlusions.begin(), options.occlusions.end(),
                       [&](const Occlusion& o) { return o.ped_id == id && t >= o.first && t <= o.last; });
  };

  for (const Track& track : truth.tracks()) {
    RandomStream rng(options.seed, static_cast<std::uint64_t>(track.ped_id));
    const double radius = rng.uniform(0.2, 0.35);
    for (const AtxyRecord& r : track.records) {
      auto features = blob(rng, r.x, r.y, radius, options.noise_sigma);
      if (occluded(r.ped_id, r.t)) continue;
      by_slice[r.t].push_back({DescriptorRow{r.t, 0, std::move(features), {}, false}, r.ped_id});
    }
  }

  if (options.clutter > 0 && !truth.empty()) {
    double xmin = truth.records().front().x, xmax = xmin;
    double ymin = truth.records().front().y, ymax = ymin;
    for (const AtxyRecord& r : truth.records()) {
      xmin = std::min(xmin, r.x), xmax = std::max(xmax, r.x);
      ymin = std::min(ymin, r.y), ymax = std::max(ymax, r.y);
    }
    const Frame f0 = *truth.first_frame();
    const Frame f1 = std::max(f0, *truth.last_frame() - options.clutter_length + 1);
    const double jitter = std::max(options.noise_sigma, 0.05);
    for (int c = 0; c < options.clutter; ++c) {
      RandomStream rng(options.seed, (std::uint64_t{1} << 40) + static_cast<std::uint64_t>(c));
      const double x = rng.uniform(xmin, xmax);
      const double y = rng.uniform(ymin, ymax);
      const double radius = rng.uniform(0.2, 0.35);
      const Frame start = f0 + static_cast<Frame>(rng.next() % static_cast<std::uint64_t>(f1 - f0 + 1));
      for (int j = 0; j < options.clutter_length; ++j) {
        by_slice[start + j].push_back(
            {DescriptorRow{start + j, 0, blob(rng, x, y, radius, jitter), {}, false}, 0});
      }
    }
  }

  SynthResult out;
  out.table.feature_names = {"X", "Y", "area", "perimeter"};
  out.table.x_index = 0;
  out.table.y_index = 1;
  for (auto& [s, pending] : by_slice) {
    RandomStream rng(options.seed, (std::uint64_t{1} << 41) + static_cast<std::uint64_t>(s));
    for (std::size_t i = pending.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next() % i);
      std::swap(pending[i - 1], pending[j]);
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
      pending[i].row.slot = static_cast<int>(i + 1);
      out.table.rows.push_back(std::move(pending[i].row));
      out.truth.push_back(pending[i].truth);
    }
  }
  return out;
}

}  // namespace pedflow::tracker
