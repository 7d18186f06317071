#include "pedflow/metrics/flow.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pedflow/errors.hpp"

namespace pedflow::metrics {

double recursive_mean(double prev, std::int64_t t, double z) {
  if (t < 1) throw DomainError("recursive_mean needs t >= 1, got " + std::to_string(t));
  const double td = static_cast<double>(t);
  return ((td - 1.0) / td) * prev + z / td;
}

void PerPedAccumulator::add(double speed, double distance) {
  ++t_count;
  v_bar = recursive_mean(v_bar, t_count, speed);
  v2_bar = recursive_mean(v2_bar, t_count, speed * speed);
  w += distance;
}

double instantaneous_speed(const AtxyDatabase& db, PedId ped_id, Frame t) {
  const AtxyRecord* now = db.find(ped_id, t);
  const AtxyRecord* before = db.find(ped_id, t - 1);
  if (!now || !before) {
    throw DomainError("no records at frames " + std::to_string(t - 1) + " and " +
                      std::to_string(t) + " for pedestrian " + std::to_string(ped_id));
  }
  return (now->position() - before->position()).norm() / db.dt_seconds();
}

double uncomfortability(const PerPedAccumulator& acc) {
  if (!(acc.v2_bar > 0.0)) return 0.0;
  return std::clamp(1.0 - acc.v_bar * acc.v_bar / acc.v2_bar, 0.0, 1.0);
}

double delay(const PerPedAccumulator& acc) {
  if (!acc.vmax) throw DomainError("delay needs vmax for pedestrian " + std::to_string(acc.ped_id));
  if (acc.w == 0.0) return 0.0;
  return acc.w / acc.v_bar - acc.w / *acc.vmax;
}

SummaryStats summarize(const std::vector<double>& xs) {
  SummaryStats s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mean = recursive_mean(mean, static_cast<std::int64_t>(i + 1), xs[i]);
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  s.mean = mean;
  s.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return s;
}

namespace {

struct FrameData {
  int n = 0;
  std::set<PedId> peds;
  std::vector<double> speeds;
  std::vector<double> accels;
  std::optional<InstantReport> row;
};

SystemReport summarize_range(const std::map<Frame, FrameData>& frames, Frame first, Frame last,
                             double dt, double area) {
  SystemReport rep;
  rep.t_first = first;
  rep.t_last = last;
  rep.dissipation_time = static_cast<double>(last - first) * dt;
  std::set<PedId> peds;
  std::vector<double> speeds, accels;
  std::int64_t rows = 0, occupied = 0;
  for (auto it = frames.lower_bound(first); it != frames.end() && it->first <= last; ++it) {
    const FrameData& f = it->second;
    if (f.n > 0) {
      ++occupied;
      rep.k_mean = recursive_mean(rep.k_mean, occupied, f.n / area);
    }
    peds.insert(f.peds.begin(), f.peds.end());
    speeds.insert(speeds.end(), f.speeds.begin(), f.speeds.end());
    accels.insert(accels.end(), f.accels.begin(), f.accels.end());
    if (f.row) {
      ++rows;
      rep.v_bar_sys = recursive_mean(rep.v_bar_sys, rows, f.row->v_tilde);
      rep.d_bar_sys = recursive_mean(rep.d_bar_sys, rows, f.row->d_tilde);
      rep.u_bar_sys = recursive_mean(rep.u_bar_sys, rows, f.row->u_tilde);
    }
  }
  rep.n_pedestrians = static_cast<int>(peds.size());
  rep.speed_stats = summarize(speeds);
  rep.accel_stats = summarize(accels);
  return rep;
}

}  // namespace

FlowReport analyze(const AtxyDatabase& db, const std::map<PedId, double>& vmax_map) {
  if (!db.trap()) throw DomainError("analyze needs a database with a trap rectangle");
  const TrapRect trap = *db.trap();
  const double dt = db.dt_seconds();
  const double area = trap.area();

  FlowReport out;
  std::map<Frame, FrameData> frames;
  // Occupancy, speed and acceleration samples per frame.
  for (const Track& track : db.tracks()) {
    const AtxyRecord* prev = nullptr;
    std::optional<std::pair<Frame, double>> prev_speed;
    for (const AtxyRecord& r : track.records) {
      if (!trap.contains(r.x, r.y)) {
        prev = nullptr;
        continue;
      }
      FrameData& f = frames[r.t];
      ++f.n;
      f.peds.insert(r.ped_id);
      if (prev && prev->t == r.t - 1) {
        const double speed = (r.position() - prev->position()).norm() / dt;
        f.speeds.push_back(speed);
        if (prev_speed && prev_speed->first == r.t - 1) {
          f.accels.push_back(std::abs(speed - prev_speed->second) / dt);
        }
        prev_speed = {r.t, speed};
      }
      prev = &r;
    }
  }

  // Frame-ordered pass: per-frame averages use each accumulator as of that frame.
  std::map<PedId, PerPedAccumulator> running;
  std::map<PedId, AtxyRecord> last_in_trap;
  std::map<Frame, std::vector<const AtxyRecord*>> by_frame;
  for (const AtxyRecord& r : db.records()) {
    if (trap.contains(r.x, r.y)) by_frame[r.t].push_back(&r);
  }
  for (const auto& [t, recs] : by_frame) {
    double v_sum = 0.0, u_sum = 0.0, d_sum = 0.0;
    int n_samples = 0, n_delay = 0;
    for (const AtxyRecord* r : recs) {
      auto [it, fresh] = running.try_emplace(r->ped_id);
      PerPedAccumulator& acc = it->second;
      if (fresh) {
        acc.ped_id = r->ped_id;
        if (const auto v = vmax_map.find(r->ped_id); v != vmax_map.end()) acc.vmax = v->second;
      }
      const auto last = last_in_trap.find(r->ped_id);
      if (last != last_in_trap.end() && last->second.t == t - 1) {
        const double dist = (r->position() - last->second.position()).norm();
        const double speed = dist / dt;
        acc.add(speed, dist);
        v_sum += speed;
        u_sum += uncomfortability(acc);
        if (acc.vmax) {
          d_sum += delay(acc);
          ++n_delay;
        }
        ++n_samples;
      }
      last_in_trap[r->ped_id] = *r;
    }
    if (n_samples > 0) {
      InstantReport row;
      row.t = t;
      row.n = static_cast<int>(recs.size());
      row.v_tilde = v_sum / n_samples;
      row.u_tilde = u_sum / n_samples;
      row.d_tilde = n_delay > 0 ? d_sum / n_delay : 0.0;
      row.k = row.n / area;
      frames[t].row = row;
      out.instant.push_back(row);
    }
  }

  for (const auto& [id, acc] : running) {
    if (!acc.vmax) out.missing_vmax.push_back(id);
  }
  out.accumulators = std::move(running);
  for (const auto& [t, f] : frames) {
    out.speed_samples.insert(out.speed_samples.end(), f.speeds.begin(), f.speeds.end());
  }
  if (frames.empty()) return out;

  // Busy periods: maximal runs of consecutive occupied frames.
  Frame start = frames.begin()->first;
  Frame prev_t = start;
  for (auto it = std::next(frames.begin()); it != frames.end(); ++it) {
    if (it->first != prev_t + 1) {
      out.periods.push_back(summarize_range(frames, start, prev_t, dt, area));
      start = it->first;
    }
    prev_t = it->first;
  }
  out.periods.push_back(summarize_range(frames, start, prev_t, dt, area));
  out.system = summarize_range(frames, frames.begin()->first, frames.rbegin()->first, dt, area);
  return out;
}

std::vector<HistogramBin> histogram(const std::vector<double>& xs, double width) {
  if (!(width > 0.0)) throw DomainError("histogram bin width must be positive");
  std::vector<HistogramBin> bins;
  if (xs.empty()) return bins;
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  const auto first = static_cast<long long>(std::floor(*lo_it / width));
  const auto last = static_cast<long long>(std::floor(*hi_it / width));
  for (long long b = first; b <= last; ++b) {
    bins.push_back({static_cast<double>(b) * width, static_cast<double>(b + 1) * width, 0});
  }
  for (const double x : xs) {
    const auto b = static_cast<long long>(std::floor(x / width)) - first;
    ++bins[static_cast<std::size_t>(std::clamp<long long>(b, 0, last - first))].count;
  }
  return bins;
}

MacroReport macroscopic(const AtxyDatabase& db, std::optional<ObservationWindow> window) {
  if (!db.trap()) throw DomainError("macroscopic needs a database with a trap rectangle");
  const TrapRect trap = *db.trap();
  const double dt = db.dt_seconds();

  MacroReport rep;
  std::vector<std::pair<Frame, Frame>> spans;
  std::vector<double> spot_speeds;
  std::map<Frame, int> occupancy;
  for (const Track& track : db.tracks()) {
    std::optional<Frame> first, last;
    const AtxyRecord* prev = nullptr;
    std::vector<double> speeds;
    std::vector<Frame> present;
    for (const AtxyRecord& r : track.records) {
      if (!trap.contains(r.x, r.y)) {
        prev = nullptr;
        continue;
      }
      if (!first) first = r.t;
      last = r.t;
      present.push_back(r.t);
      if (prev && prev->t == r.t - 1) speeds.push_back((r.position() - prev->position()).norm() / dt);
      prev = &r;
    }
    if (!first) continue;
    if (window && (*first <= window->first || *last >= window->last)) {
      rep.censored.push_back(track.ped_id);
      continue;
    }
    spans.emplace_back(*first, *last);
    spot_speeds.insert(spot_speeds.end(), speeds.begin(), speeds.end());
    for (const Frame t : present) ++occupancy[t];
  }
  if (spans.empty()) throw DomainError("no complete trap crossings to aggregate");

  Frame t0 = spans.front().first, t1 = spans.front().second;
  double travel_sum = 0.0;
  for (const auto& [a, b] : spans) {
    t0 = std::min(t0, a);
    t1 = std::max(t1, b);
    travel_sum += static_cast<double>(b - a) * dt;
  }
  rep.n = static_cast<int>(spans.size());
  rep.T = static_cast<double>(t1 - t0) * dt;
  rep.t_bar = travel_sum / rep.n;
  if (!(rep.T > 0.0) || !(rep.t_bar > 0.0)) throw DomainError("zero observation or travel time");

  double occupied = 0.0;
  for (const auto& [t, count] : occupancy) occupied += count;
  rep.k = occupied / static_cast<double>(t1 - t0 + 1) / trap.area();
  rep.q = flow_rate(rep.n, rep.T, trap.width());
  rep.space_mean_speed = space_mean_speed(trap.length(), rep.t_bar);
  rep.area_module = area_module(trap.width(), trap.length(), rep.T, rep.n, rep.t_bar);
  rep.time_mean_speed = summarize(spot_speeds).mean;
  return rep;
}

std::map<PedId, Eigen::Vector2d> infer_directions(const AtxyDatabase& db) {
  std::map<PedId, Eigen::Vector2d> out;
  for (const Track& track : db.tracks()) {
    const double dy = track.records.back().y - track.records.front().y;
    if (dy > 0.0) out[track.ped_id] = Eigen::Vector2d(0.0, 1.0);
    if (dy < 0.0) out[track.ped_id] = Eigen::Vector2d(0.0, -1.0);
  }
  return out;
}

double efficiency(const AtxyDatabase& db, const std::map<PedId, Eigen::Vector2d>& directions,
                  const std::map<PedId, double>& vmax_map) {
  const double dt = db.dt_seconds();
  double total = 0.0;
  std::int64_t counted = 0;
  for (const Track& track : db.tracks()) {
    const auto dir = directions.find(track.ped_id);
    const auto vmax = vmax_map.find(track.ped_id);
    if (dir == directions.end() || vmax == vmax_map.end() || !(vmax->second > 0.0)) continue;
    const Eigen::Vector2d e = dir->second.normalized();
    double along = 0.0;
    std::int64_t samples = 0;
    for (std::size_t i = 1; i < track.records.size(); ++i) {
      const AtxyRecord& a = track.records[i - 1];
      const AtxyRecord& b = track.records[i];
      if (b.t != a.t + 1) continue;
      if (db.trap() && (!db.trap()->contains(a.x, a.y) || !db.trap()->contains(b.x, b.y))) continue;
      ++samples;
      along = recursive_mean(along, samples, (b.position() - a.position()).dot(e) / dt);
    }
    if (samples == 0) continue;
    ++counted;
    total = recursive_mean(total, counted, along / vmax->second);
  }
  return std::clamp(total, -1.0, 1.0);
}

}  // namespace pedflow::metrics
