#include "pedflow/sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pedflow/errors.hpp"
#include "pedflow/rng.hpp"
#include "pedflow/sim/forces.hpp"

namespace pedflow::sim {

namespace {

constexpr int kMaxPlacementAttempts = 10000;
constexpr double kMinVmax = 0.1;

struct LateralBand {
  double lo, hi, mean, sd;
};

LateralBand lateral_band(const SimParams& prm, Group g) {
  const TrapRect& trap = prm.trap;
  const double w = trap.width();
  const double mean_frac = prm.generator_spread_mean_pct / 100.0;
  const double sd = prm.generator_spread_std_pct / 100.0 * w;
  if (prm.scenario == Scenario::mixed) return {trap.xmin, trap.xmax, trap.xmin + mean_frac * w, sd};
  // Segregated: keep-right for both directions.
  const double xc = trap.xmin + 0.5 * w;
  if (g == Group::up) return {xc, trap.xmax, xc + mean_frac * 0.5 * w, sd};
  return {trap.xmin, xc, trap.xmin + mean_frac * 0.5 * w, sd};
}

double truncated_normal(RandomStream& rng, double mean, double sd, double lo, double hi) {
  if (sd <= 0.0) return std::clamp(mean, lo, hi);
  for (int i = 0; i < kMaxPlacementAttempts; ++i) {
    const double x = rng.normal(mean, sd);
    if (x >= lo && x <= hi) return x;
  }
  return rng.uniform(lo, hi);
}

double draw_vmax(RandomStream& rng, double mean, double sd) {
  if (sd <= 0.0) return std::max(mean, kMinVmax);
  for (int i = 0; i < kMaxPlacementAttempts; ++i) {
    const double v = rng.normal(mean, sd);
    if (v > kMinVmax) return v;
  }
  return kMinVmax + 1e-3;
}

}  // namespace

std::vector<PedestrianState> generate_pedestrians(const SimParams& prm) {
  prm.validate();
  const TrapRect& trap = prm.trap;
  const int n = prm.n_pedestrians;
  const int n_up = prm.n_ways == 1 ? n : (n + 1) / 2;
  const double min_sep2 = prm.body_diameter * prm.body_diameter;

  std::vector<PedestrianState> peds;
  peds.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    PedestrianState ped;
    ped.id = k + 1;
    ped.group = k < n_up ? Group::up : Group::down;
    RandomStream rng(prm.seed, static_cast<std::uint64_t>(ped.id));

    const LateralBand band = lateral_band(prm, ped.group);
    const double y_near = ped.group == Group::up ? trap.ymin - prm.generator_distance
                                                 : trap.ymax + prm.generator_distance;
    const double y_far = ped.group == Group::up ? y_near - prm.generator_depth
                                                : y_near + prm.generator_depth;

    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const Eigen::Vector2d cand(truncated_normal(rng, band.mean, band.sd, band.lo, band.hi),
                                 rng.uniform(std::min(y_near, y_far), std::max(y_near, y_far)));
      placed = std::none_of(peds.begin(), peds.end(), [&](const PedestrianState& o) {
        return (o.p - cand).squaredNorm() < min_sep2;
      });
      if (placed) ped.p = cand;
    }
    if (!placed) {
      throw CapacityError("cannot place pedestrian " + std::to_string(ped.id) +
                          " without overlap after " + std::to_string(kMaxPlacementAttempts) +
                          " attempts");
    }

    ped.origin = ped.p;
    ped.destination = {ped.p.x(), trap.ymin + trap.ymax - ped.p.y()};
    ped.elderly = prm.elderly_fraction > 0.0 && rng.bernoulli(prm.elderly_fraction);
    if (ped.elderly) {
      const double sd = prm.vmax_std * prm.elderly_vmax / prm.vmax_mean;
      ped.vmax = draw_vmax(rng, prm.elderly_vmax, sd);
    } else {
      ped.vmax = draw_vmax(rng, prm.vmax_mean, prm.vmax_std);
    }
    peds.push_back(ped);
  }
  return peds;
}

namespace {

// Within the destination radius, or past the destination's transverse line.
bool arrived(const PedestrianState& ped, double radius) {
  if ((ped.destination - ped.p).norm() <= radius) return true;
  return ped.group == Group::up ? ped.p.y() >= ped.destination.y()
                                : ped.p.y() <= ped.destination.y();
}

void check_finite(const Eigen::Vector2d& v, const PedestrianState& ped, const char* term) {
  if (!v.allFinite()) {
    throw NumericalFault("non-finite " + std::string(term) + " for pedestrian " +
                         std::to_string(ped.id));
  }
}

}  // namespace

StepDiagnostics step(World& world, const SimParams& prm) {
  const double r = prm.influence_radius();
  const Frame next_t = world.t + 1;

  std::vector<std::size_t> movers;
  for (std::size_t i = 0; i < world.peds.size(); ++i) {
    if (world.peds[i].active) movers.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(movers.size());

  // Snapshot at t, columns in ascending id order.
  Eigen::Matrix2Xd snapshot(2, m);
  for (Eigen::Index c = 0; c < m; ++c) snapshot.col(c) = world.peds[movers[c]].p;

  StepDiagnostics diag;
  diag.t = next_t;
  diag.active = static_cast<int>(m);

  std::vector<Eigen::Vector2d> accel(movers.size());
  for (Eigen::Index c = 0; c < m; ++c) {
    const PedestrianState& ped = world.peds[movers[c]];
    const Eigen::Vector2d fwd = forward_velocity<double>(ped.p, ped.destination, ped.vmax, prm.alpha);
    check_finite(fwd, ped, "forward velocity");
    const Eigen::Vector2d away = repulse_away_velocity<double>(ped.p, ped.v, ped.vmax, snapshot,
                                                               prm.chi, r, prm.sight_distance);
    check_finite(away, ped, "repulse-away velocity");
    const Eigen::Vector2d avoid =
        collision_avoid_velocity<double>(ped.p, ped.vmax, snapshot, prm.beta, r);
    check_finite(avoid, ped, "collision-avoid velocity");
    accel[c] = acceleration<double>(ped.v, fwd + away + avoid, prm.mass, prm.a_max);
    check_finite(accel[c], ped, "acceleration");
    diag.max_accel = std::max(diag.max_accel, accel[c].norm());
  }

  for (Eigen::Index c = 0; c < m; ++c) {
    PedestrianState& ped = world.peds[movers[c]];
    const bool was_inside = prm.trap.contains(ped.p);
    ped.v += accel[c] * prm.dt;
    const double speed = ped.v.norm();
    if (speed > ped.vmax) ped.v *= ped.vmax / speed;
    ped.p += ped.v * prm.dt;
    check_finite(ped.p, ped, "position");
    diag.max_speed_excess = std::max(diag.max_speed_excess, ped.v.norm() - ped.vmax);

    const bool inside = prm.trap.contains(ped.p);
    if (inside && !ped.t_enter_trap) ped.t_enter_trap = next_t;
    if (was_inside && !inside) ped.t_exit_trap = next_t;
    if (arrived(ped, prm.destination_radius)) ped.active = false;
  }

  const double body2 = prm.body_diameter * prm.body_diameter;
  for (Eigen::Index a = 0; a < m; ++a) {
    const PedestrianState& pa = world.peds[movers[a]];
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if ((pa.p - world.peds[movers[b]].p).squaredNorm() < body2) ++diag.overlap_count;
    }
    const Eigen::Vector2d g = pa.destination - pa.p;
    const double len = g.norm();
    if (len > 0.0 && pa.v.dot(g) / len < kPushbackSpeed) ++diag.pushback_count;
  }

  world.t = next_t;
  return diag;
}

std::map<PedId, double> RunResult::vmax_map() const {
  std::map<PedId, double> out;
  for (const auto& p : final_states) out[p.id] = p.vmax;
  return out;
}

std::map<PedId, Group> RunResult::group_map() const {
  std::map<PedId, Group> out;
  for (const auto& p : final_states) out[p.id] = p.group;
  return out;
}

RunResult run(const SimParams& params) { return run(params, generate_pedestrians(params)); }

RunResult run(const SimParams& prm, std::vector<PedestrianState> initial) {
  prm.validate();
  std::sort(initial.begin(), initial.end(),
            [](const PedestrianState& a, const PedestrianState& b) { return a.id < b.id; });

  World world{std::move(initial), 0};
  const int k = prm.decimation;
  std::vector<AtxyRecord> full;
  std::vector<AtxyRecord> in_trap;
  auto record = [&](const PedestrianState& ped) {
    if (world.t % k != 0) return;
    const AtxyRecord rec{ped.id, world.t / k, ped.p.x(), ped.p.y()};
    full.push_back(rec);
    if (prm.trap.contains(ped.p)) in_trap.push_back(rec);
  };

  for (auto& ped : world.peds) {
    if (prm.trap.contains(ped.p)) ped.t_enter_trap = 0;
    record(ped);
  }

  RunResult result;
  const auto max_steps = static_cast<Frame>(std::ceil(prm.t_max / prm.dt - 1e-9));
  auto any_active = [&] {
    return std::any_of(world.peds.begin(), world.peds.end(),
                       [](const PedestrianState& p) { return p.active; });
  };
  while (any_active() && world.t < max_steps) {
    std::vector<std::size_t> movers;
    for (std::size_t i = 0; i < world.peds.size(); ++i) {
      if (world.peds[i].active) movers.push_back(i);
    }
    result.diagnostics.push_back(step(world, prm));
    for (const std::size_t i : movers) record(world.peds[i]);
  }
  result.truncated = any_active();

  const double out_dt = prm.dt * k;
  result.full_db = AtxyDatabase(std::move(full), out_dt, prm.trap);
  result.trap_db = AtxyDatabase(std::move(in_trap), out_dt, prm.trap);
  result.final_states = std::move(world.peds);
  return result;
}

HealthRates health_rates(const std::vector<StepDiagnostics>& diags, double dt,
                         double after_seconds) {
  long long active = 0, overlaps = 0, pushbacks = 0;
  for (const auto& d : diags) {
    if (static_cast<double>(d.t) * dt < after_seconds) continue;
    active += d.active;
    overlaps += d.overlap_count;
    pushbacks += d.pushback_count;
  }
  if (active == 0) return {};
  return {static_cast<double>(overlaps) / static_cast<double>(active),
          static_cast<double>(pushbacks) / static_cast<double>(active)};
}

}  // namespace pedflow::sim
