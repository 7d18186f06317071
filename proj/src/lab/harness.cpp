#include "pedflow/lab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "pedflow/errors.hpp"
#include "pedflow/lab/scenario.hpp"

namespace pedflow::lab {

RunOutcome evaluate(const sim::SimParams& params) {
  RunOutcome out;
  out.run = sim::run(params);
  out.flow = metrics::analyze(out.run.trap_db, out.run.vmax_map());
  out.health = sim::health_rates(out.run.diagnostics, params.dt);
  return out;
}

RunScores score(const RunOutcome& outcome, const sim::SimParams& params) {
  const auto& sys = outcome.flow.system;
  RunScores s;
  s.v_bar_sys = sys.v_bar_sys;
  s.u_bar_sys = sys.u_bar_sys;
  s.d_bar_sys = sys.d_bar_sys;
  s.dissipation_time = sys.dissipation_time;
  s.k_mean = sys.k_mean;
  s.n_mean = sys.k_mean * params.trap.area();
  s.speed_mean = sys.speed_stats.mean;
  s.speed_sd = sys.speed_stats.sd;
  s.overlap_rate = outcome.health.overlap_rate;
  s.pushback_rate = outcome.health.pushback_rate;
  s.truncated = outcome.run.truncated;
  return s;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job,
                  unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (replications < 1) throw ConfigError("sweep replications must be >= 1");
  const auto& names = sweep_variables();
  if (std::find(names.begin(), names.end(), variable) == names.end()) {
    throw ConfigError("unknown sweep variable '" + variable + "'");
  }
}

namespace {

std::optional<RunScores> try_run(const sim::SimParams& params, std::string& error) {
  try {
    params.validate();
    return score(evaluate(params), params);
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

std::optional<metrics::FundamentalFit> try_fit(const std::vector<std::pair<double, double>>& pts,
                                               metrics::FundamentalModel model) {
  try {
    return metrics::fit_fundamental(pts, model);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  SweepResult out;
  out.spec = spec;
  for (double v : spec.values) {
    for (int r = 0; r < spec.replications; ++r) {
      out.rows.push_back({v, r, spec.base.seed + static_cast<std::uint64_t>(r), {}, {}});
    }
  }
  parallel_for(
      out.rows.size(),
      [&](std::size_t i) {
        SweepRow& row = out.rows[i];
        sim::SimParams p = spec.base;
        p.seed = row.seed;
        try {
          set_variable(p, spec.variable, row.value);
        } catch (const std::exception& e) {
          row.error = e.what();
          return;
        }
        row.scores = try_run(p, row.error);
      },
      threads);
  if (spec.variable == "n_pedestrians") {
    const auto pts = uk_points(out);
    out.linear_fit = try_fit(pts, metrics::FundamentalModel::linear);
    out.log_fit = try_fit(pts, metrics::FundamentalModel::logarithmic);
  }
  return out;
}

std::vector<std::pair<double, double>> uk_points(const SweepResult& sweep) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : sweep.rows) {
    if (row.scores && row.scores->k_mean > 0.0) {
      pts.emplace_back(row.scores->k_mean, row.scores->v_bar_sys);
    }
  }
  return pts;
}

CalibrationResult calibrate(const sim::SimParams& base, const std::vector<CalibrationAxis>& axes,
                            const CalibrationTarget& target,
                            std::optional<metrics::SampleSummary> reference, unsigned threads) {
  if (axes.empty()) throw ConfigError("calibration grid is empty");
  for (const auto& axis : axes) {
    if (axis.values.empty()) throw ConfigError("calibration axis " + axis.variable + " is empty");
    get_variable(base, axis.variable);
  }
  CalibrationResult out;
  // Cartesian product, last axis varying fastest.
  std::size_t total = 1;
  for (const auto& axis : axes) total *= axis.values.size();
  for (std::size_t i = 0; i < total; ++i) {
    CalibrationPoint pt;
    std::size_t rest = i;
    pt.setting.resize(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      const std::size_t m = axes[a].values.size();
      pt.setting[a] = {axes[a].variable, axes[a].values[rest % m]};
      rest /= m;
    }
    out.points.push_back(std::move(pt));
  }

  parallel_for(
      out.points.size(),
      [&](std::size_t i) {
        CalibrationPoint& pt = out.points[i];
        sim::SimParams p = base;
        for (const auto& [name, value] : pt.setting) set_variable(p, name, value);
        pt.scores = try_run(p, pt.error);
      },
      threads);

  for (auto& pt : out.points) {
    if (!pt.scores) {
      pt.objective = std::numeric_limits<double>::infinity();
      pt.infeasibility = std::numeric_limits<double>::infinity();
      continue;
    }
    const RunScores& s = *pt.scores;
    pt.objective = (s.speed_mean - target.speed_mean) * (s.speed_mean - target.speed_mean) +
                   (s.speed_sd - target.speed_std) * (s.speed_sd - target.speed_std);
    pt.feasible = s.overlap_rate < target.max_overlap_rate &&
                  s.pushback_rate < target.max_pushback_rate;
    pt.infeasibility = std::max(0.0, s.overlap_rate - target.max_overlap_rate) +
                       std::max(0.0, s.pushback_rate - target.max_pushback_rate);
  }
  for (auto& pt : out.points) {
    if (!pt.scores) continue;
    pt.on_frontier = std::none_of(out.points.begin(), out.points.end(), [&](const auto& o) {
      if (!o.scores) return false;
      const bool no_worse = o.scores->overlap_rate <= pt.scores->overlap_rate &&
                            o.scores->pushback_rate <= pt.scores->pushback_rate;
      const bool better = o.scores->overlap_rate < pt.scores->overlap_rate ||
                          o.scores->pushback_rate < pt.scores->pushback_rate;
      return no_worse && better;
    });
  }

  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const auto& pt = out.points[i];
    if (pt.feasible && (!out.winner || pt.objective < out.points[*out.winner].objective)) {
      out.winner = i;
    }
  }
  if (!out.winner) {
    for (std::size_t i = 0; i < out.points.size(); ++i) {
      if (out.points[i].scores) out.nearest.push_back(i);
    }
    std::stable_sort(out.nearest.begin(), out.nearest.end(), [&](std::size_t a, std::size_t b) {
      return out.points[a].infeasibility < out.points[b].infeasibility;
    });
    if (out.nearest.size() > 5) out.nearest.resize(5);
  }

  if (out.winner && reference) {
    sim::SimParams p = base;
    for (const auto& [name, value] : out.points[*out.winner].setting) set_variable(p, name, value);
    const auto outcome = evaluate(p);
    out.welch = metrics::welch_t_test(metrics::summarize_sample(outcome.flow.speed_samples),
                                      *reference);
  }
  return out;
}

std::vector<CalibrationAxis> default_calibration_grid() {
  return {{"influence_diameter", {1.0, 1.2, 1.67}},
          {"a_max", {0.75, 1.0, 1.75}},
          {"vmax_mean", {1.5, 1.65, 1.775}}};
}

OnewayTwowayResult experiment_oneway_twoway(const sim::SimParams& base,
                                            const std::vector<double>& densities,
                                            int replications, unsigned threads) {
  OnewayTwowayResult out;
  SweepSpec spec;
  spec.variable = "n_pedestrians";
  spec.values = densities;
  spec.replications = replications;
  spec.base = base;
  spec.base.n_ways = 1;
  out.oneway = run_sweep(spec, threads);
  spec.base.n_ways = 2;
  out.twoway = run_sweep(spec, threads);
  return out;
}

ElderlyResult experiment_elderly(const sim::SimParams& base, const std::vector<double>& fractions,
                                 int replications, unsigned threads) {
  ElderlyResult out;
  SweepSpec spec;
  spec.variable = "elderly_fraction";
  spec.values = fractions;
  spec.replications = replications;
  spec.base = base;
  spec.base.n_ways = 1;
  spec.base.n_pedestrians = 75;
  spec.base.vmax_mean = 1.47;
  spec.base.elderly_vmax = 0.84;
  out.sweep = run_sweep(spec, threads);

  std::vector<std::pair<double, double>> linear_pts, log_pts;
  for (double f : fractions) {
    double sum = 0.0;
    int n = 0;
    for (const auto& row : out.sweep.rows) {
      if (row.value != f || !row.scores) continue;
      sum += row.scores->v_bar_sys;
      ++n;
      linear_pts.emplace_back(100.0 * f, row.scores->v_bar_sys);
      log_pts.emplace_back(1.0 + 100.0 * f, row.scores->v_bar_sys);
    }
    out.speed_by_fraction.emplace_back(f, n ? sum / n : std::nan(""));
  }
  out.linear_fit = metrics::fit_fundamental(linear_pts, metrics::FundamentalModel::linear);
  out.log_fit = metrics::fit_fundamental(log_pts, metrics::FundamentalModel::logarithmic);
  return out;
}

CrossingResult experiment_crossing_policy(const sim::SimParams& base,
                                          const std::vector<double>& densities,
                                          int replications, unsigned threads) {
  CrossingResult out;
  SweepSpec spec;
  spec.variable = "n_pedestrians";
  spec.values = densities;
  spec.replications = replications;
  spec.base = base;
  spec.base.n_ways = 2;
  spec.base.scenario = sim::Scenario::mixed;
  out.mixed = run_sweep(spec, threads);
  spec.base.scenario = sim::Scenario::segregated;
  out.segregated = run_sweep(spec, threads);
  return out;
}

}  // namespace pedflow::lab
