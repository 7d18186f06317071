#ifndef PEDFLOW_LAB_HARNESS_HPP
#define PEDFLOW_LAB_HARNESS_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pedflow/metrics/flow.hpp"
#include "pedflow/metrics/fundamental.hpp"
#include "pedflow/metrics/stats.hpp"
#include "pedflow/sim/engine.hpp"

namespace pedflow::lab {

/// One simulation together with its trap analysis and health rates.
struct RunOutcome {
  sim::RunResult run;
  metrics::FlowReport flow;
  sim::HealthRates health;
};

RunOutcome evaluate(const sim::SimParams& params);

/// Scalar summary of a run, as written to sweep and experiment tables.
struct RunScores {
  double v_bar_sys = 0.0;
  double u_bar_sys = 0.0;
  double d_bar_sys = 0.0;
  double dissipation_time = 0.0;
  double k_mean = 0.0;  ///< ped/m²
  double n_mean = 0.0;  ///< mean pedestrians in the trap
  double speed_mean = 0.0;
  double speed_sd = 0.0;
  double overlap_rate = 0.0;
  double pushback_rate = 0.0;
  bool truncated = false;
};

RunScores score(const RunOutcome& outcome, const sim::SimParams& params);

/// Runs `count` jobs on up to `threads` workers (0 = hardware concurrency).
/// Jobs are independent; callers store results by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job,
                  unsigned threads = 0);

struct SweepSpec {
  std::string variable = "n_pedestrians";
  std::vector<double> values;
  int replications = 1;
  sim::SimParams base;

  /// Throws ConfigError on an empty value list, replications < 1 or an
  /// unknown variable.
  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  int replication = 0;
  std::uint64_t seed = 0;
  std::optional<RunScores> scores;
  std::string error;  ///< set when the run failed
};

struct SweepResult {
  SweepSpec spec;
  /// Value-major, replication-minor order.
  std::vector<SweepRow> rows;
  /// u-k fits over successful rows when the variable is n_pedestrians.
  std::optional<metrics::FundamentalFit> linear_fit;
  std::optional<metrics::FundamentalFit> log_fit;
};

/// Replication r of every value uses seed base.seed + r, so values are
/// compared on matched crowds. A failed run is recorded and the sweep goes on.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// (k_mean, v_bar_sys) of the successful rows.
std::vector<std::pair<double, double>> uk_points(const SweepResult& sweep);

struct CalibrationTarget {
  double speed_mean = 1.38;
  double speed_std = 0.37;
  double max_overlap_rate = 0.02;
  double max_pushback_rate = 0.02;
};

struct CalibrationAxis {
  std::string variable;
  std::vector<double> values;
};

struct CalibrationPoint {
  std::vector<std::pair<std::string, double>> setting;
  std::optional<RunScores> scores;
  std::string error;
  bool feasible = false;
  /// (mean - target)² + (sd - target)²; infinite for failed runs.
  double objective = 0.0;
  /// How far the rates exceed their caps; 0 when feasible.
  double infeasibility = 0.0;
  /// Not dominated in (overlap_rate, pushback_rate) by any other point.
  bool on_frontier = false;
};

struct CalibrationResult {
  std::vector<CalibrationPoint> points;
  std::optional<std::size_t> winner;
  /// Closest points to the caps when nothing is feasible, best first.
  std::vector<std::size_t> nearest;
  std::optional<metrics::WelchResult> welch;
};

/// Grid search over the cartesian product of `axes`. Rates must be strictly
/// below their caps. With `reference`, the winner's trap speed sample is
/// compared against it by Welch's test. Throws ConfigError on an empty grid.
CalibrationResult calibrate(const sim::SimParams& base, const std::vector<CalibrationAxis>& axes,
                            const CalibrationTarget& target,
                            std::optional<metrics::SampleSummary> reference = std::nullopt,
                            unsigned threads = 0);

/// The fall-back grid used when the reference parameter set misses the band.
std::vector<CalibrationAxis> default_calibration_grid();

struct OnewayTwowayResult {
  SweepResult oneway;
  SweepResult twoway;
};
OnewayTwowayResult experiment_oneway_twoway(const sim::SimParams& base,
                                            const std::vector<double>& densities,
                                            int replications, unsigned threads = 0);

struct ElderlyResult {
  SweepResult sweep;
  /// Mean system speed per fraction, in fraction order.
  std::vector<std::pair<double, double>> speed_by_fraction;
  /// Speed against elderly percentage: linear, and logarithmic in (1 + percent).
  metrics::FundamentalFit linear_fit;
  metrics::FundamentalFit log_fit;
};
/// One-way, 75 pedestrians, normal vmax 1.47 m/s and elderly vmax 0.84 m/s.
ElderlyResult experiment_elderly(const sim::SimParams& base, const std::vector<double>& fractions,
                                 int replications, unsigned threads = 0);

struct CrossingResult {
  SweepResult mixed;
  SweepResult segregated;
};
CrossingResult experiment_crossing_policy(const sim::SimParams& base,
                                          const std::vector<double>& densities,
                                          int replications, unsigned threads = 0);

}  // namespace pedflow::lab

#endif  // PEDFLOW_LAB_HARNESS_HPP
