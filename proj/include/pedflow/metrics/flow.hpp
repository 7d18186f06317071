#ifndef PEDFLOW_METRICS_FLOW_HPP
#define PEDFLOW_METRICS_FLOW_HPP

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pedflow/atxy.hpp"

namespace pedflow::metrics {

/// ((t-1)/t)·prev + z/t. Throws DomainError when t < 1.
double recursive_mean(double prev, std::int64_t t, double z);

/// Running per-pedestrian speed statistics inside the trap.
struct PerPedAccumulator {
  PedId ped_id = 0;
  std::int64_t t_count = 0;
  double v_bar = 0.0;
  double v2_bar = 0.0;
  double w = 0.0;  ///< walked distance, metres
  std::optional<double> vmax;

  /// Adds one speed sample covering `distance` metres.
  void add(double speed, double distance);
};

/// |x(t) - x(t-1)| / dt. Throws DomainError when either record is missing.
double instantaneous_speed(const AtxyDatabase& db, PedId ped_id, Frame t);

/// 1 - v_bar²/v2_bar, or 0 for a pedestrian that never moved.
double uncomfortability(const PerPedAccumulator& acc);

/// w/v_bar - w/vmax, or 0 when nothing was walked. Throws DomainError
/// without vmax.
double delay(const PerPedAccumulator& acc);

struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;  ///< sample standard deviation (n - 1)
  std::size_t n = 0;
};
SummaryStats summarize(const std::vector<double>& xs);

struct InstantReport {
  Frame t = 0;
  int n = 0;  ///< pedestrians in the trap
  double v_tilde = 0.0;
  double d_tilde = 0.0;
  double u_tilde = 0.0;
  double k = 0.0;  ///< ped/m²
};

struct SystemReport {
  Frame t_first = 0;
  Frame t_last = 0;
  double v_bar_sys = 0.0;
  double d_bar_sys = 0.0;
  double u_bar_sys = 0.0;
  double dissipation_time = 0.0;
  double k_mean = 0.0;
  int n_pedestrians = 0;
  SummaryStats speed_stats;
  SummaryStats accel_stats;
};

struct FlowReport {
  std::vector<InstantReport> instant;
  /// One report per contiguous busy period of the trap.
  std::vector<SystemReport> periods;
  /// Whole-database time averages.
  SystemReport system;
  /// Pedestrians with no vmax entry; their delay is left out.
  std::vector<PedId> missing_vmax;
  std::map<PedId, PerPedAccumulator> accumulators;
  std::vector<double> speed_samples;
};

/// Flow performances over the records inside the database trap.
/// Instant rows exist for frames with at least one speed sample; a speed
/// sample needs the pedestrian in the trap at t-1 and t. Throws DomainError
/// when the database has no trap.
FlowReport analyze(const AtxyDatabase& db, const std::map<PedId, double>& vmax_map);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};
/// Bins aligned to multiples of `width`, from the smallest to the largest sample.
std::vector<HistogramBin> histogram(const std::vector<double>& xs, double width = 0.1);

inline double flow_rate(double n, double T, double w) { return n / (T * w); }
inline double space_mean_speed(double L, double t_bar) { return L / t_bar; }
inline double area_module(double w, double L, double T, double n, double t_bar) {
  return (w * L * T) / (n * t_bar);
}

/// Frame range the database was observed over; pedestrians whose trap
/// presence touches either end have no complete crossing.
struct ObservationWindow {
  Frame first = 0;
  Frame last = 0;
};

struct MacroReport {
  double q = 0.0;                ///< ped/s/m
  double time_mean_speed = 0.0;  ///< mean of spot speeds
  double space_mean_speed = 0.0; ///< L / mean travel time
  double area_module = 0.0;      ///< m²/ped
  double k = 0.0;                ///< mean density over T, ped/m²
  double T = 0.0;                ///< first entry to last exit, s
  double t_bar = 0.0;            ///< mean travel time, s
  int n = 0;
  std::vector<PedId> censored;
};

/// Macroscopic flow over complete trap crossings. Without a window every
/// pedestrian counts as complete.
MacroReport macroscopic(const AtxyDatabase& db,
                        std::optional<ObservationWindow> window = std::nullopt);

/// Walking direction of each pedestrian from the sign of its mean Y velocity.
std::map<PedId, Eigen::Vector2d> infer_directions(const AtxyDatabase& db);

/// Mean over pedestrians of time-averaged v·e / vmax, clamped to [-1, 1].
/// Pedestrians without a direction, vmax or speed sample are skipped.
double efficiency(const AtxyDatabase& db, const std::map<PedId, Eigen::Vector2d>& directions,
                  const std::map<PedId, double>& vmax_map);

}  // namespace pedflow::metrics

#endif  // PEDFLOW_METRICS_FLOW_HPP
