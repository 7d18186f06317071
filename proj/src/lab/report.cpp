#include "pedflow/lab/report.hpp"

#include <fstream>
#include <ostream>

#include "pedflow/text.hpp"

namespace pedflow::lab {

namespace {

std::string num(double v) { return text::format_double(v); }
std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

void write_instant_csv(std::ostream& out, const std::vector<metrics::InstantReport>& rows) {
  out << "t,n,v_tilde,d_tilde,u_tilde,k\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.n << ',' << num(r.v_tilde) << ',' << num(r.d_tilde) << ','
        << num(r.u_tilde) << ',' << num(r.k) << '\n';
  }
}

void write_system_csv(std::ostream& out, const std::vector<metrics::SystemReport>& rows) {
  out << "t_first,t_last,n_pedestrians,v_bar_sys,d_bar_sys,u_bar_sys,dissipation_time,k_mean,"
         "speed_mean,speed_sd,accel_mean,accel_sd\n";
  for (const auto& r : rows) {
    out << r.t_first << ',' << r.t_last << ',' << r.n_pedestrians << ',' << num(r.v_bar_sys)
        << ',' << num(r.d_bar_sys) << ',' << num(r.u_bar_sys) << ',' << num(r.dissipation_time)
        << ',' << num(r.k_mean) << ',' << num(r.speed_stats.mean) << ','
        << num(r.speed_stats.sd) << ',' << num(r.accel_stats.mean) << ','
        << num(r.accel_stats.sd) << '\n';
  }
}

void write_fit_csv(std::ostream& out, const std::vector<metrics::FundamentalFit>& fits) {
  out << "model,c0,c1,r2,mf,kj,Q\n";
  for (const auto& f : fits) {
    out << metrics::to_string(f.model) << ',' << num(f.c0) << ',' << num(f.c1) << ','
        << num(f.r2) << ',' << opt(f.m_f) << ',' << opt(f.k_j) << ',' << opt(f.capacity)
        << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::vector<metrics::HistogramBin>& bins) {
  out << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) out << num(b.lo) << ',' << num(b.hi) << ',' << b.count << '\n';
}

void write_diagnostics_csv(std::ostream& out, const std::vector<sim::StepDiagnostics>& rows) {
  out << "t,active,overlap_count,pushback_count,max_accel,max_speed_excess\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.active << ',' << r.overlap_count << ',' << r.pushback_count << ','
        << num(r.max_accel) << ',' << num(r.max_speed_excess) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::ostream& failures, const SweepResult& sweep) {
  out << sweep.spec.variable
      << ",replication,seed,v_bar_sys,u_bar_sys,d_bar_sys,dissipation_time,k_mean,n_mean,"
         "speed_mean,speed_sd,overlap_rate,pushback_rate,truncated\n";
  failures << sweep.spec.variable << ",replication,seed,error\n";
  for (const auto& row : sweep.rows) {
    if (!row.scores) {
      failures << num(row.value) << ',' << row.replication << ',' << row.seed << ",\""
               << row.error << "\"\n";
      continue;
    }
    const auto& s = *row.scores;
    out << num(row.value) << ',' << row.replication << ',' << row.seed << ','
        << num(s.v_bar_sys) << ',' << num(s.u_bar_sys) << ',' << num(s.d_bar_sys) << ','
        << num(s.dissipation_time) << ',' << num(s.k_mean) << ',' << num(s.n_mean) << ','
        << num(s.speed_mean) << ',' << num(s.speed_sd) << ',' << num(s.overlap_rate) << ','
        << num(s.pushback_rate) << ',' << (s.truncated ? 1 : 0) << '\n';
  }
}

void write_calibration_csv(std::ostream& out, const CalibrationResult& result) {
  if (result.points.empty()) return;
  for (const auto& [name, value] : result.points.front().setting) out << name << ',';
  out << "speed_mean,speed_sd,overlap_rate,pushback_rate,objective,feasible,frontier,winner\n";
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& pt = result.points[i];
    for (const auto& [name, value] : pt.setting) out << num(value) << ',';
    if (pt.scores) {
      out << num(pt.scores->speed_mean) << ',' << num(pt.scores->speed_sd) << ','
          << num(pt.scores->overlap_rate) << ',' << num(pt.scores->pushback_rate) << ',';
    } else {
      out << ",,,,";
    }
    out << num(pt.objective) << ',' << (pt.feasible ? 1 : 0) << ',' << (pt.on_frontier ? 1 : 0)
        << ',' << (result.winner == i ? 1 : 0) << '\n';
  }
}

void write_events_csv(std::ostream& out, const std::vector<tracker::TrackEvent>& events) {
  out << "kind,object_id,first,last\n";
  for (const auto& e : events) {
    out << tracker::to_string(e.kind) << ',' << e.object_id << ',' << e.first << ',' << e.last
        << '\n';
  }
}

void write_lanes_csv(std::ostream& out, const std::vector<LaneReport>& rows) {
  out << "t,group,lane_count,mean_width\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.group << ',' << r.lane_count << ',' << num(r.mean_width) << '\n';
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  return out;
}

}  // namespace pedflow::lab
