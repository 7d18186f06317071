#ifndef PEDFLOW_LAB_REPORT_HPP
#define PEDFLOW_LAB_REPORT_HPP

#include <filesystem>
#include <fstream>
#include <vector>

#include "pedflow/lab/harness.hpp"
#include "pedflow/lab/lanes.hpp"
#include "pedflow/metrics/flow.hpp"
#include "pedflow/metrics/fundamental.hpp"
#include "pedflow/sim/engine.hpp"
#include "pedflow/tracker/tracker.hpp"

namespace pedflow::lab {

// CSV writers. Numbers use the shortest round-trip form, so reruns are
// byte-identical.

void write_instant_csv(std::ostream& out, const std::vector<metrics::InstantReport>& rows);
void write_system_csv(std::ostream& out, const std::vector<metrics::SystemReport>& rows);
void write_fit_csv(std::ostream& out, const std::vector<metrics::FundamentalFit>& fits);
void write_histogram_csv(std::ostream& out, const std::vector<metrics::HistogramBin>& bins);
void write_diagnostics_csv(std::ostream& out, const std::vector<sim::StepDiagnostics>& rows);
/// Result rows go to `out`, failed runs to `failures`.
void write_sweep_csv(std::ostream& out, std::ostream& failures, const SweepResult& sweep);
void write_calibration_csv(std::ostream& out, const CalibrationResult& result);
void write_events_csv(std::ostream& out, const std::vector<tracker::TrackEvent>& events);
void write_lanes_csv(std::ostream& out, const std::vector<LaneReport>& rows);

/// Opens `path` for writing or throws std::ios_base::failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace pedflow::lab

#endif  // PEDFLOW_LAB_REPORT_HPP
