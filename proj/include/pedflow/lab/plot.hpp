#ifndef PEDFLOW_LAB_PLOT_HPP
#define PEDFLOW_LAB_PLOT_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pedflow/metrics/flow.hpp"

namespace pedflow::lab {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 420;
};

struct FitCurve {
  std::string label;
  std::function<double(double)> f;
};

/// Standalone SVG documents with labelled, numbered axes. Each throws
/// DomainError when there is nothing to draw.
void write_scatter_svg(std::ostream& out, const std::vector<Series>& series,
                       const std::vector<FitCurve>& fits, const PlotOptions& options);
void write_profile_svg(std::ostream& out, const std::vector<Series>& series,
                       const PlotOptions& options);
void write_histogram_svg(std::ostream& out, const std::vector<metrics::HistogramBin>& bins,
                         const PlotOptions& options);

/// About `target` round-numbered tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 6);

}  // namespace pedflow::lab

#endif  // PEDFLOW_LAB_PLOT_HPP
