#include "pedflow/lab/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "pedflow/errors.hpp"
#include "pedflow/text.hpp"

namespace pedflow::lab {

namespace {

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#17becf"};
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double d = lo == 0.0 ? 1.0 : 0.1 * std::abs(lo);
      lo -= d;
      hi += d;
    }
  }
};

/// Maps data to pixels and draws the frame, ticks and labels.
class Canvas {
 public:
  Canvas(std::ostream& out, const PlotOptions& o, Range x, Range y)
      : out_(out), o_(o), x_(x), y_(y) {
    x_.pad();
    y_.pad();
    xt_ = nice_ticks(x_.lo, x_.hi);
    yt_ = nice_ticks(y_.lo, y_.hi);
    x_.lo = std::min(x_.lo, xt_.front()), x_.hi = std::max(x_.hi, xt_.back());
    y_.lo = std::min(y_.lo, yt_.front()), y_.hi = std::max(y_.hi, yt_.back());
    pw_ = o.width - kLeft - kRight;
    ph_ = o.height - kTop - kBottom;
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * pw_; }
  double py(double y) const { return kTop + ph_ - (y - y_.lo) / (y_.hi - y_.lo) * ph_; }
  const Range& xr() const { return x_; }

  void begin() {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o_.width << "\" height=\""
         << o_.height << "\" viewBox=\"0 0 " << o_.width << ' ' << o_.height
         << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out_ << "<text x=\"" << o_.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
         << escape(o_.title) << "</text>\n";
    out_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw_ << "\" height=\""
         << ph_ << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : xt_) {
      const double x = px(t);
      out_ << "<line x1=\"" << x << "\" y1=\"" << kTop + ph_ << "\" x2=\"" << x << "\" y2=\""
           << kTop + ph_ + 5 << "\" stroke=\"black\"/>\n";
      out_ << "<text x=\"" << x << "\" y=\"" << kTop + ph_ + 18
           << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    for (double t : yt_) {
      const double y = py(t);
      out_ << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\""
           << y << "\" stroke=\"black\"/>\n";
      out_ << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
           << tick_label(t) << "</text>\n";
    }
    out_ << "<text x=\"" << kLeft + pw_ / 2 << "\" y=\"" << o_.height - 12
         << "\" text-anchor=\"middle\">" << escape(o_.x_label) << "</text>\n";
    out_ << "<text x=\"16\" y=\"" << kTop + ph_ / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
         << kTop + ph_ / 2 << ")\">" << escape(o_.y_label) << "</text>\n";
  }

  void legend(std::size_t i, const std::string& label, const char* color) {
    if (label.empty()) return;
    const double y = kTop + 14 + 14 * static_cast<double>(i);
    out_ << "<rect x=\"" << kLeft + pw_ - 150 << "\" y=\"" << y - 8 << "\" width=\"10\" height=\"10\" fill=\""
         << color << "\"/>\n";
    out_ << "<text x=\"" << kLeft + pw_ - 135 << "\" y=\"" << y + 1 << "\">" << escape(label)
         << "</text>\n";
  }

  void end() { out_ << "</svg>\n"; }

 private:
  std::ostream& out_;
  const PlotOptions& o_;
  Range x_, y_;
  std::vector<double> xt_, yt_;
  double pw_ = 0.0, ph_ = 0.0;
};

void require_points(const std::vector<Series>& series) {
  const bool any = std::any_of(series.begin(), series.end(),
                               [](const Series& s) { return !s.points.empty(); });
  if (!any) throw DomainError("nothing to plot: every series is empty");
}

}  // namespace

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target - 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const double start = std::floor(lo / step) * step;
  for (int i = 0;; ++i) {
    const double t = start + i * step;
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    if (t >= hi - step * 1e-9) break;
  }
  return ticks;
}

void write_scatter_svg(std::ostream& out, const std::vector<Series>& series,
                       const std::vector<FitCurve>& fits, const PlotOptions& options) {
  require_points(series);
  Range xr, yr;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) xr.add(x), yr.add(y);
  }
  Canvas c(out, options, xr, yr);
  c.begin();
  std::size_t legend = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % kColors.size()];
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out << "<circle cx=\"" << c.px(x) << "\" cy=\"" << c.py(y) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    c.legend(legend++, series[i].label, color);
  }
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const char* color = kColors[(series.size() + i) % kColors.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    constexpr int kSteps = 100;
    for (int j = 0; j <= kSteps; ++j) {
      const double x = xr.lo + (xr.hi - xr.lo) * j / kSteps;
      const double y = fits[i].f(x);
      if (std::isfinite(y)) out << c.px(x) << ',' << c.py(y) << ' ';
    }
    out << "\"/>\n";
    c.legend(legend++, fits[i].label, color);
  }
  c.end();
}

void write_profile_svg(std::ostream& out, const std::vector<Series>& series,
                       const PlotOptions& options) {
  require_points(series);
  Range xr, yr;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) xr.add(x), yr.add(y);
  }
  Canvas c(out, options, xr, yr);
  c.begin();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % kColors.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : series[i].points) {
      if (std::isfinite(x) && std::isfinite(y)) out << c.px(x) << ',' << c.py(y) << ' ';
    }
    out << "\"/>\n";
    c.legend(i, series[i].label, color);
  }
  c.end();
}

void write_histogram_svg(std::ostream& out, const std::vector<metrics::HistogramBin>& bins,
                         const PlotOptions& options) {
  if (bins.empty()) throw DomainError("nothing to plot: histogram has no bins");
  Range xr, yr;
  yr.add(0.0);
  for (const auto& b : bins) xr.add(b.lo), xr.add(b.hi), yr.add(static_cast<double>(b.count));
  Canvas c(out, options, xr, yr);
  c.begin();
  for (const auto& b : bins) {
    const double x0 = c.px(b.lo), x1 = c.px(b.hi);
    const double y0 = c.py(static_cast<double>(b.count)), y1 = c.py(0.0);
    out << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0 << "\" height=\""
        << y1 - y0 << "\" fill=\"" << kColors[0] << "\" stroke=\"white\" data-count=\"" << b.count
        << "\"/>\n";
  }
  c.end();
}

}  // namespace pedflow::lab
