// pedflow: command-line front end for the simulator, metrics, tracker and
// experiment harness. Exit status: 0 ok, 2 configuration error, 3 runtime
// fault, 4 empty feasible set.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pedflow/atxy.hpp"
#include "pedflow/config.hpp"
#include "pedflow/errors.hpp"
#include "pedflow/lab/harness.hpp"
#include "pedflow/lab/lanes.hpp"
#include "pedflow/lab/plot.hpp"
#include "pedflow/lab/report.hpp"
#include "pedflow/lab/scenario.hpp"
#include "pedflow/metrics/flow.hpp"
#include "pedflow/metrics/fundamental.hpp"
#include "pedflow/metrics/stats.hpp"
#include "pedflow/sim/engine.hpp"
#include "pedflow/text.hpp"
#include "pedflow/tracker/tracker.hpp"

namespace fs = std::filesystem;
using namespace pedflow;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitInfeasible = 4;

struct Globals {
  std::string config;
  fs::path out = ".";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int decimate = 0;
  bool quiet = false;
  unsigned threads = 0;
};

class Cli {
 public:
  explicit Cli(Globals& g) : g_(g) {}

  void note(const std::string& msg) const {
    if (!g_.quiet) std::cerr << msg << '\n';
  }
  static void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

  IniDocument document() const {
    if (g_.config.empty()) return IniDocument{};
    try {
      return IniDocument::parse_file(g_.config);
    } catch (const ParseError& e) {
      throw ConfigError(g_.config + ": " + e.what());
    }
  }

  sim::SimParams sim_params(const IniDocument& doc) const {
    auto p = lab::sim_params_from(doc, g_.has_seed ? std::optional(g_.seed) : std::nullopt);
    if (g_.decimate > 0) {
      p.decimation = g_.decimate;
      p.validate();
    }
    return p;
  }

  fs::path out(const std::string& name) const {
    fs::create_directories(g_.out);
    return g_.out / name;
  }

  template <class Writer>
  void write(const std::string& name, Writer&& writer) const {
    auto f = lab::open_output(out(name));
    writer(f);
    if (!f) throw std::ios_base::failure("error writing " + out(name).string());
  }

  /// Plot writers throw DomainError on empty input; that is a warning here.
  void plot(const std::string& name, const std::function<void(std::ostream&)>& draw) const {
    std::ostringstream svg;
    try {
      draw(svg);
    } catch (const DomainError& e) {
      warn("skipped " + name + ": " + e.what());
      return;
    }
    write(name, [&](std::ostream& f) { f << svg.str(); });
  }

  unsigned threads() const { return g_.threads; }

 private:
  Globals& g_;
};

std::string num(double v) { return text::format_double(v); }

std::vector<double> doubles_or(const IniDocument& doc, const char* section, const char* key,
                               std::vector<double> fallback) {
  if (auto v = doc.get_doubles(section, key)) return *v;
  return fallback;
}

int int_or(const IniDocument& doc, const char* section, const char* key, int fallback) {
  if (auto v = doc.get_int(section, key)) return static_cast<int>(*v);
  return fallback;
}

lab::FitCurve curve(const metrics::FundamentalFit& f, const std::string& prefix) {
  return {prefix + std::string(metrics::to_string(f.model)) + " r2=" +
              text::format_double(std::round(f.r2 * 1000.0) / 1000.0),
          [f](double k) { return f.predict(k); }};
}

std::vector<metrics::FundamentalFit> fit_all(const Cli& cli,
                                             const std::vector<std::pair<double, double>>& pts,
                                             std::initializer_list<metrics::FundamentalModel> models) {
  std::vector<metrics::FundamentalFit> fits;
  for (auto m : models) {
    try {
      fits.push_back(metrics::fit_fundamental(pts, m));
    } catch (const std::exception& e) {
      cli.warn(std::string(metrics::to_string(m)) + " fit skipped: " + e.what());
    }
  }
  return fits;
}

lab::Series series_of(const std::string& label, const lab::SweepResult& sweep,
                      double lab::RunScores::*x, double lab::RunScores::*y) {
  lab::Series s{label, {}};
  for (const auto& row : sweep.rows) {
    if (row.scores) s.points.emplace_back((*row.scores).*x, (*row.scores).*y);
  }
  return s;
}

lab::Series by_value(const std::string& label, const lab::SweepResult& sweep,
                     double lab::RunScores::*y) {
  lab::Series s{label, {}};
  for (const auto& row : sweep.rows) {
    if (row.scores) s.points.emplace_back(row.value, (*row.scores).*y);
  }
  return s;
}

void write_sweep(const Cli& cli, const std::string& stem, const lab::SweepResult& sweep) {
  std::ostringstream failures;
  cli.write(stem + ".csv", [&](std::ostream& f) { lab::write_sweep_csv(f, failures, sweep); });
  cli.write(stem + "_failures.csv", [&](std::ostream& f) { f << failures.str(); });
  std::size_t failed = 0;
  for (const auto& row : sweep.rows) failed += row.scores ? 0 : 1;
  if (failed > 0) cli.warn(stem + ": " + std::to_string(failed) + " run(s) failed");
}

std::vector<metrics::FundamentalFit> sweep_fits(const lab::SweepResult& sweep) {
  std::vector<metrics::FundamentalFit> fits;
  if (sweep.linear_fit) fits.push_back(*sweep.linear_fit);
  if (sweep.log_fit) fits.push_back(*sweep.log_fit);
  return fits;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Cli& cli) {
  const auto doc = cli.document();
  const auto p = cli.sim_params(doc);
  const auto outcome = lab::evaluate(p);
  const auto& run = outcome.run;
  const auto& flow = outcome.flow;

  cli.write("trap.atxy", [&](std::ostream& f) { write_atxy(run.trap_db, f); });
  cli.write("full.atxy", [&](std::ostream& f) { write_atxy(run.full_db, f); });
  cli.write("diagnostics.csv", [&](std::ostream& f) { lab::write_diagnostics_csv(f, run.diagnostics); });
  cli.write("system.csv", [&](std::ostream& f) { lab::write_system_csv(f, {flow.system}); });
  cli.write("instant.csv", [&](std::ostream& f) { lab::write_instant_csv(f, flow.instant); });
  cli.write("vmax.csv", [&](std::ostream& f) {
    f << "ped_id,vmax\n";
    for (const auto& [id, v] : run.vmax_map()) f << id << ',' << num(v) << '\n';
  });
  if (!flow.speed_samples.empty()) {
    const auto bins = metrics::histogram(flow.speed_samples);
    cli.write("hist_speed.csv", [&](std::ostream& f) { lab::write_histogram_csv(f, bins); });
  }

  if (run.truncated) cli.warn("run hit t_max before every pedestrian arrived");
  std::ostringstream msg;
  msg << "n=" << p.n_pedestrians << " seed=" << p.seed << " v_bar=" << num(flow.system.v_bar_sys)
      << " speed=" << num(flow.system.speed_stats.mean) << "+-" << num(flow.system.speed_stats.sd)
      << " overlap=" << num(outcome.health.overlap_rate)
      << " pushback=" << num(outcome.health.pushback_rate);
  cli.note(msg.str());
  return 0;
}

struct SweepArgs {
  std::string variable;
  std::vector<double> values;
  int replications = 0;
};

int cmd_sweep(const Cli& cli, const SweepArgs& args) {
  const auto doc = cli.document();
  lab::SweepSpec spec;
  spec.base = cli.sim_params(doc);
  spec.variable = args.variable.empty()
                      ? doc.get_string("sweep", "variable").value_or("n_pedestrians")
                      : args.variable;
  spec.values = args.values.empty() ? doubles_or(doc, "sweep", "values", {}) : args.values;
  spec.replications =
      args.replications > 0 ? args.replications : int_or(doc, "sweep", "replications", 1);
  spec.validate();

  const auto sweep = lab::run_sweep(spec, cli.threads());
  write_sweep(cli, "sweep", sweep);
  const auto fits = sweep_fits(sweep);
  if (!fits.empty()) {
    cli.write("fit.csv", [&](std::ostream& f) { lab::write_fit_csv(f, fits); });
    std::vector<lab::FitCurve> curves;
    for (const auto& fit : fits) curves.push_back(curve(fit, ""));
    cli.plot("uk.svg", [&](std::ostream& f) {
      lab::write_scatter_svg(f, {series_of("runs", sweep, &lab::RunScores::k_mean,
                                           &lab::RunScores::v_bar_sys)},
                             curves, {"Speed-density", "k (ped/m2)", "v (m/s)"});
    });
  } else {
    cli.plot("sweep.svg", [&](std::ostream& f) {
      lab::write_scatter_svg(f, {by_value("runs", sweep, &lab::RunScores::v_bar_sys)}, {},
                             {"Sweep of " + spec.variable, spec.variable, "v (m/s)"});
    });
  }
  cli.note("sweep " + spec.variable + ": " + std::to_string(sweep.rows.size()) + " runs");
  return 0;
}

int cmd_calibrate(const Cli& cli) {
  const auto doc = cli.document();
  const auto base = cli.sim_params(doc);

  lab::CalibrationTarget target;
  if (auto v = doc.get_double("calibrate", "target_speed_mean")) target.speed_mean = *v;
  if (auto v = doc.get_double("calibrate", "target_speed_std")) target.speed_std = *v;
  if (auto v = doc.get_double("calibrate", "max_overlap_rate")) target.max_overlap_rate = *v;
  if (auto v = doc.get_double("calibrate", "max_pushback_rate")) target.max_pushback_rate = *v;

  std::vector<lab::CalibrationAxis> axes;
  for (const auto& var : lab::sweep_variables()) {
    if (auto values = doc.get_doubles("calibrate", var)) axes.push_back({var, *values});
  }
  if (axes.empty()) {
    axes = lab::default_calibration_grid();
    cli.note("no grid in [calibrate]; using the default grid");
  }

  std::optional<metrics::SampleSummary> reference;
  const auto rm = doc.get_double("calibrate", "reference_mean");
  const auto rv = doc.get_double("calibrate", "reference_var");
  const auto rn = doc.get_double("calibrate", "reference_n");
  if (rm || rv || rn) {
    if (!(rm && rv && rn)) {
      throw ConfigError("calibrate.reference_mean, reference_var and reference_n go together");
    }
    reference = metrics::SampleSummary{*rm, *rv, *rn};
  }

  const auto result = lab::calibrate(base, axes, target, reference, cli.threads());
  cli.write("calibration.csv", [&](std::ostream& f) { lab::write_calibration_csv(f, result); });

  if (!result.winner) {
    std::cerr << "no grid point meets the overlap/pushback caps; nearest:\n";
    for (std::size_t i : result.nearest) {
      const auto& pt = result.points[i];
      std::cerr << " ";
      for (const auto& [name, value] : pt.setting) std::cerr << ' ' << name << '=' << num(value);
      if (pt.scores) {
        std::cerr << "  overlap=" << num(pt.scores->overlap_rate)
                  << " pushback=" << num(pt.scores->pushback_rate);
      } else {
        std::cerr << "  error: " << pt.error;
      }
      std::cerr << '\n';
    }
    return kExitInfeasible;
  }

  const auto& win = result.points[*result.winner];
  auto best = base;
  for (const auto& [name, value] : win.setting) lab::set_variable(best, name, value);
  cli.write("calibrated.ini", [&](std::ostream& f) { lab::write_config(f, best); });
  if (result.welch) {
    cli.write("welch.csv", [&](std::ostream& f) {
      f << "t,df,p_one_tail,p_two_tail\n"
        << num(result.welch->t) << ',' << num(result.welch->df) << ','
        << num(result.welch->p_one_tail) << ',' << num(result.welch->p_two_tail) << '\n';
    });
  }
  std::ostringstream msg;
  msg << "winner:";
  for (const auto& [name, value] : win.setting) msg << ' ' << name << '=' << num(value);
  msg << "  speed=" << num(win.scores->speed_mean) << "+-" << num(win.scores->speed_sd);
  cli.note(msg.str());
  return 0;
}

void write_dissipation_fits(const Cli& cli, const lab::OnewayTwowayResult& r) {
  cli.write("dissipation_fit.csv", [&](std::ostream& f) {
    f << "series,model,c0,c1,r2\n";
    for (const auto* sweep : {&r.oneway, &r.twoway}) {
      const std::string name = sweep == &r.oneway ? "oneway" : "twoway";
      const auto pts = by_value(name, *sweep, &lab::RunScores::dissipation_time).points;
      try {
        const auto lin = metrics::fit_fundamental(pts, metrics::FundamentalModel::linear);
        f << name << ",linear," << num(lin.c0) << ',' << num(lin.c1) << ',' << num(lin.r2) << '\n';
        const auto pw = metrics::fit_power(pts);
        f << name << ",power," << num(pw.a) << ',' << num(pw.b) << ',' << num(pw.r2) << '\n';
      } catch (const std::exception& e) {
        cli.warn(name + " dissipation fit skipped: " + e.what());
      }
    }
  });
}

int cmd_experiment(const Cli& cli, const std::string& name) {
  const auto doc = cli.document();
  const auto base = cli.sim_params(doc);
  using S = lab::RunScores;

  if (name == "oneway_twoway") {
    const auto densities = doubles_or(doc, "experiment", "densities", {25, 50, 100, 150, 200});
    const int reps = int_or(doc, "experiment", "replications", 3);
    const auto r = lab::experiment_oneway_twoway(base, densities, reps, cli.threads());
    write_sweep(cli, "oneway", r.oneway);
    write_sweep(cli, "twoway", r.twoway);
    cli.write("fit_oneway.csv", [&](std::ostream& f) { lab::write_fit_csv(f, sweep_fits(r.oneway)); });
    cli.write("fit_twoway.csv", [&](std::ostream& f) { lab::write_fit_csv(f, sweep_fits(r.twoway)); });
    write_dissipation_fits(cli, r);
    std::vector<lab::FitCurve> curves;
    for (const auto& f : sweep_fits(r.oneway)) curves.push_back(curve(f, "one-way "));
    for (const auto& f : sweep_fits(r.twoway)) curves.push_back(curve(f, "two-way "));
    cli.plot("uk.svg", [&](std::ostream& f) {
      lab::write_scatter_svg(f,
                             {series_of("one-way", r.oneway, &S::k_mean, &S::v_bar_sys),
                              series_of("two-way", r.twoway, &S::k_mean, &S::v_bar_sys)},
                             curves, {"One and two way flow", "k (ped/m2)", "v (m/s)"});
    });
    cli.plot("dissipation.svg", [&](std::ostream& f) {
      lab::write_scatter_svg(f,
                             {by_value("one-way", r.oneway, &S::dissipation_time),
                              by_value("two-way", r.twoway, &S::dissipation_time)},
                             {}, {"Dissipation time", "pedestrians", "T (s)"});
    });
  } else if (name == "elderly") {
    const auto fractions = doubles_or(doc, "experiment", "fractions", {0, 0.25, 0.5, 0.75, 1.0});
    const int reps = int_or(doc, "experiment", "replications", 3);
    const auto r = lab::experiment_elderly(base, fractions, reps, cli.threads());
    write_sweep(cli, "elderly", r.sweep);
    cli.write("fit.csv", [&](std::ostream& f) { lab::write_fit_csv(f, {r.linear_fit, r.log_fit}); });
    lab::Series pts{"runs", {}};
    for (const auto& row : r.sweep.rows) {
      if (row.scores) pts.points.emplace_back(100.0 * row.value, row.scores->v_bar_sys);
    }
    const auto lin = r.linear_fit;
    const auto lg = r.log_fit;
    cli.plot("elderly.svg", [&](std::ostream& f) {
      lab::write_scatter_svg(
          f, {pts},
          {{"linear r2=" + num(std::round(lin.r2 * 1000) / 1000),
            [lin](double pct) { return lin.predict(pct); }},
           {"log r2=" + num(std::round(lg.r2 * 1000) / 1000),
            [lg](double pct) { return lg.predict(1.0 + pct); }}},
          {"Elderly pedestrians", "elderly (%)", "v (m/s)"});
    });
    std::ostringstream msg;
    for (const auto& [frac, v] : r.speed_by_fraction) msg << num(frac) << ':' << num(v) << ' ';
    cli.note("speed by fraction " + msg.str());
  } else if (name == "crossing_policy") {
    const auto densities = doubles_or(doc, "experiment", "densities", {100, 200, 300});
    const int reps = int_or(doc, "experiment", "replications", 5);
    const auto r = lab::experiment_crossing_policy(base, densities, reps, cli.threads());
    write_sweep(cli, "mixed", r.mixed);
    write_sweep(cli, "segregated", r.segregated);
    const std::vector<std::pair<std::string, double S::*>> panels = {
        {"speed", &S::v_bar_sys},
        {"uncomfortability", &S::u_bar_sys},
        {"delay", &S::d_bar_sys},
        {"dissipation", &S::dissipation_time}};
    for (const auto& [panel, field] : panels) {
      cli.plot("crossing_" + panel + ".svg", [&](std::ostream& f) {
        lab::write_scatter_svg(f,
                               {by_value("mixed", r.mixed, field),
                                by_value("segregated", r.segregated, field)},
                               {}, {"Crossing policy: " + panel, "pedestrians", panel});
      });
    }
  } else {
    throw ConfigError("unknown experiment '" + name +
                      "' (oneway_twoway, elderly, crossing_policy)");
  }
  cli.note("experiment " + name + " done");
  return 0;
}

struct TrackArgs {
  std::string descriptors;
  std::string synth_from;
  double noise = 0.02;
  int clutter = 0;
};

int cmd_track(const Cli& cli, const TrackArgs& args) {
  const auto doc = cli.document();
  tracker::DescriptorTable table;
  if (!args.synth_from.empty()) {
    const auto truth = read_atxy_file(args.synth_from);
    tracker::SynthOptions opt;
    opt.noise_sigma = args.noise;
    opt.clutter = args.clutter;
    if (auto seed = doc.get_uint("run", "seed")) opt.seed = *seed;
    table = tracker::synthesize_descriptors(truth, opt).table;
    cli.write("descriptors.csv", [&](std::ostream& f) { tracker::write_descriptors(f, table); });
  } else if (!args.descriptors.empty()) {
    table = tracker::read_descriptors_file(args.descriptors);
  } else {
    throw ConfigError("track needs a descriptor file or --synth-from");
  }
  const auto params = lab::tracker_params_from(doc, &table);
  const auto traced = tracker::trace(table, params);
  const auto rec = tracker::recognize(traced.table, params);

  cli.write("labeled.csv", [&](std::ostream& f) { tracker::write_descriptors(f, traced.table); });
  cli.write("events.csv", [&](std::ostream& f) { lab::write_events_csv(f, traced.events); });
  cli.write("tracked.atxy", [&](std::ostream& f) { write_atxy(rec.db, f); });
  cli.note(std::to_string(rec.renumbered.size()) + " tracks kept of " +
           std::to_string(rec.mean_motion_index.size()) + " scored");
  return 0;
}

std::map<PedId, double> read_vmax(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::map<PedId, double> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#' || (n == 1 && t.starts_with("ped_id"))) continue;
    const auto cells = text::split(t, ',');
    const auto id = cells.size() == 2 ? text::parse_int(cells[0]) : std::nullopt;
    const auto v = cells.size() == 2 ? text::parse_double(cells[1]) : std::nullopt;
    if (!id || !v) throw ParseError("expected ped_id,vmax", n);
    out[*id] = *v;
  }
  return out;
}

struct MetricsArgs {
  std::string atxy;
  std::string vmax_file;
  double vmax_all = 0.0;
  std::vector<double> trap;
};

int cmd_metrics(const Cli& cli, const MetricsArgs& args) {
  auto db = read_atxy_file(args.atxy);
  if (!args.trap.empty()) {
    if (args.trap.size() != 4) throw ConfigError("--trap needs xmin,ymin,xmax,ymax");
    db = AtxyDatabase(db.records(), db.dt_seconds(),
                      TrapRect{args.trap[0], args.trap[1], args.trap[2], args.trap[3]});
  }
  std::map<PedId, double> vmax;
  if (!args.vmax_file.empty()) vmax = read_vmax(args.vmax_file);
  if (args.vmax_all > 0.0) {
    for (PedId id : db.pedestrian_ids()) vmax.emplace(id, args.vmax_all);
  }

  const auto flow = metrics::analyze(db, vmax);
  if (!flow.missing_vmax.empty()) {
    cli.warn(std::to_string(flow.missing_vmax.size()) +
             " pedestrian(s) have no vmax; delay leaves them out");
  }
  cli.write("instant.csv", [&](std::ostream& f) { lab::write_instant_csv(f, flow.instant); });
  cli.write("system.csv", [&](std::ostream& f) { lab::write_system_csv(f, {flow.system}); });
  cli.write("periods.csv", [&](std::ostream& f) { lab::write_system_csv(f, flow.periods); });
  const auto bins = metrics::histogram(flow.speed_samples);
  cli.write("hist_speed.csv", [&](std::ostream& f) { lab::write_histogram_csv(f, bins); });

  std::vector<std::pair<double, double>> uk;
  for (const auto& r : flow.instant) uk.emplace_back(r.k, r.v_tilde);
  using M = metrics::FundamentalModel;
  const auto fits = fit_all(cli, uk, {M::linear, M::logarithmic, M::exponential, M::greenberg, M::bell});
  cli.write("fit.csv", [&](std::ostream& f) { lab::write_fit_csv(f, fits); });

  const auto macro = metrics::macroscopic(trim_to_trap_world(db, *db.trap()));
  cli.write("macro.csv", [&](std::ostream& f) {
    f << "q,time_mean_speed,space_mean_speed,area_module,k,T,t_bar,n,los\n"
      << num(macro.q) << ',' << num(macro.time_mean_speed) << ',' << num(macro.space_mean_speed)
      << ',' << num(macro.area_module) << ',' << num(macro.k) << ',' << num(macro.T) << ','
      << num(macro.t_bar) << ',' << macro.n << ','
      << (macro.n > 0 ? std::string(1, metrics::level_of_service(macro.area_module)) : "")
      << '\n';
  });
  cli.note("v_bar=" + num(flow.system.v_bar_sys) + " u_bar=" + num(flow.system.u_bar_sys) +
           " samples=" + std::to_string(flow.speed_samples.size()));
  return 0;
}

struct LanesArgs {
  std::string atxy;
  double gap = 0.0;
  Frame every = 15;
};

int cmd_lanes(const Cli& cli, const LanesArgs& args) {
  const auto doc = cli.document();
  double gap = args.gap;
  if (gap <= 0.0) gap = doc.get_double("pedestrian", "body_diameter").value_or(0.6);
  auto db = read_atxy_file(args.atxy);
  if (db.trap()) db = trim_to_trap_world(db, *db.trap());
  const auto rows = lab::lane_formation_report(db, lab::infer_groups(db), gap, args.every);
  cli.write("lanes.csv", [&](std::ostream& f) { lab::write_lanes_csv(f, rows); });

  std::map<int, std::pair<double, int>> acc;
  for (const auto& r : rows) acc[r.group].first += r.lane_count, ++acc[r.group].second;
  for (const auto& [group, s] : acc) {
    cli.note("group " + std::to_string(group) + ": mean lane count " + num(s.first / s.second));
  }
  lab::Series up{"toward +Y", {}}, down{"toward -Y", {}};
  for (const auto& r : rows) {
    (r.group > 0 ? up : down).points.emplace_back(static_cast<double>(r.t) * db.dt_seconds(),
                                                  r.lane_count);
  }
  cli.plot("lanes.svg", [&](std::ostream& f) {
    lab::write_profile_svg(f, {up, down}, {"Lane formation", "t (s)", "lanes"});
  });
  return 0;
}

/// Numeric CSV with a header row. Cells that do not parse become NaN.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ConfigError("no column '" + name + "'");
  }
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    const auto cells = text::split(text::trim(line), ',');
    if (t.header.empty()) {
      for (auto c : cells) t.header.emplace_back(text::trim(c));
      continue;
    }
    if (text::trim(line).empty()) continue;
    std::vector<double> row;
    for (auto c : cells) row.push_back(text::parse_double(text::trim(c)).value_or(std::nan("")));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct PlotArgs {
  std::string kind;
  std::string csv;
  std::string x, y, group, name, title;
  std::vector<std::string> fits;
};

int cmd_plot(const Cli& cli, const PlotArgs& args) {
  const Table t = read_table(args.csv);
  const std::string name = args.name.empty() ? fs::path(args.csv).stem().string() + ".svg"
                                             : args.name;
  const std::string title = args.title.empty() ? fs::path(args.csv).stem().string() : args.title;

  if (args.kind == "histogram") {
    const std::size_t lo = t.column("bin_lo"), hi = t.column("bin_hi"), n = t.column("count");
    std::vector<metrics::HistogramBin> bins;
    for (const auto& r : t.rows) {
      if (r.size() > std::max({lo, hi, n})) {
        bins.push_back({r[lo], r[hi], static_cast<std::size_t>(r[n])});
      }
    }
    cli.plot(name, [&](std::ostream& f) {
      lab::write_histogram_svg(f, bins, {title, args.x.empty() ? "bin" : args.x, "count"});
    });
    return 0;
  }

  if (args.x.empty() || args.y.empty()) throw ConfigError("plot needs --x and --y columns");
  const std::size_t xi = t.column(args.x), yi = t.column(args.y);
  const bool grouped = !args.group.empty();
  const std::size_t gi = grouped ? t.column(args.group) : 0;
  std::map<double, lab::Series> groups;
  std::vector<std::pair<double, double>> all;
  for (const auto& r : t.rows) {
    if (r.size() <= std::max({xi, yi, gi})) continue;
    if (!std::isfinite(r[xi]) || !std::isfinite(r[yi])) continue;
    const double g = grouped ? r[gi] : 0.0;
    auto& s = groups[g];
    if (s.label.empty() && grouped) s.label = args.group + "=" + num(g);
    s.points.emplace_back(r[xi], r[yi]);
    all.emplace_back(r[xi], r[yi]);
  }
  std::vector<lab::Series> series;
  for (auto& [g, s] : groups) series.push_back(std::move(s));
  const lab::PlotOptions opt{title, args.x, args.y};

  if (args.kind == "profile") {
    cli.plot(name, [&](std::ostream& f) { lab::write_profile_svg(f, series, opt); });
  } else if (args.kind == "scatter") {
    std::vector<lab::FitCurve> curves;
    for (const auto& m : args.fits) {
      const auto model = metrics::parse_model(m);
      if (!model) throw ConfigError("unknown fit model '" + m + "'");
      for (const auto& fit : fit_all(cli, all, {*model})) curves.push_back(curve(fit, ""));
    }
    cli.plot(name, [&](std::ostream& f) { lab::write_scatter_svg(f, series, curves, opt); });
  } else {
    throw ConfigError("unknown plot kind '" + args.kind + "' (scatter, profile, histogram)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pedestrian flow lab: simulate, measure, track and run experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Scenario configuration file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (overrides run.seed)");
  app.add_option("--decimate", g.decimate, "Keep every k-th frame in aTXY output")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Only print warnings and errors");
  app.add_option("--threads", g.threads, "Worker threads for sweeps (0 = all cores)");

  Cli cli(g);
  std::function<int()> action;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write trajectories and metrics");
  simulate->callback([&] { action = [&] { return cmd_simulate(cli); }; });

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over values and replications");
  sweep->add_option("--variable", sweep_args.variable, "Swept parameter");
  sweep->add_option("--values", sweep_args.values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--replications", sweep_args.replications, "Runs per value");
  sweep->callback([&] { action = [&] { return cmd_sweep(cli, sweep_args); }; });

  auto* calibrate = app.add_subcommand("calibrate", "Grid search against the speed distribution target");
  calibrate->callback([&] { action = [&] { return cmd_calibrate(cli); }; });

  std::string experiment_name;
  auto* experiment = app.add_subcommand("experiment", "oneway_twoway, elderly or crossing_policy");
  experiment->add_option("name", experiment_name, "Experiment name")->required();
  experiment->callback([&] { action = [&] { return cmd_experiment(cli, experiment_name); }; });

  TrackArgs track_args;
  auto* track = app.add_subcommand("track", "Trace descriptor rows into trajectories");
  track->add_option("descriptors", track_args.descriptors, "Descriptor CSV");
  track->add_option("--synth-from", track_args.synth_from,
                    "Synthesize descriptors from an aTXY file first");
  track->add_option("--noise", track_args.noise, "Position noise for --synth-from (m)")
      ->capture_default_str();
  track->add_option("--clutter", track_args.clutter, "Clutter objects for --synth-from");
  track->callback([&] { action = [&] { return cmd_track(cli, track_args); }; });

  MetricsArgs metrics_args;
  auto* metrics_cmd = app.add_subcommand("metrics", "Flow performances of an aTXY file");
  metrics_cmd->add_option("atxy", metrics_args.atxy, "aTXY file")->required();
  metrics_cmd->add_option("--vmax", metrics_args.vmax_file, "CSV of ped_id,vmax");
  metrics_cmd->add_option("--vmax-all", metrics_args.vmax_all, "One vmax for every pedestrian");
  metrics_cmd->add_option("--trap", metrics_args.trap, "xmin,ymin,xmax,ymax")->delimiter(',');
  metrics_cmd->callback([&] { action = [&] { return cmd_metrics(cli, metrics_args); }; });

  LanesArgs lanes_args;
  auto* lanes = app.add_subcommand("lanes", "Lane formation report of an aTXY file");
  lanes->add_option("atxy", lanes_args.atxy, "aTXY file")->required();
  lanes->add_option("--gap", lanes_args.gap, "Lane gap (m); default body diameter");
  lanes->add_option("--every", lanes_args.every, "Sample every k frames")->capture_default_str();
  lanes->callback([&] { action = [&] { return cmd_lanes(cli, lanes_args); }; });

  PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "Render a CSV as SVG");
  plot->add_option("kind", plot_args.kind, "scatter, profile or histogram")->required();
  plot->add_option("csv", plot_args.csv, "Input CSV")->required();
  plot->add_option("--x", plot_args.x, "X column");
  plot->add_option("--y", plot_args.y, "Y column");
  plot->add_option("--group", plot_args.group, "Column splitting the points into series");
  plot->add_option("--fit", plot_args.fits, "Fit model overlay (scatter)");
  plot->add_option("--name", plot_args.name, "Output file name");
  plot->add_option("--title", plot_args.title, "Plot title");
  plot->callback([&] { action = [&] { return cmd_plot(cli, plot_args); }; });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  g.has_seed = seed_opt->count() > 0;

  try {
    return action();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
