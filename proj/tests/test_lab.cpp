#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "pedflow/errors.hpp"
#include "pedflow/lab/harness.hpp"
#include "pedflow/lab/lanes.hpp"
#include "pedflow/lab/plot.hpp"
#include "pedflow/lab/report.hpp"
#include "pedflow/lab/scenario.hpp"

using namespace pedflow;
using namespace pedflow::lab;
namespace fs = std::filesystem;

namespace {

sim::SimParams small_run(std::uint64_t seed = 1) {
  sim::SimParams p;
  p.seed = seed;
  p.n_pedestrians = 30;
  p.t_max = 40.0;
  return p;
}

IniDocument parse_ini(const std::string& text) {
  std::istringstream in(text);
  return IniDocument::parse(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pedflow_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(PEDFLOW_BIN) + " --out " + dir.string() + " --quiet " +
                          args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_substr(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config round trip") {
  sim::SimParams p;
  p.seed = 42;
  p.mass = 0.6;
  p.alpha = 0.3;
  p.vmax_std = 0.0;
  p.trap = {1.0, 2.0, 9.0, 30.0};
  p.n_ways = 1;
  p.scenario = sim::Scenario::segregated;
  p.n_pedestrians = 77;
  p.elderly_fraction = 0.25;
  p.decimation = 3;
  std::ostringstream out;
  write_config(out, p);
  const auto back = sim_params_from(parse_ini(out.str()));
  std::ostringstream again;
  write_config(again, back);
  CHECK(again.str() == out.str());
  CHECK(back.seed == 42);
  CHECK(back.trap == p.trap);
  CHECK(back.scenario == sim::Scenario::segregated);
  CHECK(back.n_pedestrians == 77);
  CHECK(back.alpha == p.alpha);
  CHECK(back.dt == p.dt);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(sim_params_from(parse_ini("[run]\nn_pedestrians = 10\n")), ConfigError);
  CHECK(sim_params_from(parse_ini("[run]\nn_pedestrians = 10\n"), 5).seed == 5);
  CHECK_THROWS_AS(sim_params_from(parse_ini("[run]\nseed = 1\nbogus = 2\n")), ConfigError);
  CHECK_THROWS_AS(sim_params_from(parse_ini("[forces]\nmass = -1\n[run]\nseed = 1\n")),
                  ConfigError);
  sim::SimParams p;
  CHECK_THROWS_AS(set_variable(p, "nope", 1.0), ConfigError);
  CHECK_THROWS_AS(set_variable(p, "n_pedestrians", 1.5), ConfigError);
  set_variable(p, "alpha_beta_chi", 0.4);
  CHECK(p.alpha == 0.4);
  CHECK(p.beta == 0.4);
  CHECK(p.chi == 0.4);
  for (const auto& v : sweep_variables()) {
    sim::SimParams q;
    set_variable(q, v, 2.0);
    CHECK(get_variable(q, v) == doctest::Approx(2.0));
  }
}

TEST_CASE("sweep layout") {
  SweepSpec spec;
  spec.base = small_run();
  spec.values = {10, 20};
  spec.replications = 2;
  const auto res = run_sweep(spec, 1);
  REQUIRE(res.rows.size() == 4);
  CHECK(res.rows[0].value == 10);
  CHECK(res.rows[1].value == 10);
  CHECK(res.rows[2].value == 20);
  CHECK(res.rows[0].seed == 1);
  CHECK(res.rows[1].seed == 2);
  CHECK(res.rows[2].seed == 1);
  for (const auto& r : res.rows) CHECK(r.scores.has_value());
  CHECK(res.linear_fit.has_value());

  std::ostringstream a, fa, b, fb;
  write_sweep_csv(a, fa, res);
  write_sweep_csv(b, fb, run_sweep(spec, 2));
  CHECK(a.str() == b.str());
  CHECK(count_substr(a.str(), "\n") == 5);

  spec.values.clear();
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.values = {1};
  spec.replications = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.replications = 1;
  spec.variable = "nope";
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(57, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("calibration picks the feasible argmin") {
  const std::vector<CalibrationAxis> axes = {{"vmax_mean", {1.5, 1.8}}, {"a_max", {0.75, 1.75}}};
  CalibrationTarget loose;
  loose.max_overlap_rate = 1.0;
  loose.max_pushback_rate = 1.0;
  const auto res = calibrate(small_run(), axes, loose, std::nullopt, 1);
  REQUIRE(res.points.size() == 4);

  std::optional<std::size_t> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const auto& pt = res.points[i];
    REQUIRE(pt.scores.has_value());
    const double dm = pt.scores->speed_mean - loose.speed_mean;
    const double ds = pt.scores->speed_sd - loose.speed_std;
    CHECK(pt.objective == doctest::Approx(dm * dm + ds * ds));
    const bool feasible = pt.scores->overlap_rate < loose.max_overlap_rate &&
                          pt.scores->pushback_rate < loose.max_pushback_rate;
    CHECK(pt.feasible == feasible);
    if (feasible && dm * dm + ds * ds < best_obj) best = i, best_obj = dm * dm + ds * ds;
  }
  CHECK(res.winner == best);
  CHECK(res.nearest.empty());

  CalibrationTarget strict;
  strict.max_overlap_rate = 0.0;
  strict.max_pushback_rate = 0.0;
  const auto none = calibrate(small_run(), axes, strict, std::nullopt, 1);
  CHECK_FALSE(none.winner.has_value());
  REQUIRE_FALSE(none.nearest.empty());
  for (std::size_t i = 1; i < none.nearest.size(); ++i) {
    CHECK(none.points[none.nearest[i - 1]].infeasibility <=
          none.points[none.nearest[i]].infeasibility);
  }

  const auto single = calibrate(small_run(), {{"vmax_mean", {1.6}}}, loose,
                                metrics::SampleSummary{1.38, 0.37 * 0.37, 200}, 1);
  REQUIRE(single.points.size() == 1);
  CHECK(single.winner == std::optional<std::size_t>(0));
  CHECK(single.welch.has_value());

  CHECK_THROWS_AS(calibrate(small_run(), {}, loose), ConfigError);
}

TEST_CASE("lane counting") {
  std::vector<AtxyRecord> recs = {
      {1, 0, 1.0, 0.0}, {2, 0, 1.3, 1.0}, {3, 0, 4.0, 2.0}, {4, 0, 4.2, 3.0}, {5, 0, 7.0, 9.0},
  };
  const AtxyDatabase db(recs, 1.0 / 15.0);
  const std::map<PedId, int> groups = {{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, -1}};
  const auto rows = lane_formation_report(db, groups, 0.6);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].group == -1);
  CHECK(rows[0].lane_count == 1);
  CHECK(rows[0].mean_width == 0.0);
  CHECK(rows[1].group == 1);
  CHECK(rows[1].lane_count == 2);
  CHECK(rows[1].mean_width == doctest::Approx(0.25));
  CHECK(lane_formation_report(db, groups, 5.0)[1].lane_count == 1);
  CHECK_THROWS_AS(lane_formation_report(db, groups, 0.0), DomainError);
}

TEST_CASE("plots") {
  PlotOptions o{"t", "x", "y"};
  std::ostringstream one;
  write_scatter_svg(one, {{"a", {{1.0, 2.0}}}}, {{"fit", [](double x) { return x; }}}, o);
  CHECK(one.str().find("<svg") == 0);
  CHECK(count_substr(one.str(), "<circle") == 1);
  CHECK(one.str().find("</svg>") != std::string::npos);

  std::ostringstream prof;
  write_profile_svg(prof, {{"p", {{0, 1}, {1, 2}, {2, 1.5}}}}, o);
  CHECK(count_substr(prof.str(), "<polyline") == 1);

  const std::vector<metrics::HistogramBin> bins = {{0.0, 0.5, 3}, {0.5, 1.0, 7}, {1.0, 1.5, 0}};
  std::ostringstream hist;
  write_histogram_svg(hist, bins, o);
  std::size_t total = 0;
  const std::string s = hist.str();
  for (auto pos = s.find("data-count=\""); pos != std::string::npos;
       pos = s.find("data-count=\"", pos + 1)) {
    total += std::stoul(s.substr(pos + 12));
  }
  CHECK(total == 10);

  std::ostringstream sink;
  CHECK_THROWS_AS(write_scatter_svg(sink, {{"a", {}}}, {}, o), DomainError);
  CHECK_THROWS_AS(write_profile_svg(sink, {}, o), DomainError);
  CHECK_THROWS_AS(write_histogram_svg(sink, {}, o), DomainError);

  const auto ticks = nice_ticks(0.0, 1.0);
  CHECK(ticks.front() <= 0.0);
  CHECK(ticks.back() >= 1.0);
  for (std::size_t i = 1; i < ticks.size(); ++i) CHECK(ticks[i] > ticks[i - 1]);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("--help", dir) == 0);
  CHECK(run_cli("simulate", dir) == 2);
  CHECK(run_cli("bogus", dir) == 2);
  CHECK(run_cli("experiment unknown_name", dir) == 2);
  CHECK(run_cli("--config " + (dir / "absent.ini").string() + " simulate", dir) != 0);

  std::ofstream(dir / "bad.ini") << "[run]\nseed = 1\nwhatever = 3\n";
  CHECK(run_cli("--config " + (dir / "bad.ini").string() + " simulate", dir) == 2);

  std::ofstream(dir / "cal.ini") << "[run]\nseed = 1\nn_pedestrians = 20\nt_max = 30\n"
                                    "[calibrate]\nvmax_mean = 1.6\nmax_overlap_rate = 0\n"
                                    "max_pushback_rate = 0\n";
  CHECK(run_cli("--config " + (dir / "cal.ini").string() + " calibrate", dir) == 4);
}

TEST_CASE("cli simulate writes deterministic outputs") {
  const fs::path a = scratch("sim_a"), b = scratch("sim_b");
  const std::string args = "--seed 3 simulate";
  std::ofstream(a / "c.ini") << "[run]\nn_pedestrians = 20\nt_max = 30\n";
  const std::string cfg = " --config " + (a / "c.ini").string() + " ";
  REQUIRE(run_cli(cfg + args, a) == 0);
  REQUIRE(run_cli(cfg + args, b) == 0);
  for (const char* f : {"trap.atxy", "full.atxy", "instant.csv", "system.csv", "diagnostics.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto db = read_atxy_file((a / "full.atxy").string());
  CHECK(db.pedestrian_ids().size() == 20);
}
