#include "pedflow/lab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pedflow/errors.hpp"
#include "pedflow/text.hpp"

namespace pedflow::lab {

const std::map<std::string, std::set<std::string>>& known_config_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"forces", {"mass", "alpha", "beta", "chi"}},
      {"pedestrian",
       {"body_diameter", "influence_diameter", "vmax_mean", "vmax_std", "a_max",
        "sight_distance", "elderly_fraction", "elderly_vmax"}},
      {"world",
       {"trap", "n_ways", "generator_distance", "generator_depth", "generator_spread_mean_pct",
        "generator_spread_std_pct", "scenario"}},
      {"run", {"dt", "n_pedestrians", "seed", "t_max", "destination_radius", "decimation"}},
      {"tracker",
       {"n", "distance_threshold", "similarity_threshold", "similarity_features", "depth_rule",
        "dt", "min_rows", "min_motion_index"}},
      {"sweep", {"variable", "values", "replications"}},
      {"calibrate",
       {"target_speed_mean", "target_speed_std", "max_overlap_rate", "max_pushback_rate",
        "reference_mean", "reference_var", "reference_n", "influence_diameter",
        "a_max", "vmax_mean", "vmax_std", "mass", "alpha", "beta", "chi", "body_diameter",
        "sight_distance", "generator_depth"}},
      {"experiment", {"densities", "replications", "fractions"}},
  };
  return keys;
}

namespace {

void read_double(const IniDocument& doc, const char* section, const char* key, double& out) {
  if (auto v = doc.get_double(section, key)) out = *v;
}

void read_int(const IniDocument& doc, const char* section, const char* key, int& out) {
  if (auto v = doc.get_int(section, key)) {
    if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
      throw ConfigError(std::string("key ") + section + "." + key + " is out of range");
    }
    out = static_cast<int>(*v);
  }
}

}  // namespace

sim::SimParams sim_params_from(const IniDocument& doc, std::optional<std::uint64_t> seed_override) {
  doc.require_known(known_config_keys());
  sim::SimParams p;
  read_double(doc, "forces", "mass", p.mass);
  read_double(doc, "forces", "alpha", p.alpha);
  read_double(doc, "forces", "beta", p.beta);
  read_double(doc, "forces", "chi", p.chi);

  read_double(doc, "pedestrian", "body_diameter", p.body_diameter);
  read_double(doc, "pedestrian", "influence_diameter", p.influence_diameter);
  read_double(doc, "pedestrian", "vmax_mean", p.vmax_mean);
  read_double(doc, "pedestrian", "vmax_std", p.vmax_std);
  read_double(doc, "pedestrian", "a_max", p.a_max);
  read_double(doc, "pedestrian", "sight_distance", p.sight_distance);
  read_double(doc, "pedestrian", "elderly_fraction", p.elderly_fraction);
  read_double(doc, "pedestrian", "elderly_vmax", p.elderly_vmax);

  if (auto trap = doc.get_doubles("world", "trap")) {
    if (trap->size() == 2) {
      p.trap = {0.0, 0.0, (*trap)[0], (*trap)[1]};
    } else if (trap->size() == 4) {
      p.trap = {(*trap)[0], (*trap)[1], (*trap)[2], (*trap)[3]};
    } else {
      throw ConfigError("key world.trap needs width,length or xmin,ymin,xmax,ymax");
    }
  }
  read_int(doc, "world", "n_ways", p.n_ways);
  read_double(doc, "world", "generator_distance", p.generator_distance);
  read_double(doc, "world", "generator_depth", p.generator_depth);
  read_double(doc, "world", "generator_spread_mean_pct", p.generator_spread_mean_pct);
  read_double(doc, "world", "generator_spread_std_pct", p.generator_spread_std_pct);
  if (auto s = doc.get_string("world", "scenario")) {
    if (*s == "mixed") {
      p.scenario = sim::Scenario::mixed;
    } else if (*s == "segregated") {
      p.scenario = sim::Scenario::segregated;
    } else {
      throw ConfigError("key world.scenario must be mixed or segregated, got '" + *s + "'");
    }
  }

  read_double(doc, "run", "dt", p.dt);
  read_int(doc, "run", "n_pedestrians", p.n_pedestrians);
  read_double(doc, "run", "t_max", p.t_max);
  read_double(doc, "run", "destination_radius", p.destination_radius);
  read_int(doc, "run", "decimation", p.decimation);
  if (seed_override) {
    p.seed = *seed_override;
  } else if (auto seed = doc.get_uint("run", "seed")) {
    p.seed = *seed;
  } else {
    throw ConfigError("missing required key run.seed");
  }
  p.validate();
  return p;
}

void write_config(std::ostream& out, const sim::SimParams& p) {
  const auto num = [](double v) { return text::format_double(v); };
  out << "[forces]\n"
      << "mass = " << num(p.mass) << "\nalpha = " << num(p.alpha) << "\nbeta = " << num(p.beta)
      << "\nchi = " << num(p.chi) << "\n\n[pedestrian]\n"
      << "body_diameter = " << num(p.body_diameter)
      << "\ninfluence_diameter = " << num(p.influence_diameter)
      << "\nvmax_mean = " << num(p.vmax_mean) << "\nvmax_std = " << num(p.vmax_std)
      << "\na_max = " << num(p.a_max) << "\nsight_distance = " << num(p.sight_distance)
      << "\nelderly_fraction = " << num(p.elderly_fraction)
      << "\nelderly_vmax = " << num(p.elderly_vmax) << "\n\n[world]\n"
      << "trap = " << num(p.trap.xmin) << ',' << num(p.trap.ymin) << ',' << num(p.trap.xmax)
      << ',' << num(p.trap.ymax) << "\nn_ways = " << p.n_ways
      << "\ngenerator_distance = " << num(p.generator_distance)
      << "\ngenerator_depth = " << num(p.generator_depth)
      << "\ngenerator_spread_mean_pct = " << num(p.generator_spread_mean_pct)
      << "\ngenerator_spread_std_pct = " << num(p.generator_spread_std_pct)
      << "\nscenario = " << sim::to_string(p.scenario) << "\n\n[run]\n"
      << "dt = " << num(p.dt) << "\nn_pedestrians = " << p.n_pedestrians << "\nseed = " << p.seed
      << "\nt_max = " << num(p.t_max) << "\ndestination_radius = " << num(p.destination_radius)
      << "\ndecimation = " << p.decimation << '\n';
}

tracker::TrackerParams tracker_params_from(const IniDocument& doc,
                                           const tracker::DescriptorTable* layout) {
  doc.require_known(known_config_keys());
  tracker::TrackerParams p;
  read_int(doc, "tracker", "n", p.n);
  read_double(doc, "tracker", "distance_threshold", p.distance_threshold);
  read_double(doc, "tracker", "similarity_threshold", p.similarity_threshold);
  read_double(doc, "tracker", "dt", p.dt);
  read_int(doc, "tracker", "min_rows", p.min_rows);
  read_double(doc, "tracker", "min_motion_index", p.min_motion_index);
  if (auto rule = doc.get_string("tracker", "depth_rule")) {
    if (*rule == "shrinking") {
      p.depth_rule = tracker::DepthRule::shrinking;
    } else if (*rule == "growing") {
      p.depth_rule = tracker::DepthRule::growing;
    } else {
      throw ConfigError("key tracker.depth_rule must be shrinking or growing");
    }
  }
  if (auto names = doc.get_string("tracker", "similarity_features")) {
    if (!layout) throw ConfigError("tracker.similarity_features needs a descriptor table");
    for (auto name : text::split(*names, ',')) {
      const std::string n(text::trim(name));
      const auto it = std::find(layout->feature_names.begin(), layout->feature_names.end(), n);
      if (it == layout->feature_names.end()) {
        throw ConfigError("tracker.similarity_features names unknown feature '" + n + "'");
      }
      p.similarity_features.push_back(
          static_cast<std::size_t>(it - layout->feature_names.begin()));
    }
  }
  p.validate();
  return p;
}

const std::vector<std::string>& sweep_variables() {
  static const std::vector<std::string> names = {
      "n_pedestrians", "vmax_mean", "vmax_std",     "mass",          "alpha",
      "beta",          "chi",       "alpha_beta_chi", "dt",          "elderly_fraction",
      "influence_diameter", "body_diameter", "a_max", "sight_distance", "generator_depth"};
  return names;
}

void set_variable(sim::SimParams& p, const std::string& name, double value) {
  if (name == "n_pedestrians") {
    if (value != std::floor(value) || value < 0.0) {
      throw ConfigError("n_pedestrians needs a non-negative integer, got " +
                        text::format_double(value));
    }
    p.n_pedestrians = static_cast<int>(value);
  } else if (name == "vmax_mean") {
    p.vmax_mean = value;
  } else if (name == "vmax_std") {
    p.vmax_std = value;
  } else if (name == "mass") {
    p.mass = value;
  } else if (name == "alpha") {
    p.alpha = value;
  } else if (name == "beta") {
    p.beta = value;
  } else if (name == "chi") {
    p.chi = value;
  } else if (name == "alpha_beta_chi") {
    p.alpha = p.beta = p.chi = value;
  } else if (name == "dt") {
    p.dt = value;
  } else if (name == "elderly_fraction") {
    p.elderly_fraction = value;
  } else if (name == "influence_diameter") {
    p.influence_diameter = value;
  } else if (name == "body_diameter") {
    p.body_diameter = value;
  } else if (name == "a_max") {
    p.a_max = value;
  } else if (name == "sight_distance") {
    p.sight_distance = value;
  } else if (name == "generator_depth") {
    p.generator_depth = value;
  } else {
    throw ConfigError("unknown sweep variable '" + name + "'");
  }
}

double get_variable(const sim::SimParams& p, const std::string& name) {
  if (name == "n_pedestrians") return p.n_pedestrians;
  if (name == "vmax_mean") return p.vmax_mean;
  if (name == "vmax_std") return p.vmax_std;
  if (name == "mass") return p.mass;
  if (name == "alpha" || name == "alpha_beta_chi") return p.alpha;
  if (name == "beta") return p.beta;
  if (name == "chi") return p.chi;
  if (name == "dt") return p.dt;
  if (name == "elderly_fraction") return p.elderly_fraction;
  if (name == "influence_diameter") return p.influence_diameter;
  if (name == "body_diameter") return p.body_diameter;
  if (name == "a_max") return p.a_max;
  if (name == "sight_distance") return p.sight_distance;
  if (name == "generator_depth") return p.generator_depth;
  throw ConfigError("unknown sweep variable '" + name + "'");
}

}  // namespace pedflow::lab
