#ifndef PEDFLOW_LAB_SCENARIO_HPP
#define PEDFLOW_LAB_SCENARIO_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pedflow/config.hpp"
#include "pedflow/sim/params.hpp"
#include "pedflow/tracker/tracker.hpp"

namespace pedflow::lab {

/// Every section and key a pedflow config file may contain.
const std::map<std::string, std::set<std::string>>& known_config_keys();

/// Simulation parameters from `[forces]`, `[pedestrian]`, `[world]` and
/// `[run]`. `run.seed` is required unless `seed_override` is given.
/// Throws ConfigError naming the offending key.
sim::SimParams sim_params_from(const IniDocument& doc,
                               std::optional<std::uint64_t> seed_override = std::nullopt);

/// Writes every simulation parameter in the format `sim_params_from` reads.
void write_config(std::ostream& out, const sim::SimParams& params);

tracker::TrackerParams tracker_params_from(const IniDocument& doc,
                                           const tracker::DescriptorTable* layout = nullptr);

/// Names accepted by `set_variable`.
const std::vector<std::string>& sweep_variables();

/// Sets one scalar parameter by name. `alpha_beta_chi` sets all three.
/// Throws ConfigError for an unknown name or a non-integral count.
void set_variable(sim::SimParams& params, const std::string& name, double value);
double get_variable(const sim::SimParams& params, const std::string& name);

}  // namespace pedflow::lab

#endif  // PEDFLOW_LAB_SCENARIO_HPP
