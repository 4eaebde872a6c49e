// scenarios.hpp: single runs behind the CLI subcommands and the named
// multi-run scenarios.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbatt/config.hpp"
#include "qbatt/csv.hpp"
#include "qbatt/table.hpp"

namespace qbatt {

struct RunOutput {
    Table table;
    HeaderLines header;
    std::vector<std::string> warnings;
    std::optional<Table> shots; // circuit only
};

// lambda_t, gamma0, gamma_plus, gamma_minus, gamma0_coarse on [0, t_max];
// the coarse-grained column uses the window T = lambda*t.
RunOutput run_rates(const RunConfig& cfg);
RunOutput run_evolve(const RunConfig& cfg);
RunOutput run_nmqj_command(const RunConfig& cfg);
RunOutput run_circuit_command(const RunConfig& cfg);

struct ScenarioReport {
    std::vector<std::string> files; // in a fixed order
    std::vector<std::string> warnings;
};

const std::vector<std::string>& scenario_names();

// Writes one CSV per curve into out_dir (created if missing). Keys the user
// did not set take the scenario's own defaults. Unknown names throw
// ValidationError listing the valid ones.
ScenarioReport run_scenario(const std::string& name, const RunConfig& cfg, const std::string& out_dir);

// Time at the end of the first negative-rate segment on the grid k*dt, i.e.
// the first grid time where gamma_0 is non-negative again. Throws if there is
// no negative segment before t_limit.
double end_of_negative_segment(const SystemParams& params, double dt, double t_limit = 4.0);

} // namespace qbatt
