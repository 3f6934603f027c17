#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "tandemfluid/analysis.hpp"
#include "tandemfluid/simulate.hpp"

namespace tandemfluid::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kInfeasible = 3 };

/// Everything a subcommand needs, assembled from preset, config file and flags
/// (later sources override earlier ones).
struct RunConfig {
    SystemParams params;
    std::optional<double> r;
    std::optional<double> r1;
    std::optional<double> r2;
    SimConfig sim;
    double tol = kDefaultTol;
    // Merge and split topologies.
    double v1 = 2.0;
    double v2 = 1.0;
    double merge_r2 = 0.0;
    std::string topology = "two-link";
    std::string format = "json";
    std::string out;
};

/// Applies the named preset; throws ModelError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

/// Applies the keys of a JSON config document; throws ModelError on unknown keys or bad types.
void apply_config_json(RunConfig& cfg, const std::string& text);

/// Inflow from r, or from r1/r2 when both are set. Throws ModelError when neither is given.
[[nodiscard]] InflowSpec inflow_of(const RunConfig& cfg);

/// Runs one command line. Results go to `out` (or the --out file), diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tandemfluid::cli
