#ifndef TIMEXEC_SCENARIO_HPP
#define TIMEXEC_SCENARIO_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "timexec/kernel.hpp"

namespace timexec {

/*
 * Scenario layer backing the command-line tool: a JSON config describes one
 * execution problem (or a parameter sweep over it); running it yields the
 * output files as in-memory strings so the tool stays a thin shell and the
 * whole surface is testable without touching the filesystem.
 *
 * The JSON schema is documented in the repository README. Numeric CSV
 * output uses 12 significant digits with '.' as the decimal separator,
 * independent of locale, so identical configs produce byte-identical files.
 */

enum class ScenarioMode { closed_form, quadrature, discrete };
enum class BenchmarkType { vwap, twap, is, target_close };

struct SweepSpec {
    std::string parameter;  // "gamma", "drift", or "x0"
    std::vector<double> values;
};

// Fully resolved configuration: vectors expanded to per-bucket size, sigma
// materialized, defaults applied. Produced by parse_scenario.
struct ScenarioConfig {
    ScenarioMode mode = ScenarioMode::discrete;
    DecayKernel kernel = Constant{1.0};
    double x0 = 0.0;

    // continuous modes
    double T = 1.0;
    int grid = 0;  // 0 = unset: closed-form export uses 400 cells, quadrature
                   // uses 400 or the TIMEXEC_QUAD_GRID environment override

    // discrete mode
    int N = 0;
    double tau = 1.0;
    double k = 1.0;
    double S0 = 0.0;
    double gamma = 0.0;
    Eigen::VectorXd mu;      // N entries
    Eigen::MatrixXd Sigma;   // N x N
    Eigen::VectorXd volume;  // N entries

    BenchmarkType benchmark = BenchmarkType::vwap;
    std::optional<std::pair<double, double>> window_times;  // continuous modes
    std::optional<std::pair<int, int>> window_buckets;      // discrete mode
    std::optional<std::vector<double>> volume_values;       // quadrature sampled eta

    bool nonneg = false;
    std::optional<double> max_speed;  // shares per unit time; cap is max_speed*tau
    bool include_own_volume = false;
    std::optional<SweepSpec> sweep;
};

struct ScenarioOutput {
    std::string schedule_csv;               // index_or_time, rate_or_shares, impulse_flag
    std::string report_json;
    std::optional<std::string> sweep_csv;   // present iff the config sweeps
};

// Exhaustive field checks on the raw JSON text, without running any solver.
// Returns one human-readable diagnostic per problem, each naming the
// offending field; an empty list means parse_scenario will succeed.
std::vector<std::string> scenario_diagnostics(const std::string& json_text);

// Parses and resolves the config. Throws config_error carrying the joined
// diagnostics when the text fails scenario_diagnostics.
ScenarioConfig parse_scenario(const std::string& json_text);

// Computes the schedule (and sweep, if any) for a resolved config. Solver
// problems propagate as the solver's own exception types.
ScenarioOutput run_scenario(const ScenarioConfig& cfg);

// "%.12g" formatting used for all CSV numbers.
std::string format_sig(double v);

}

#endif
