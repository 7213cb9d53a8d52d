#pragma once

// One solver run from a flat configuration: resolve defaults, execute, and
// write the artifact set (fields, report, history, contours).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "segsolve/boundary.hpp"
#include "segsolve/contours.hpp"
#include "segsolve/grid.hpp"
#include "segsolve/projection.hpp"

namespace segsolve {

enum class Algorithm { penalty_picard, penalty_gs, penalty_semi, penalty_phasefield, pgd, fista };

std::string to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& s);
bool is_penalty(Algorithm a);

/// Thrown for anything the user can fix in the configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Algorithm algorithm = Algorithm::fista;
    std::string bc = "ex41";
    std::string bc_file;  // CSV for bc = "custom"
    std::size_t n = 101;

    // penalty schemes
    double epsilon = 1e-4;
    double epsilon_start = 1e-2;
    double epsilon_factor = 0.1;
    double damping = 0.5;
    bool damp_gauss_seidel = false;
    double cg_rel_tol = 1e-10;

    // projection schemes; unset values are derived from h
    std::optional<double> alpha;  // PGD step, FISTA alpha0
    std::optional<double> alpha_min;
    double rho = 0.5;
    double eta = 0.2;
    std::optional<double> tau;

    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::optional<double> delta;

    std::string output;
    std::size_t jobs = 1;
    bool deterministic = false;
    std::uint64_t seed = 0;

    /// Copy with every optional filled in and every invariant checked.
    /// Throws ConfigError.
    RunConfig resolved() const;
};

/// Effective parameters only: output location and job count are left out.
nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Overlays the keys present in `j`; unknown keys are an error.
void merge_json(RunConfig& cfg, const nlohmann::json& j);

struct RunOutcome {
    RunConfig config;  // resolved
    Grid grid;
    SystemState state;
    std::optional<PhaseAssignment> phases;
    ContourSet contours;
    std::vector<std::string> history;  // JSON lines
    nlohmann::ordered_json report;
    bool converged = false;
    std::size_t iterations = 0;
    double energy = 0.0;
    double violation_max = 0.0;
    std::optional<std::string> error;
};

/// Builds the grid and boundary trace and checks the solver configuration
/// without running anything. Throws ConfigError.
void validate_run(const RunConfig& cfg);

/// Runs the configured algorithm. Solver failures are reported in the
/// outcome, configuration problems throw ConfigError.
RunOutcome execute_run(const RunConfig& cfg);

/// u1.csv, u2.csv, u3.csv, report.json, history.jsonl, contours.svg,
/// contours.csv, and phases.csv for projection runs.
void write_artifacts(const RunOutcome& outcome, const std::string& dir);

/// Default output root: $SEGSOLVE_OUT if set, else ./segsolve_out.
std::string default_output_root();

}  // namespace segsolve
