#pragma once

// Subcommands behind the segsolve executable. Exit codes: 0 success,
// 1 configuration error, 2 non-convergence or a failed check.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "segsolve/run.hpp"

namespace segsolve {

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct BenchRow {
    std::string bc;
    Algorithm algorithm;
    std::string status;  // converged, not_converged, error
    std::size_t iterations = 0;
    double energy = 0.0;
    double violation_max = 0.0;
    std::optional<double> wall_time;
};

struct BenchSummary {
    std::vector<BenchRow> rows;  // bc major, algorithm minor
    bool all_converged() const;
};

/// Runs bc1..bc9 for every algorithm under `base`, writing per-run artifacts
/// to <dir>/<algorithm>/<bc>, summary.csv and one sheet_<algorithm>.svg.
BenchSummary run_bench(const std::vector<Algorithm>& algorithms, const RunConfig& base,
                       const std::string& dir);
int cmd_bench(const std::vector<Algorithm>& algorithms, const RunConfig& base,
              const std::string& dir, std::ostream& out, std::ostream& err);

int cmd_project_selftest(std::size_t count, std::uint64_t seed, std::ostream& out,
                         std::ostream& err);

/// Re-extracts contours from u1.csv..u3.csv in `fields_dir`. Without
/// `delta` the level is taken from the report.json next to the fields.
int cmd_contours(const std::string& fields_dir, std::optional<double> delta,
                 const std::string& out_dir, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace segsolve
