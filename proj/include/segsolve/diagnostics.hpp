#pragma once

// Region masks, the epsilon scaling study for the product norm, and their
// exports.

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "segsolve/boundary.hpp"
#include "segsolve/grid.hpp"
#include "segsolve/penalty.hpp"

namespace segsolve {

enum class RegionName { inner_square, boundary_layer, outer };

std::string to_string(RegionName r);

struct RegionSpec {
    RegionName name = RegionName::inner_square;
    double inner_half_width = 0.3;  // a
    double layer_width = 0.05;      // w

    void validate() const;
};

/// inner_square: max(|x|,|y|) <= a; boundary_layer: max(|x|,|y|) >= 1 - w;
/// outer: the rest. Distances are measured in the [-1,1]^2 frame of the
/// grid's bounds. Throws if the mask comes out empty.
RegionMask build_region_mask(const Grid& grid, const RegionSpec& spec);

struct RegionMeans {
    double inner_half_width = 0.0;
    double layer_width = 0.0;
    /// [component][region], regions in RegionName order.
    std::array<std::array<double, 3>, 3> mean{};
    std::array<std::size_t, 3> nodes{};
};

RegionMeans region_means(const SystemState& s, double a = 0.3, double w = 0.05);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> residuals;
    bool inconclusive = false;  // r_squared < 0.9
};

/// Least squares of log(y) against log(x). Needs at least two points with
/// distinct x and positive values.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingEntry {
    double epsilon = 0.0;
    double product_l2 = 0.0;
    double energy = 0.0;
    bool converged = false;
    std::optional<std::string> error;
};

struct ScalingStudy {
    std::vector<ScalingEntry> entries;
    std::optional<LogLogFit> fit;  // empty if fewer than two usable entries
};

/// One independent continuation run per ladder value, each from
/// base.epsilon_start down to that value. Failed runs stay in `entries` with
/// their error and are left out of the fit.
ScalingStudy run_scaling_study(const Grid& grid, const BoundaryTrace& trace,
                               const std::vector<double>& ladder, const PenaltyConfig& base);

/// Header `epsilon,product_l2,energy`.
void write_scaling_csv(std::ostream& os, const ScalingStudy& study);
nlohmann::json scaling_fit_json(const ScalingStudy& study);

}  // namespace segsolve
