#pragma once

// Dirichlet data for the three components: the nine benchmark
// configurations on [-1,1]^2, the ex41 configuration, and custom
// tabulated traces.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segsolve/grid.hpp"

namespace segsolve {

enum class BcId { bc1, bc2, bc3, bc4, bc5, bc6, bc7, bc8, bc9, ex41, custom };

std::string to_string(BcId id);
std::optional<BcId> parse_bc_id(const std::string& s);
/// bc1 ... bc9 in order.
std::array<BcId, 9> benchmark_ids();

using BoundaryFn = std::function<std::array<double, 3>(double x, double y, const Bounds& domain)>;

struct BoundaryConfig {
    BcId id = BcId::custom;
    std::string name;
    /// Raw formula values (phi1,phi2,phi3) at a boundary point.
    BoundaryFn evaluate;
    /// Components given only on some edges. At a node where all three are
    /// positive, the highest-index edge-restricted component is zeroed.
    std::array<bool, 3> edge_restricted{false, false, false};
    /// Built-in configs are only defined on [-1,1]^2.
    std::optional<Bounds> required_domain = Bounds{};
};

BoundaryConfig builtin_config(BcId id);

/// Boundary values of phi1..phi3; interior entries are zero by convention.
struct BoundaryTrace {
    std::array<ScalarField, 3> phi;

    const Grid& grid() const { return phi[0].grid(); }
    const ScalarField& operator[](std::size_t c) const { return phi[c]; }
};

/// Trace at every boundary node after corner resolution. Throws if the domain
/// does not match or if the resolved data still violates segregation.
BoundaryTrace evaluate_bc(const BoundaryConfig& config, const Grid& grid);

struct SegregationReport {
    struct Offender {
        std::size_t i, j;
        std::array<double, 3> phi;
    };
    std::vector<Offender> offenders;

    bool ok() const { return offenders.empty(); }
};

SegregationReport validate_segregation(const BoundaryTrace& trace);

/// M = max over boundary nodes and components.
double sup_bound(const BoundaryTrace& trace);

/// Tabulated data from CSV with header `side,coord,phi1,phi2,phi3`; side is
/// one of bottom/top/left/right, coord the position along that side. Values
/// between tabulated points are interpolated linearly; outside the tabulated
/// range the edge value is zero.
BoundaryConfig load_custom_config(const std::string& csv_path);

}  // namespace segsolve
