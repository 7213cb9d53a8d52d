#pragma once

// Pointwise metric projection onto S = {a >= 0 : a1 a2 a3 = 0}.
//
// S is the union of the three convex faces S_k = {a >= 0, a_k = 0}. The
// distance to face k is ((v_k)^+)^2 + sum_i ((v_i)^-)^2, so the closest face
// zeroes the component with the smallest positive part (smallest index on
// ties) and truncates the other two at zero.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "segsolve/boundary.hpp"
#include "segsolve/grid.hpp"

namespace segsolve {

using Vec3 = std::array<double, 3>;

struct ProjectionControls {
    /// Keep the previous face when its positive part is within tau of the
    /// current minimum.
    double tau = 0.0;
};

struct PointProjection {
    Vec3 value;
    int face;  // 1-based index of the zeroed component
};

/// prev_face is 1-based; 0 means no previous assignment.
PointProjection project_point(const Vec3& v, int prev_face = 0, double tau = 0.0);

/// Face index per node; 0 on boundary nodes.
class PhaseAssignment {
public:
    explicit PhaseAssignment(const Grid& g) : grid_(g), face_(g.size(), 0) {}

    const Grid& grid() const { return grid_; }
    int operator[](std::size_t k) const { return face_[k]; }
    std::uint8_t& at(std::size_t k) { return face_[k]; }

    bool operator==(const PhaseAssignment&) const = default;

private:
    Grid grid_;
    std::vector<std::uint8_t> face_;
};

struct FieldProjection {
    SystemState state;
    PhaseAssignment phases;
};

/// Projects interior nodes and copies the trace verbatim onto boundary nodes.
FieldProjection project_field(const SystemState& state, const BoundaryTrace& trace,
                              const PhaseAssignment* prev = nullptr,
                              const ProjectionControls& ctl = {});

/// Header `x,y,k`, interior nodes only.
void write_phases_csv(const std::string& path, const PhaseAssignment& phases);

// Brute-force reference used by the CLI self-test: builds each face
// projection explicitly and measures its Euclidean distance.
struct FaceOracle {
    std::array<Vec3, 3> candidates;
    std::array<double, 3> dist2;
    double best_dist2;
    int best_face;  // first face attaining best_dist2
};
FaceOracle face_enumeration(const Vec3& v);

}  // namespace segsolve
