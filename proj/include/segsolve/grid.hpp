#pragma once

// Uniform Cartesian grids on a rectangle, nodal fields, and the discrete
// operators and diagnostics shared by every solver.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace segsolve {

struct Bounds {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;

    bool operator==(const Bounds&) const = default;
};

/// Node-centred uniform grid. Node (i,j) sits at x(i), y(j); storage is
/// row-major with j the outer index.
class Grid {
public:
    Grid(std::size_t nx, std::size_t ny, Bounds bounds);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return nx_ * ny_; }
    std::size_t interior_size() const { return (nx_ - 2) * (ny_ - 2); }
    const Bounds& bounds() const { return bounds_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double cell_area() const { return hx_ * hy_; }
    /// Lumped (trapezoidal) mass: hx*hy inside, halved on edges, quartered
    /// at corners, so the weights sum to the domain area.
    double node_weight(std::size_t k) const {
        const std::size_t i = k % nx_, j = k / nx_;
        double w = hx_ * hy_;
        if (i == 0 || i + 1 == nx_) w *= 0.5;
        if (j == 0 || j + 1 == ny_) w *= 0.5;
        return w;
    }

    std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

    // Coordinates use the exact ratio i/(nx-1) so that nodes shared between a
    // grid and its refinement get bitwise identical coordinates.
    double x(std::size_t i) const;
    double y(std::size_t j) const;

    bool is_boundary(std::size_t i, std::size_t j) const {
        return i == 0 || j == 0 || i + 1 == nx_ || j + 1 == ny_;
    }
    bool is_boundary(std::size_t k) const { return is_boundary(k % nx_, k / nx_); }

    bool operator==(const Grid& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && bounds_ == o.bounds_;
    }

private:
    std::size_t nx_;
    std::size_t ny_;
    Bounds bounds_;
    double hx_;
    double hy_;
};

Grid build_grid(std::size_t nx, std::size_t ny, Bounds bounds);

/// Square grid on [-1,1]^2 with n nodes per axis.
inline Grid unit_square_grid(std::size_t n) { return build_grid(n, n, Bounds{}); }

class ScalarField {
public:
    explicit ScalarField(Grid grid, double fill = 0.0);
    ScalarField(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    bool all_finite() const;

    bool operator==(const ScalarField&) const = default;

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Sample f(x,y) at every node.
template <class F>
ScalarField sample(const Grid& g, F&& f) {
    ScalarField out(g);
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i) out(i, j) = f(g.x(i), g.y(j));
    return out;
}

/// The triple (u1,u2,u3) on a shared grid.
class SystemState {
public:
    explicit SystemState(const Grid& g);
    SystemState(ScalarField u1, ScalarField u2, ScalarField u3);

    const Grid& grid() const { return u_[0].grid(); }

    ScalarField& operator[](std::size_t c) { return u_[c]; }
    const ScalarField& operator[](std::size_t c) const { return u_[c]; }

    auto begin() { return u_.begin(); }
    auto end() { return u_.end(); }
    auto begin() const { return u_.begin(); }
    auto end() const { return u_.end(); }

    bool operator==(const SystemState&) const = default;

private:
    std::array<ScalarField, 3> u_;
};

class RegionMask {
public:
    RegionMask(Grid grid, std::vector<bool> member);

    const Grid& grid() const { return grid_; }
    bool contains(std::size_t k) const { return member_[k]; }
    std::size_t count() const;

private:
    Grid grid_;
    std::vector<bool> member_;
};

/// Five-point Laplacian at interior nodes; boundary entries are 0.
ScalarField apply_laplacian(const ScalarField& f);

/// E_h(u) = 1/2 sum_i sum_cells |grad_h u_i|^2 hx hy with forward differences.
double dirichlet_energy(const ScalarField& f);
double dirichlet_energy(const SystemState& s);

struct Violation {
    double l2 = 0.0;
    double max_abs = 0.0;
};

/// L2 norm (lumped mass) and max of |u1 u2 u3| over all nodes.
Violation product_violation(const SystemState& s);
/// Max of |u1 u2 u3| restricted to interior nodes.
double interior_max_product(const SystemState& s);

double region_mean(const ScalarField& f, const RegionMask& mask);

double l2_norm(const ScalarField& f);
double l2_diff(const ScalarField& a, const ScalarField& b);
/// max over components of l2_diff.
double max_l2_diff(const SystemState& a, const SystemState& b);

/// Header `x,y,value`, one row per node in storage order.
void write_field_csv(std::ostream& os, const ScalarField& f);
void write_field_csv(const std::string& path, const ScalarField& f);
/// Inverse of write_field_csv; the grid is reconstructed from the coordinates.
ScalarField read_field_csv(const std::string& path);

/// 17 significant digits, the format used for every numeric output.
std::string format_real(double v);

}  // namespace segsolve
