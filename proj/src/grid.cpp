#include "segsolve/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace segsolve {

Grid::Grid(std::size_t nx, std::size_t ny, Bounds bounds) : nx_(nx), ny_(ny), bounds_(bounds) {
    if (nx < 3 || ny < 3)
        throw std::invalid_argument("grid needs at least 3 nodes per axis, got " +
                                    std::to_string(nx) + "x" + std::to_string(ny));
    if (!(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max))
        throw std::invalid_argument("degenerate grid bounds");
    hx_ = (bounds.x_max - bounds.x_min) / static_cast<double>(nx - 1);
    hy_ = (bounds.y_max - bounds.y_min) / static_cast<double>(ny - 1);
}

double Grid::x(std::size_t i) const {
    if (i + 1 == nx_) return bounds_.x_max;
    return bounds_.x_min +
           (bounds_.x_max - bounds_.x_min) * (static_cast<double>(i) / static_cast<double>(nx_ - 1));
}

double Grid::y(std::size_t j) const {
    if (j + 1 == ny_) return bounds_.y_max;
    return bounds_.y_min +
           (bounds_.y_max - bounds_.y_min) * (static_cast<double>(j) / static_cast<double>(ny_ - 1));
}

Grid build_grid(std::size_t nx, std::size_t ny, Bounds bounds) { return Grid(nx, ny, bounds); }

ScalarField::ScalarField(Grid grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("field size does not match grid");
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

SystemState::SystemState(const Grid& g) : u_{ScalarField(g), ScalarField(g), ScalarField(g)} {}

SystemState::SystemState(ScalarField u1, ScalarField u2, ScalarField u3)
    : u_{std::move(u1), std::move(u2), std::move(u3)} {
    if (!(u_[0].grid() == u_[1].grid()) || !(u_[0].grid() == u_[2].grid()))
        throw std::invalid_argument("system components live on different grids");
}

RegionMask::RegionMask(Grid grid, std::vector<bool> member)
    : grid_(grid), member_(std::move(member)) {
    if (member_.size() != grid_.size())
        throw std::invalid_argument("mask size does not match grid");
}

std::size_t RegionMask::count() const {
    return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), true));
}

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

ScalarField apply_laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(g);
    const double cx = 1.0 / (g.hx() * g.hx());
    const double cy = 1.0 / (g.hy() * g.hy());
    const std::size_t nx = g.nx();
    for (std::size_t j = 1; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            const std::size_t k = j * nx + i;
            out[k] = (f[k + 1] - 2.0 * f[k] + f[k - 1]) * cx +
                     (f[k + nx] - 2.0 * f[k] + f[k - nx]) * cy;
        }
    }
    return out;
}

double dirichlet_energy(const ScalarField& f) {
    const Grid& g = f.grid();
    const std::size_t nx = g.nx();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const std::size_t k = j * nx + i;
            const double dx = (f[k + 1] - f[k]) * ihx;
            const double dy = (f[k + nx] - f[k]) * ihy;
            sum += dx * dx + dy * dy;
        }
    }
    return 0.5 * sum * g.cell_area();
}

double dirichlet_energy(const SystemState& s) {
    return dirichlet_energy(s[0]) + dirichlet_energy(s[1]) + dirichlet_energy(s[2]);
}

Violation product_violation(const SystemState& s) {
    Violation v;
    double sum = 0.0;
    for (std::size_t k = 0; k < s[0].size(); ++k) {
        const double p = s[0][k] * s[1][k] * s[2][k];
        sum += p * p * s.grid().node_weight(k);
        v.max_abs = std::max(v.max_abs, std::abs(p));
    }
    v.l2 = std::sqrt(sum);
    return v;
}

double interior_max_product(const SystemState& s) {
    const Grid& g = s.grid();
    double m = 0.0;
    for (std::size_t j = 1; j + 1 < g.ny(); ++j)
        for (std::size_t i = 1; i + 1 < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            m = std::max(m, std::abs(s[0][k] * s[1][k] * s[2][k]));
        }
    return m;
}

double region_mean(const ScalarField& f, const RegionMask& mask) {
    if (!(f.grid() == mask.grid())) throw std::invalid_argument("mask and field grids differ");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (mask.contains(k)) {
            sum += f[k];
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("region_mean over an empty mask");
    return sum / static_cast<double>(count);
}

double l2_norm(const ScalarField& f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * f[k] * f.grid().node_weight(k);
    return std::sqrt(sum);
}

double l2_diff(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d * a.grid().node_weight(k);
    }
    return std::sqrt(sum);
}

double max_l2_diff(const SystemState& a, const SystemState& b) {
    return std::max({l2_diff(a[0], b[0]), l2_diff(a[1], b[1]), l2_diff(a[2], b[2])});
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_csv(std::ostream& os, const ScalarField& f) {
    const Grid& g = f.grid();
    os << "x,y,value\n";
    for (std::size_t j = 0; j < g.ny(); ++j)
        for (std::size_t i = 0; i < g.nx(); ++i)
            os << format_real(g.x(i)) << ',' << format_real(g.y(j)) << ','
               << format_real(f(i, j)) << '\n';
}

void write_field_csv(const std::string& path, const ScalarField& f) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_field_csv(os, f);
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,y,value", 0) != 0)
        throw std::runtime_error(path + ": expected header x,y,value");

    std::vector<double> xs, ys, vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string a, b, c;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
            throw std::runtime_error(path + ": malformed row '" + line + "'");
        xs.push_back(std::stod(a));
        ys.push_back(std::stod(b));
        vs.push_back(std::stod(c));
    }
    if (xs.empty()) throw std::runtime_error(path + ": no data rows");

    std::size_t nx = 1;
    while (nx < ys.size() && ys[nx] == ys[0]) ++nx;
    if (xs.size() % nx != 0) throw std::runtime_error(path + ": ragged node layout");
    const std::size_t ny = xs.size() / nx;
    Grid g(nx, ny, Bounds{xs.front(), xs[nx - 1], ys.front(), ys.back()});
    return ScalarField(g, std::move(vs));
}

}  // namespace segsolve
