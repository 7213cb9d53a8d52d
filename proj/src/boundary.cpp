#include "segsolve/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace segsolve {

namespace {

constexpr double kEdgeTol = 1e-12;

double pos(double v) { return v > 0.0 ? v : 0.0; }

bool on_left(double x) { return std::abs(x + 1.0) <= kEdgeTol; }
bool on_right(double x) { return std::abs(x - 1.0) <= kEdgeTol; }
bool on_bottom(double y) { return std::abs(y + 1.0) <= kEdgeTol; }
bool on_top(double y) { return std::abs(y - 1.0) <= kEdgeTol; }

std::array<double, 3> lobes(double x, double y, double shift) {
    const double theta = std::atan2(y, x);
    std::array<double, 3> phi{};
    for (int i = 1; i <= 3; ++i)
        phi[i - 1] = pos(std::cos(theta - 2.0 * std::numbers::pi * i / 3.0 - shift));
    return phi;
}

struct Table {
    // coord -> (phi1, phi2, phi3), sorted by coord
    std::map<double, std::array<double, 3>> rows;

    std::optional<std::array<double, 3>> at(double s) const {
        auto hi = rows.lower_bound(s - kEdgeTol);
        if (hi == rows.end()) return std::nullopt;
        if (std::abs(hi->first - s) <= kEdgeTol) return hi->second;
        if (hi == rows.begin()) return std::nullopt;
        auto lo = std::prev(hi);
        const double t = (s - lo->first) / (hi->first - lo->first);
        std::array<double, 3> v{};
        for (int c = 0; c < 3; ++c) v[c] = (1.0 - t) * lo->second[c] + t * hi->second[c];
        return v;
    }
};

}  // namespace

std::string to_string(BcId id) {
    switch (id) {
        case BcId::bc1: return "bc1";
        case BcId::bc2: return "bc2";
        case BcId::bc3: return "bc3";
        case BcId::bc4: return "bc4";
        case BcId::bc5: return "bc5";
        case BcId::bc6: return "bc6";
        case BcId::bc7: return "bc7";
        case BcId::bc8: return "bc8";
        case BcId::bc9: return "bc9";
        case BcId::ex41: return "ex41";
        case BcId::custom: return "custom";
    }
    return "custom";
}

std::optional<BcId> parse_bc_id(const std::string& s) {
    for (BcId id : {BcId::bc1, BcId::bc2, BcId::bc3, BcId::bc4, BcId::bc5, BcId::bc6, BcId::bc7,
                    BcId::bc8, BcId::bc9, BcId::ex41, BcId::custom})
        if (to_string(id) == s) return id;
    return std::nullopt;
}

std::array<BcId, 9> benchmark_ids() {
    return {BcId::bc1, BcId::bc2, BcId::bc3, BcId::bc4, BcId::bc5,
            BcId::bc6, BcId::bc7, BcId::bc8, BcId::bc9};
}

BoundaryConfig builtin_config(BcId id) {
    BoundaryConfig cfg;
    cfg.id = id;
    cfg.name = to_string(id);
    switch (id) {
        case BcId::bc1:
            cfg.evaluate = [](double x, double y, const Bounds&) { return lobes(x, y, 0.0); };
            break;
        case BcId::bc2:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                return lobes(x, y, std::numbers::pi / 4.0);
            };
            break;
        case BcId::bc3:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                return std::array<double, 3>{on_bottom(y) ? 1.0 : 0.0, on_top(y) ? 1.0 : 0.0,
                                             (on_left(x) || on_right(x)) ? 0.5 : 0.0};
            };
            cfg.edge_restricted = {true, true, true};
            break;
        case BcId::bc4:
            cfg.evaluate = [](double x, double, const Bounds&) {
                return std::array<double, 3>{pos(x), pos(-x), 0.25};
            };
            break;
        case BcId::bc5:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                return std::array<double, 3>{(on_bottom(y) || on_top(y)) ? 1.0 : 0.0,
                                             (on_left(x) || on_right(x)) ? 1.0 : 0.0, 0.3};
            };
            cfg.edge_restricted = {true, true, false};
            break;
        case BcId::bc6:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                static constexpr std::array<std::array<double, 2>, 3> anchors{
                    {{-1.0, -1.0}, {1.0, 1.0}, {1.0, -1.0}}};
                std::array<double, 3> phi{};
                for (int c = 0; c < 3; ++c)
                    phi[c] = pos(1.0 - std::hypot(x - anchors[c][0], y - anchors[c][1]) / 2.0);
                return phi;
            };
            break;
        case BcId::bc7:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                const bool horizontal = on_bottom(y) || on_top(y);
                const double arg = std::numbers::pi * (x + 1.0) / 2.0;
                return std::array<double, 3>{horizontal ? pos(std::sin(arg)) : 0.0,
                                             horizontal ? pos(std::cos(arg)) : 0.0,
                                             (on_left(x) || on_right(x)) ? 0.3 : 0.0};
            };
            cfg.edge_restricted = {true, true, true};
            break;
        case BcId::bc8:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                return std::array<double, 3>{(on_bottom(y) && x < 0.0) ? 1.0 : 0.0,
                                             (on_bottom(y) && x > 0.0) ? 1.0 : 0.0,
                                             on_top(y) ? 1.0 : 0.0};
            };
            cfg.edge_restricted = {true, true, true};
            break;
        case BcId::bc9:
            cfg.evaluate = [](double x, double y, const Bounds&) {
                return std::array<double, 3>{(on_bottom(y) || on_left(x)) ? 1.0 : 0.0,
                                             (on_top(y) || on_right(x)) ? 1.0 : 0.0, 0.2};
            };
            cfg.edge_restricted = {true, true, false};
            break;
        case BcId::ex41:
            cfg.evaluate = [](double, double y, const Bounds&) {
                return std::array<double, 3>{y < 0.0 ? -y : 0.0, y > 0.0 ? y : 0.0, 0.25};
            };
            break;
        case BcId::custom:
            throw std::invalid_argument("custom boundary data must be loaded from a file");
    }
    return cfg;
}

BoundaryTrace evaluate_bc(const BoundaryConfig& config, const Grid& grid) {
    if (config.required_domain && !(*config.required_domain == grid.bounds()))
        throw std::invalid_argument("boundary config " + config.name +
                                    " is only defined on [-1,1]^2");
    BoundaryTrace trace{{ScalarField(grid), ScalarField(grid), ScalarField(grid)}};
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            if (!grid.is_boundary(i, j)) continue;
            auto phi = config.evaluate(grid.x(i), grid.y(j), grid.bounds());
            for (double& v : phi) {
                if (!std::isfinite(v) || v < 0.0)
                    throw std::invalid_argument("boundary config " + config.name +
                                                " produced a negative or non-finite value");
            }
            if (phi[0] * phi[1] * phi[2] > 0.0) {
                for (int c = 2; c >= 0; --c) {
                    if (config.edge_restricted[c] && phi[c] > 0.0) {
                        phi[c] = 0.0;
                        break;
                    }
                }
            }
            for (int c = 0; c < 3; ++c) trace.phi[c](i, j) = phi[c];
        }
    }
    if (auto report = validate_segregation(trace); !report.ok()) {
        const auto& o = report.offenders.front();
        throw std::invalid_argument("boundary config " + config.name +
                                    " violates segregation at node (" + std::to_string(o.i) + "," +
                                    std::to_string(o.j) + ")");
    }
    return trace;
}

SegregationReport validate_segregation(const BoundaryTrace& trace) {
    SegregationReport report;
    const Grid& g = trace.grid();
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            if (!g.is_boundary(i, j)) continue;
            const std::array<double, 3> phi{trace[0](i, j), trace[1](i, j), trace[2](i, j)};
            const bool negative = phi[0] < 0.0 || phi[1] < 0.0 || phi[2] < 0.0;
            if (negative || phi[0] * phi[1] * phi[2] > 1e-14)
                report.offenders.push_back({i, j, phi});
        }
    }
    return report;
}

double sup_bound(const BoundaryTrace& trace) {
    const Grid& g = trace.grid();
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.is_boundary(k)) continue;
        for (int c = 0; c < 3; ++c) m = std::max(m, trace[c][k]);
    }
    return m;
}

BoundaryConfig load_custom_config(const std::string& csv_path) {
    std::ifstream is(csv_path);
    if (!is) throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("side,coord,phi1,phi2,phi3", 0) != 0)
        throw std::runtime_error(csv_path + ": expected header side,coord,phi1,phi2,phi3");

    std::map<std::string, Table> sides{{"bottom", {}}, {"top", {}}, {"left", {}}, {"right", {}}};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string side, fields[4];
        std::getline(row, side, ',');
        for (int f = 0; f < 4; ++f)
            if (!std::getline(row, fields[f], ','))
                throw std::runtime_error(csv_path + ": malformed row '" + line + "'");
        auto it = sides.find(side);
        if (it == sides.end()) throw std::runtime_error(csv_path + ": unknown side '" + side + "'");
        it->second.rows[std::stod(fields[0])] = {std::stod(fields[1]), std::stod(fields[2]),
                                                 std::stod(fields[3])};
    }

    BoundaryConfig cfg;
    cfg.id = BcId::custom;
    cfg.name = "custom";
    cfg.required_domain = std::nullopt;
    cfg.edge_restricted = {true, true, true};
    cfg.evaluate = [sides](double x, double y, const Bounds& d) {
        // Corners take the bottom/top tables first, then left/right.
        const auto near = [](double a, double b) { return std::abs(a - b) <= kEdgeTol; };
        std::optional<std::array<double, 3>> v;
        if (near(y, d.y_min)) v = sides.at("bottom").at(x);
        if (!v && near(y, d.y_max)) v = sides.at("top").at(x);
        if (!v && near(x, d.x_min)) v = sides.at("left").at(y);
        if (!v && near(x, d.x_max)) v = sides.at("right").at(y);
        return v.value_or(std::array<double, 3>{0.0, 0.0, 0.0});
    };
    return cfg;
}

}  // namespace segsolve
