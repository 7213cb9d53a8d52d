#include "segsolve/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace segsolve {

namespace {
constexpr double kRegionTol = 1e-12;
}

std::string to_string(RegionName r) {
    switch (r) {
        case RegionName::inner_square: return "inner_square";
        case RegionName::boundary_layer: return "boundary_layer";
        case RegionName::outer: return "outer";
    }
    return "inner_square";
}

void RegionSpec::validate() const {
    const double a = inner_half_width;
    const double w = layer_width;
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("inner half-width must lie in (0,1)");
    if (!(w > 0.0 && w < 1.0 - a))
        throw std::invalid_argument("layer width must lie in (0, 1 - inner half-width)");
}

RegionMask build_region_mask(const Grid& grid, const RegionSpec& spec) {
    spec.validate();
    const Bounds& b = grid.bounds();
    std::vector<bool> member(grid.size(), false);
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double xn = 2.0 * (grid.x(i) - b.x_min) / (b.x_max - b.x_min) - 1.0;
            const double yn = 2.0 * (grid.y(j) - b.y_min) / (b.y_max - b.y_min) - 1.0;
            const double r = std::max(std::abs(xn), std::abs(yn));
            const bool inner = r <= spec.inner_half_width + kRegionTol;
            const bool layer = r >= 1.0 - spec.layer_width - kRegionTol;
            bool in = false;
            switch (spec.name) {
                case RegionName::inner_square: in = inner; break;
                case RegionName::boundary_layer: in = layer; break;
                case RegionName::outer: in = !inner && !layer; break;
            }
            member[grid.index(i, j)] = in;
        }
    }
    RegionMask mask(grid, std::move(member));
    if (mask.count() == 0)
        throw std::invalid_argument("region " + to_string(spec.name) + " contains no nodes");
    return mask;
}

RegionMeans region_means(const SystemState& s, double a, double w) {
    RegionMeans out;
    out.inner_half_width = a;
    out.layer_width = w;
    const RegionName names[3] = {RegionName::inner_square, RegionName::boundary_layer,
                                 RegionName::outer};
    for (int r = 0; r < 3; ++r) {
        const RegionMask mask = build_region_mask(s.grid(), {names[r], a, w});
        out.nodes[r] = mask.count();
        for (int c = 0; c < 3; ++c) out.mean[c][r] = region_mean(s[c], mask);
    }
    return out;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
    if (x.size() < 2) throw std::invalid_argument("fit needs at least two points");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(x[k] > 0.0 && y[k] > 0.0)) throw std::invalid_argument("log fit needs positive data");
        lx[k] = std::log(x[k]);
        ly[k] = std::log(y[k]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit needs distinct abscissae");

    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
        fit.residuals.push_back(r);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.inconclusive = fit.r_squared < 0.9;
    return fit;
}

ScalingStudy run_scaling_study(const Grid& grid, const BoundaryTrace& trace,
                               const std::vector<double>& ladder, const PenaltyConfig& base) {
    if (ladder.size() < 3) throw std::invalid_argument("scaling study needs at least three epsilons");
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (!(ladder[k] > 0.0)) throw std::invalid_argument("epsilon values must be positive");
        if (k > 0 && !(ladder[k] < ladder[k - 1]))
            throw std::invalid_argument("epsilon ladder must be strictly decreasing");
    }

    ScalingStudy study;
    std::vector<double> xs, ys;
    for (double eps : ladder) {
        PenaltyConfig cfg = base;
        cfg.epsilon_target = eps;
        cfg.epsilon_start = std::max(base.epsilon_start, eps);
        const PenaltyRun run = run_penalty(grid, trace, cfg);

        ScalingEntry e;
        e.epsilon = eps;
        e.converged = run.converged;
        e.error = run.error;
        e.product_l2 = product_violation(run.state).l2;
        e.energy = dirichlet_energy(run.state);
        if (!e.error && e.product_l2 > 0.0) {
            xs.push_back(eps);
            ys.push_back(e.product_l2);
        }
        study.entries.push_back(std::move(e));
    }
    if (xs.size() >= 2) study.fit = fit_loglog(xs, ys);
    return study;
}

void write_scaling_csv(std::ostream& os, const ScalingStudy& study) {
    os << "epsilon,product_l2,energy\n";
    for (const auto& e : study.entries)
        os << format_real(e.epsilon) << ',' << format_real(e.product_l2) << ','
           << format_real(e.energy) << '\n';
}

nlohmann::json scaling_fit_json(const ScalingStudy& study) {
    nlohmann::json j;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : study.entries) {
        nlohmann::json row{{"epsilon", e.epsilon},
                           {"product_l2", e.product_l2},
                           {"energy", e.energy},
                           {"converged", e.converged}};
        row["error"] = e.error ? nlohmann::json(*e.error) : nlohmann::json(nullptr);
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    if (study.fit) {
        j["fit"] = {{"slope", study.fit->slope},
                    {"intercept", study.fit->intercept},
                    {"r_squared", study.fit->r_squared},
                    {"residuals", study.fit->residuals},
                    {"inconclusive", study.fit->inconclusive}};
    } else {
        j["fit"] = nullptr;
    }
    return j;
}

}  // namespace segsolve
