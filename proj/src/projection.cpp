#include "segsolve/projection.hpp"

#include <fstream>
#include <stdexcept>

namespace segsolve {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

PointProjection project_point(const Vec3& v, int prev_face, double tau) {
    const Vec3 p{pos(v[0]), pos(v[1]), pos(v[2])};
    int k = 0;
    if (p[1] < p[k]) k = 1;
    if (p[2] < p[k]) k = 2;
    if (prev_face >= 1 && prev_face <= 3 && p[prev_face - 1] <= p[k] + tau) k = prev_face - 1;
    PointProjection out{p, k + 1};
    out.value[k] = 0.0;
    return out;
}

FieldProjection project_field(const SystemState& state, const BoundaryTrace& trace,
                              const PhaseAssignment* prev, const ProjectionControls& ctl) {
    const Grid& g = state.grid();
    if (!(trace.grid() == g)) throw std::invalid_argument("trace and state grids differ");
    if (prev && !(prev->grid() == g)) throw std::invalid_argument("phase assignment grid differs");
    if (!(ctl.tau >= 0.0)) throw std::invalid_argument("hysteresis tau must be nonnegative");

    FieldProjection out{SystemState(g), PhaseAssignment(g)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.is_boundary(k)) {
            for (int c = 0; c < 3; ++c) out.state[c][k] = trace[c][k];
            continue;
        }
        const auto pp = project_point({state[0][k], state[1][k], state[2][k]},
                                      prev ? (*prev)[k] : 0, ctl.tau);
        for (int c = 0; c < 3; ++c) out.state[c][k] = pp.value[c];
        out.phases.at(k) = static_cast<std::uint8_t>(pp.face);
    }
    return out;
}

void write_phases_csv(const std::string& path, const PhaseAssignment& phases) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    const Grid& g = phases.grid();
    os << "x,y,k\n";
    for (std::size_t j = 1; j + 1 < g.ny(); ++j)
        for (std::size_t i = 1; i + 1 < g.nx(); ++i)
            os << format_real(g.x(i)) << ',' << format_real(g.y(j)) << ','
               << phases[g.index(i, j)] << '\n';
}

FaceOracle face_enumeration(const Vec3& v) {
    FaceOracle o{};
    for (int f = 0; f < 3; ++f) {
        Vec3 c{};
        for (int i = 0; i < 3; ++i) c[i] = (i == f) ? 0.0 : std::max(v[i], 0.0);
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) d2 += (v[i] - c[i]) * (v[i] - c[i]);
        o.candidates[f] = c;
        o.dist2[f] = d2;
    }
    o.best_face = 1;
    o.best_dist2 = o.dist2[0];
    for (int f = 1; f < 3; ++f)
        if (o.dist2[f] < o.best_dist2) {
            o.best_dist2 = o.dist2[f];
            o.best_face = f + 1;
        }
    return o;
}

}  // namespace segsolve
