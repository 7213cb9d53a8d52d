#include "segsolve/contours.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace segsolve {

std::size_t ContourSet::polyline_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.size();
    return n;
}

namespace {

// Edge ids: 2*index(i,j) is the horizontal edge (i,j)-(i+1,j),
// 2*index(i,j)+1 the vertical edge (i,j)-(i,j+1).
struct EdgeGeometry {
    const ScalarField& f;
    double delta;

    Point2 crossing(std::size_t edge) const {
        const Grid& g = f.grid();
        const std::size_t node = edge / 2;
        const std::size_t i = node % g.nx();
        const std::size_t j = node / g.nx();
        const bool vertical = edge % 2 == 1;
        const std::size_t i1 = vertical ? i : i + 1;
        const std::size_t j1 = vertical ? j + 1 : j;
        const double a = f(i, j);
        const double b = f(i1, j1);
        const double t = (delta - a) / (b - a);
        if (vertical) return {g.x(i), g.y(j) + t * (g.y(j1) - g.y(j))};
        return {g.x(i) + t * (g.x(i1) - g.x(i)), g.y(j)};
    }
};

using Segment = std::pair<std::size_t, std::size_t>;

std::vector<Segment> cell_segments(const ScalarField& f, double delta) {
    const Grid& g = f.grid();
    std::vector<Segment> segs;
    for (std::size_t j = 0; j + 1 < g.ny(); ++j) {
        for (std::size_t i = 0; i + 1 < g.nx(); ++i) {
            const double v[4] = {f(i, j), f(i + 1, j), f(i + 1, j + 1), f(i, j + 1)};
            int code = 0;
            for (int c = 0; c < 4; ++c)
                if (v[c] >= delta) code |= 1 << c;
            if (code == 0 || code == 15) continue;

            // bottom, right, top, left
            const std::size_t e[4] = {2 * g.index(i, j), 2 * g.index(i + 1, j) + 1,
                                      2 * g.index(i, j + 1), 2 * g.index(i, j) + 1};
            if (code == 5 || code == 10) {
                const bool center_in = (v[0] + v[1] + v[2] + v[3]) / 4.0 >= delta;
                // Cut off the two corners that are not connected through the center.
                const bool cut_odd = (code == 5) == center_in;
                if (cut_odd) {
                    segs.emplace_back(e[0], e[1]);
                    segs.emplace_back(e[2], e[3]);
                } else {
                    segs.emplace_back(e[3], e[0]);
                    segs.emplace_back(e[1], e[2]);
                }
                continue;
            }
            std::size_t ends[2];
            int n = 0;
            for (int c = 0; c < 4; ++c) {
                const bool a = (code >> c) & 1;
                const bool b = (code >> ((c + 1) % 4)) & 1;
                if (a != b) ends[n++] = e[c];
            }
            segs.emplace_back(ends[0], ends[1]);
        }
    }
    return segs;
}

}  // namespace

std::vector<Polyline> extract_level_curves(const ScalarField& f, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("contour level must be positive");
    const std::vector<Segment> segs = cell_segments(f, delta);

    std::map<std::size_t, std::vector<std::size_t>> by_edge;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        by_edge[segs[s].first].push_back(s);
        by_edge[segs[s].second].push_back(s);
    }
    auto other_segment = [&](std::size_t edge, std::size_t seg) -> std::ptrdiff_t {
        for (std::size_t s : by_edge[edge])
            if (s != seg) return static_cast<std::ptrdiff_t>(s);
        return -1;
    };
    auto far_end = [&](std::size_t seg, std::size_t edge) {
        return segs[seg].first == edge ? segs[seg].second : segs[seg].first;
    };

    const EdgeGeometry geom{f, delta};
    std::vector<bool> used(segs.size(), false);
    std::vector<Polyline> out;
    for (std::size_t s0 = 0; s0 < segs.size(); ++s0) {
        if (used[s0]) continue;

        // Walk backwards from s0 to the start of an open chain, or all the
        // way round a closed loop.
        std::size_t seg = s0;
        std::size_t edge = segs[s0].first;
        while (true) {
            const auto prev = other_segment(edge, seg);
            if (prev < 0 || static_cast<std::size_t>(prev) == s0) break;
            seg = static_cast<std::size_t>(prev);
            edge = far_end(seg, edge);
        }

        Polyline line{geom.crossing(edge)};
        while (true) {
            used[seg] = true;
            edge = far_end(seg, edge);
            line.push_back(geom.crossing(edge));
            const auto next = other_segment(edge, seg);
            if (next < 0 || used[static_cast<std::size_t>(next)]) break;
            seg = static_cast<std::size_t>(next);
        }
        out.push_back(std::move(line));
    }
    return out;
}

ContourSet extract_contours(const SystemState& state, double delta) {
    ContourSet cs;
    cs.delta = delta;
    for (int c = 0; c < 3; ++c) cs.components[c] = extract_level_curves(state[c], delta);
    return cs;
}

namespace {

constexpr const char* kColors[3] = {"red", "blue", "green"};

void emit_body(std::ostream& os, const ContourSet& cs, const Bounds& b, double stroke) {
    os << "<rect x=\"" << format_real(b.x_min) << "\" y=\"" << format_real(-b.y_max)
       << "\" width=\"" << format_real(b.x_max - b.x_min) << "\" height=\""
       << format_real(b.y_max - b.y_min) << "\" fill=\"none\" stroke=\"black\" stroke-width=\""
       << format_real(stroke) << "\"/>\n";
    for (int c = 0; c < 3; ++c) {
        for (const Polyline& line : cs.components[c]) {
            if (line.empty()) continue;
            os << "<path fill=\"none\" stroke=\"" << kColors[c] << "\" stroke-width=\""
               << format_real(stroke) << "\" d=\"";
            for (std::size_t k = 0; k < line.size(); ++k)
                os << (k == 0 ? "M" : " L") << format_real(line[k].x) << ' '
                   << format_real(-line[k].y);
            os << "\"/>\n";
        }
    }
}

std::string view_box(const Bounds& b) {
    return format_real(b.x_min) + " " + format_real(-b.y_max) + " " +
           format_real(b.x_max - b.x_min) + " " + format_real(b.y_max - b.y_min);
}

double stroke_for(const Bounds& b) { return 0.004 * std::max(b.x_max - b.x_min, b.y_max - b.y_min); }

}  // namespace

std::string render_svg(const ContourSet& contours, const Grid& grid) {
    const Bounds& b = grid.bounds();
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"600\" "
       << "viewBox=\"" << view_box(b) << "\" preserveAspectRatio=\"xMidYMid meet\">\n";
    emit_body(os, contours, b, stroke_for(b));
    os << "</svg>\n";
    return os.str();
}

std::string render_svg_sheet(const std::vector<SheetTile>& tiles, const Grid& grid,
                             std::size_t columns) {
    if (columns == 0) throw std::invalid_argument("sheet needs at least one column");
    const Bounds& b = grid.bounds();
    constexpr int tile = 300;
    constexpr int label = 24;
    const std::size_t rows = (tiles.size() + columns - 1) / columns;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << columns * tile
       << "\" height=\"" << rows * (tile + label) << "\">\n";
    for (std::size_t t = 0; t < tiles.size(); ++t) {
        const std::size_t x0 = (t % columns) * tile;
        const std::size_t y0 = (t / columns) * (tile + label);
        os << "<text x=\"" << x0 + tile / 2 << "\" y=\"" << y0 + 17
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
           << tiles[t].title << "</text>\n";
        os << "<svg x=\"" << x0 + 10 << "\" y=\"" << y0 + label << "\" width=\"" << tile - 20
           << "\" height=\"" << tile - 20 << "\" viewBox=\"" << view_box(b)
           << "\" preserveAspectRatio=\"xMidYMid meet\">\n";
        emit_body(os, tiles[t].contours, b, stroke_for(b));
        os << "</svg>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_contours_csv(std::ostream& os, const ContourSet& contours) {
    os << "component,polyline_id,x,y\n";
    for (int c = 0; c < 3; ++c)
        for (std::size_t p = 0; p < contours.components[c].size(); ++p)
            for (const Point2& v : contours.components[c][p])
                os << c + 1 << ',' << p << ',' << format_real(v.x) << ',' << format_real(v.y)
                   << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << content;
    if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace segsolve
