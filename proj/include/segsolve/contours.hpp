#pragma once

// Level curves u_i = delta by marching squares, plus SVG/CSV output.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "segsolve/grid.hpp"

namespace segsolve {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

/// Closed polylines repeat their first vertex at the end.
using Polyline = std::vector<Point2>;

struct ContourSet {
    double delta = 0.0;
    std::array<std::vector<Polyline>, 3> components;

    std::size_t polyline_count() const;
};

/// Marching squares on one field. Nodes with value >= delta count as inside;
/// saddle cells are split according to the mean of the four corners.
std::vector<Polyline> extract_level_curves(const ScalarField& f, double delta);

ContourSet extract_contours(const SystemState& state, double delta);

/// Frame plus one path per polyline, stroked red/blue/green for u1/u2/u3.
/// The viewBox is the domain rectangle with y pointing up.
std::string render_svg(const ContourSet& contours, const Grid& grid);

struct SheetTile {
    std::string title;
    ContourSet contours;
};

/// Tiles laid out row-major, `columns` per row, each with its own frame.
std::string render_svg_sheet(const std::vector<SheetTile>& tiles, const Grid& grid,
                             std::size_t columns = 3);

/// Header `component,polyline_id,x,y`.
void write_contours_csv(std::ostream& os, const ContourSet& contours);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace segsolve
