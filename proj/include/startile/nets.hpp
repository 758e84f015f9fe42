#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "startile/errors.hpp"
#include "startile/geometry.hpp"
#include "startile/substitution.hpp"

namespace startile {

struct SeparatedNet {
    std::vector<Point2> points;
    double r_sep = 0.0;  // minimum pairwise distance
    double R_cov = 0.0;  // covering radius over the region, measured on a grid
    Polygon region;
};

double separation_radius(const std::vector<Point2>& points);
// Largest distance from a grid point of `region` to its nearest net point.
double covering_radius(const std::vector<Point2>& points, const Polygon& region, int grid = 200);

// One point per tile: the image of the prototile star center.
SeparatedNet extract_net(const SubstitutionSystem& sys, const Patch& patch, int cover_grid = 200);
SeparatedNet make_net(std::vector<Point2> points, Polygon region, int cover_grid = 200);

enum class SquareDistance {
    corners_and_center,  // min over the four corners and the center
    exact,               // point-to-square set distance
};

struct TauYOptions {
    // Grid side; 0 picks the largest power of 1/2 not above r_sep / 4.
    double side = 0.0;
    SquareDistance distance = SquareDistance::corners_and_center;
};

struct GridSquare {
    std::int64_t i = 0, j = 0;  // lower-left corner at origin + side * (i, j)
    int owner = -1;
};

/// τ_Y: the grid squares whose centers lie in the region, each given to the
/// nearest net point (ties to the lowest index).
struct TauY {
    double side = 0.0;
    Point2 origin{};
    std::vector<GridSquare> squares;
    std::vector<std::vector<std::size_t>> tiles;  // square indices per net point

    Polygon square_polygon(const GridSquare& s) const;
};

TauY build_tau_Y(const SeparatedNet& net, const Polygon& region, const TauYOptions& options = {});

double square_distance(Point2 y, Point2 lower_left, double side, SquareDistance mode);

// Canonical description of a tile up to translation, for counting shapes.
std::string tile_shape_key(const TauY& tau, std::size_t point);
std::size_t distinct_tile_shapes(const TauY& tau);

}  // namespace startile
