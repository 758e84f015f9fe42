#pragma once

#include "startile/geometry.hpp"
#include "startile/plane_map.hpp"

namespace startile {

struct Polar {
    double r = 0.0;
    double theta = 0.0;  // [0, 2π)
};

/// H: closed unit disk -> T sending θ-sectors of the disk to sectors of T with
/// area θ|T|/(2π) and each circle |x| = r to the elevation line at r. Its
/// Jacobian is |T|/π wherever it is differentiable.
class ElevationMap {
public:
    explicit ElevationMap(StarPolygon domain);

    const StarPolygon& domain() const { return domain_; }
    double jacobian() const { return domain_.area() / kPi; }

    Point2 forward(Point2 x) const;
    Point2 forward_polar(double r, double theta) const;
    Point2 inverse(Point2 y) const;
    Polar inverse_polar(Point2 y) const;

    // Disk angle θ -> boundary angle η (about the center, from vertex 0).
    double eta_of_theta(double theta) const;
    double theta_of_eta(double eta) const;
    // Pulled-back radial coordinate; 1 on ∂T, 0 at the center.
    double elevation(Point2 y) const;

private:
    StarPolygon domain_;
};

ElevationMap build_elevation_map(const StarPolygon& domain);

class ElevationLayer : public MapLayer {
public:
    explicit ElevationLayer(ElevationMap map) : map_(std::move(map)) {}
    Point2 apply(Point2 x) const override { return map_.forward(x); }
    std::string label() const override { return "elevation"; }

private:
    ElevationMap map_;
};

/// H2 o H1^-1 for equal-area star polygons.
class StarToStarLayer : public MapLayer {
public:
    StarToStarLayer(const StarPolygon& from, const StarPolygon& to);
    Point2 apply(Point2 x) const override { return to_.forward(from_.inverse(x)); }
    std::string label() const override { return "star_to_star"; }

private:
    ElevationMap from_;
    ElevationMap to_;
};

// Throws GeometryError when the areas differ by more than 1e-9 relative.
PlaneMap star_to_star(const StarPolygon& from, const StarPolygon& to);

}  // namespace startile
