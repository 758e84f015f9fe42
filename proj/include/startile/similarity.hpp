#pragma once

#include <array>
#include <complex>

#include "startile/geometry.hpp"

namespace startile {

/// x -> translation + scale * R(rotation) * F(x), where F mirrors across the
/// x-axis when `reflect` is set.
struct Similarity {
    double scale = 1.0;
    double rotation = 0.0;
    bool reflect = false;
    Point2 translation{};

    static Similarity identity() { return {}; }
    static Similarity scaling(double s) { return {s, 0.0, false, {}}; }
    static Similarity translate(Point2 t) { return {1.0, 0.0, false, t}; }

    // The unique similarity sending src[k] to dst[k]; throws when none exists.
    static Similarity from_triangles(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst,
                                     double tol = 1e-9);

    Point2 apply(Point2 p) const;
    Point2 operator()(Point2 p) const { return apply(p); }
    // (*this)(inner(x))
    Similarity compose(const Similarity& inner) const;
    Similarity inverse() const;
    // 2x2 linear part, row major.
    std::array<double, 4> linear() const;
};

// Image of a star polygon; keeps the image of the first vertex first and the
// ring counterclockwise.
StarPolygon transform(const StarPolygon& poly, const Similarity& s);
Polygon transform(const Polygon& poly, const Similarity& s);

}  // namespace startile
