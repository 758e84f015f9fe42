#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace startile {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 lerp(Point2 a, Point2 b, double t) { return a + t * (b - a); }

// Twice the signed area of triangle abc; positive when abc turns left.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A map was evaluated outside the region it is defined on.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Polygon = std::vector<Point2>;

double signed_area(std::span<const Point2> poly);
double diameter(std::span<const Point2> poly);
double segment_distance(Point2 p, Point2 a, Point2 b);
double boundary_distance(std::span<const Point2> poly, Point2 p);

// Closed containment: points within `eps` of the boundary count as inside.
bool point_in_polygon(std::span<const Point2> poly, Point2 p, double eps = 1e-12);
bool point_strictly_inside(std::span<const Point2> poly, Point2 p, double eps = 1e-12);

bool is_simple(std::span<const Point2> poly);

// Drops repeated and collinear vertices and orients the ring counterclockwise,
// keeping the first surviving vertex first.
Polygon normalize_polygon(Polygon poly, double eps = 1e-12);

// True when the closed segment ab lies in the closed polygon.
bool segment_inside(std::span<const Point2> poly, Point2 a, Point2 b, double eps = 1e-10);
bool triangle_inside(std::span<const Point2> poly, Point2 a, Point2 b, Point2 c, double eps = 1e-10);

// Minimum distance between the closed regions (0 when they meet or overlap).
double polygon_separation(std::span<const Point2> a, std::span<const Point2> b);
double overlap_area(std::span<const Point2> a, std::span<const Point2> b);

// Intersection of the inner half-planes of all edges; empty when not star shaped.
Polygon polygon_kernel(std::span<const Point2> poly);

// Region of `poly` visible from q, as a ring in angular order about q.
Polygon visibility_polygon(std::span<const Point2> poly, Point2 q);

/// A simple counterclockwise polygon together with a point that sees all of it.
///
/// The center must lie in the open kernel, so every ray from the center meets
/// the boundary exactly once. Angles are measured counterclockwise from the
/// ray through the first vertex; `angle_breaks()[k]` is the angle of vertex k,
/// with a trailing entry of 2π.
class StarPolygon {
public:
    // Empty placeholder, only meant to be assigned over.
    StarPolygon() = default;
    StarPolygon(Polygon vertices, Point2 center);

    const Polygon& vertices() const { return vertices_; }
    Point2 center() const { return center_; }
    double area() const { return area_; }
    double reference_angle() const { return ref_angle_; }
    const std::vector<double>& angle_breaks() const { return breaks_; }
    const std::vector<double>& cumulative_areas() const { return cumulative_; }
    std::size_t size() const { return vertices_.size(); }
    Point2 vertex(std::size_t k) const { return vertices_[k % vertices_.size()]; }
    double diameter() const;
    // Distance from the center to the boundary.
    double inradius() const;

    // Relative angle of p - center in [0, 2π).
    double angle_of(Point2 p) const;
    std::size_t edge_at(double eta) const;

    double boundary_radius(double alpha) const;
    Point2 boundary_point(double eta) const;
    double sector_area(double eta) const;
    double solve_eta(double target_area) const;

    // Boundary point reached after sweeping `target_area` of sector; returns the
    // edge index and the affine parameter along it.
    std::pair<std::size_t, double> locate_sector(double target_area) const;
    std::pair<std::size_t, double> ray_hit(double eta) const;

    bool contains(Point2 p, double eps = 1e-12) const;
    StarPolygon contract(double r) const;
    StarPolygon with_center(Point2 c) const { return StarPolygon(vertices_, c); }

private:
    Polygon vertices_;
    Point2 center_;
    double area_ = 0.0;
    double ref_angle_ = 0.0;
    std::vector<double> breaks_;
    std::vector<double> cumulative_;
    std::vector<double> triangle_areas_;
};

double polygon_area(const StarPolygon& poly);

// Kernel membership of p; throws GeometryError when p is not strictly inside.
bool is_star_center(std::span<const Point2> poly, Point2 p);

struct WitnessOptions {
    double r_min = 1e-3;
    int boundary_samples = 1000;
    int grid_half_width = 6;
    int delta_halvings = 10;
    // Only accept q in the open kernel of T (so the q-visible region is T).
    bool require_kernel = false;
};

struct WitnessPoint {
    Point2 q;
    double r_used = 0.0;
    bool in_kernel = false;
};

WitnessPoint find_witness_point(const StarPolygon& whole, std::span<const StarPolygon> parts,
                                double r, const WitnessOptions& opts = {});

}  // namespace startile
