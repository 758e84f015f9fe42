#include "startile/starmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace startile {

namespace {

double wrap(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a >= kTwoPi ? 0.0 : a;
}

constexpr double kDiskSlack = 1e-9;

}  // namespace

ElevationMap::ElevationMap(StarPolygon domain) : domain_(std::move(domain)) {}

ElevationMap build_elevation_map(const StarPolygon& domain) { return ElevationMap(domain); }

Point2 ElevationMap::forward_polar(double r, double theta) const {
    if (!(r >= 0 && r <= 1 + kDiskSlack)) throw DomainError("elevation map: point outside the unit disk");
    const Point2 c = domain_.center();
    if (r < 1e-9) return c;
    const auto [k, t] = domain_.locate_sector(wrap(theta) * domain_.area() / kTwoPi);
    const Point2 b = lerp(domain_.vertex(k), domain_.vertex(k + 1), t);
    return c + r * (b - c);
}

Point2 ElevationMap::forward(Point2 x) const {
    const double r = norm(x);
    if (r < 1e-9) return domain_.center();
    return forward_polar(r, std::atan2(x.y, x.x));
}

Polar ElevationMap::inverse_polar(Point2 y) const {
    const Point2 c = domain_.center();
    const double d = distance(y, c);
    if (d == 0.0) return {0.0, 0.0};
    const double eta = domain_.angle_of(y);
    const auto [k, t] = domain_.ray_hit(eta);
    const Point2 b = lerp(domain_.vertex(k), domain_.vertex(k + 1), t);
    const double r = d / distance(b, c);
    if (r > 1 + kDiskSlack) {
        std::ostringstream msg;
        msg << "elevation map: point (" << y.x << ", " << y.y << ") lies outside the domain";
        throw DomainError(msg.str());
    }
    const double area = domain_.cumulative_areas()[k] + t * (domain_.cumulative_areas()[k + 1] - domain_.cumulative_areas()[k]);
    return {r, wrap(kTwoPi * area / domain_.area())};
}

Point2 ElevationMap::inverse(Point2 y) const {
    const Polar p = inverse_polar(y);
    return {p.r * std::cos(p.theta), p.r * std::sin(p.theta)};
}

double ElevationMap::eta_of_theta(double theta) const {
    return domain_.solve_eta(std::clamp(theta, 0.0, kTwoPi) * domain_.area() / kTwoPi);
}

double ElevationMap::theta_of_eta(double eta) const { return kTwoPi * domain_.sector_area(eta) / domain_.area(); }

double ElevationMap::elevation(Point2 y) const {
    const Point2 c = domain_.center();
    const double d = distance(y, c);
    if (d == 0.0) return 0.0;
    return d / distance(domain_.boundary_point(domain_.angle_of(y)), c);
}

StarToStarLayer::StarToStarLayer(const StarPolygon& from, const StarPolygon& to) : from_(from), to_(to) {
    if (std::abs(from.area() - to.area()) > 1e-9 * std::max(from.area(), to.area())) {
        std::ostringstream msg;
        msg << "star_to_star: areas differ (" << from.area() << " vs " << to.area() << ")";
        throw GeometryError(msg.str());
    }
}

PlaneMap star_to_star(const StarPolygon& from, const StarPolygon& to) {
    return PlaneMap(std::make_shared<StarToStarLayer>(from, to));
}

}  // namespace startile
