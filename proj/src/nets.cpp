#include "startile/nets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "startile/parallel.hpp"

namespace startile {

namespace {

struct Box {
    double x0, y0, x1, y1;
};

Box bounds(const Polygon& p) {
    Box b{1e300, 1e300, -1e300, -1e300};
    for (const auto& v : p) {
        b.x0 = std::min(b.x0, v.x);
        b.y0 = std::min(b.y0, v.y);
        b.x1 = std::max(b.x1, v.x);
        b.y1 = std::max(b.y1, v.y);
    }
    return b;
}

}  // namespace

double separation_radius(const std::vector<Point2>& points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < points.size(); ++a)
        for (std::size_t b = a + 1; b < points.size(); ++b) best = std::min(best, distance(points[a], points[b]));
    return best;
}

double covering_radius(const std::vector<Point2>& points, const Polygon& region, int grid) {
    if (points.empty()) throw ValidationError("covering_radius: empty net");
    const Box b = bounds(region);
    double worst = 0.0;
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            const Point2 p{b.x0 + (b.x1 - b.x0) * i / grid, b.y0 + (b.y1 - b.y0) * j / grid};
            if (!point_in_polygon(region, p)) continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& y : points) nearest = std::min(nearest, distance(p, y));
            worst = std::max(worst, nearest);
        }
    }
    return worst;
}

SeparatedNet make_net(std::vector<Point2> points, Polygon region, int cover_grid) {
    if (points.empty()) throw ValidationError("separated net: no points");
    SeparatedNet net;
    net.points = std::move(points);
    net.region = std::move(region);
    net.r_sep = separation_radius(net.points);
    net.R_cov = net.region.empty() ? 0.0 : covering_radius(net.points, net.region, cover_grid);
    return net;
}

SeparatedNet extract_net(const SubstitutionSystem& sys, const Patch& patch, int cover_grid) {
    if (patch.tiles.empty()) throw ValidationError("empty patch");
    std::vector<Point2> pts;
    for (const auto& t : patch.tiles) pts.push_back(t.placement(sys.prototile(t.type).shape.center()));
    const StarPolygon root = transform(sys.prototile(patch.root_type).shape, root_placement(sys, patch.level));
    return make_net(std::move(pts), root.vertices(), cover_grid);
}

double square_distance(Point2 y, Point2 ll, double side, SquareDistance mode) {
    if (mode == SquareDistance::exact) {
        const double dx = std::max({ll.x - y.x, 0.0, y.x - (ll.x + side)});
        const double dy = std::max({ll.y - y.y, 0.0, y.y - (ll.y + side)});
        return std::hypot(dx, dy);
    }
    double d = distance(y, ll + Point2{0.5 * side, 0.5 * side});
    for (const Point2 c : {ll, ll + Point2{side, 0}, ll + Point2{0, side}, ll + Point2{side, side}}) d = std::min(d, distance(y, c));
    return d;
}

Polygon TauY::square_polygon(const GridSquare& s) const {
    const Point2 ll = origin + side * Point2{static_cast<double>(s.i), static_cast<double>(s.j)};
    return {ll, ll + Point2{side, 0}, ll + Point2{side, side}, ll + Point2{0, side}};
}

TauY build_tau_Y(const SeparatedNet& net, const Polygon& region, const TauYOptions& options) {
    if (net.points.empty()) throw ValidationError("tau_Y: empty net");
    if (region.size() < 3) throw ValidationError("tau_Y: region needs at least 3 vertices");
    TauY tau;
    if (options.side > 0) {
        tau.side = options.side;
    } else {
        const double r_sep = net.points.size() > 1 ? net.r_sep : diameter(region);
        if (!(r_sep > 0)) throw ValidationError("tau_Y: net points coincide");
        tau.side = std::pow(0.5, std::ceil(-std::log2(r_sep / 4.0)));
    }
    const Box b = bounds(region);
    tau.origin = {std::floor(b.x0 / tau.side) * tau.side, std::floor(b.y0 / tau.side) * tau.side};
    const auto ni = static_cast<std::int64_t>(std::ceil((b.x1 - tau.origin.x) / tau.side));
    const auto nj = static_cast<std::int64_t>(std::ceil((b.y1 - tau.origin.y) / tau.side));
    for (std::int64_t i = 0; i < ni; ++i)
        for (std::int64_t j = 0; j < nj; ++j) {
            const Point2 c = tau.origin + tau.side * Point2{i + 0.5, j + 0.5};
            if (point_in_polygon(region, c)) tau.squares.push_back({i, j, -1});
        }
    parallel_for(tau.squares.size(), [&](std::size_t k) {
        auto& s = tau.squares[k];
        const Point2 ll = tau.origin + tau.side * Point2{static_cast<double>(s.i), static_cast<double>(s.j)};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < net.points.size(); ++p) {
            const double d = square_distance(net.points[p], ll, tau.side, options.distance);
            if (d < best) {
                best = d;
                s.owner = static_cast<int>(p);
            }
        }
    });
    tau.tiles.assign(net.points.size(), {});
    for (std::size_t k = 0; k < tau.squares.size(); ++k) tau.tiles[static_cast<std::size_t>(tau.squares[k].owner)].push_back(k);
    return tau;
}

std::string tile_shape_key(const TauY& tau, std::size_t point) {
    const auto& ids = tau.tiles.at(point);
    if (ids.empty()) return "";
    std::vector<std::pair<std::int64_t, std::int64_t>> cells;
    for (auto k : ids) cells.emplace_back(tau.squares[k].i, tau.squares[k].j);
    std::sort(cells.begin(), cells.end());
    std::ostringstream key;
    for (const auto& [i, j] : cells) key << (i - cells.front().first) << ',' << (j - cells.front().second) << ';';
    return key.str();
}

std::size_t distinct_tile_shapes(const TauY& tau) {
    std::set<std::string> keys;
    for (std::size_t p = 0; p < tau.tiles.size(); ++p) keys.insert(tile_shape_key(tau, p));
    return keys.size();
}

}  // namespace startile
