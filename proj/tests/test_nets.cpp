#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "startile/nets.hpp"
#include "startile/systems.hpp"

using namespace startile;

namespace {

Polygon box(double w, double h) { return {{0, 0}, {w, 0}, {w, h}, {0, h}}; }

// Nearest point by brute force, ties to the lowest index.
int nearest(const std::vector<Point2>& pts, Point2 ll, double side, SquareDistance mode) {
    int best = -1;
    double d = 1e300;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        double e;
        if (mode == SquareDistance::exact) {
            const double dx = std::max({ll.x - pts[k].x, 0.0, pts[k].x - ll.x - side});
            const double dy = std::max({ll.y - pts[k].y, 0.0, pts[k].y - ll.y - side});
            e = std::hypot(dx, dy);
        } else {
            e = distance(pts[k], ll + Point2{side / 2, side / 2});
            for (double a : {0.0, side})
                for (double b : {0.0, side}) e = std::min(e, distance(pts[k], ll + Point2{a, b}));
        }
        if (e < d) d = e, best = static_cast<int>(k);
    }
    return best;
}

void check_partition(const SeparatedNet& net, const Polygon& region, const TauY& tau, SquareDistance mode) {
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    std::size_t assigned = 0;
    for (std::size_t p = 0; p < tau.tiles.size(); ++p) {
        for (auto k : tau.tiles[p]) {
            const auto& s = tau.squares[k];
            CHECK(s.owner == static_cast<int>(p));
            CHECK(seen.insert({s.i, s.j}).second);
            const Point2 ll = tau.origin + tau.side * Point2{double(s.i), double(s.j)};
            CHECK(nearest(net.points, ll, tau.side, mode) == static_cast<int>(p));
            ++assigned;
        }
    }
    CHECK(assigned == tau.squares.size());
    // Every square whose center is in the region is present.
    double area = 0;
    for (const auto& s : tau.squares) {
        const auto sq = tau.square_polygon(s);
        CHECK(oracle::inside(region, (sq[0] + sq[2]) * 0.5));
        area += tau.side * tau.side;
    }
    // Squares tile a box exactly; elsewhere they miss by at most a strip along the boundary.
    double perimeter = 0;
    for (std::size_t k = 0; k < region.size(); ++k) perimeter += distance(region[k], region[(k + 1) % region.size()]);
    const double exact = std::abs(oracle::shoelace(region));
    if (region.size() == 4 && region[0].y == region[1].y && region[1].x == region[2].x)
        CHECK(area == doctest::Approx(exact).epsilon(1e-9));
    else
        CHECK(std::abs(area - exact) <= perimeter * tau.side);
}

}  // namespace

TEST_CASE("nets from patches") {
    const auto chair = chair_system();
    const auto net = extract_net(chair, inflate_patch(chair, 0, 2));
    CHECK(net.points.size() == 16);
    for (const auto& name : builtin_names()) {
        const auto sys = builtin_system(name);
        const auto patch = inflate_patch(sys, 0, 3);
        CHECK(extract_net(sys, patch).points.size() == patch.tiles.size());
    }
    const auto squares = squares_system();
    const auto lattice = extract_net(squares, inflate_patch(squares, 0, 3));
    CHECK(lattice.r_sep == doctest::Approx(1.0));
    CHECK(lattice.R_cov == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK_THROWS_AS(make_net({}, box(1, 1)), ValidationError);
}

TEST_CASE("single point owns the region") {
    const Polygon region = box(2, 2);
    const auto net = make_net({{0.7, 1.2}}, region);
    const auto tau = build_tau_Y(net, region, {0.25, SquareDistance::corners_and_center});
    CHECK(tau.tiles[0].size() == tau.squares.size());
    CHECK(tau.squares.size() == 64);
}

TEST_CASE("symmetric pair splits along the mirror line") {
    const Polygon region = box(2, 1);
    const auto net = make_net({{0.5, 0.5}, {1.5, 0.5}}, region);
    for (auto mode : {SquareDistance::corners_and_center, SquareDistance::exact}) {
        const auto tau = build_tau_Y(net, region, {0.25, mode});
        for (const auto& s : tau.squares) {
            const double cx = tau.origin.x + tau.side * (s.i + 0.5);
            CHECK(s.owner == (cx < 1.0 ? 0 : 1));
        }
        check_partition(net, region, tau, mode);
    }
    // Grid offset so a column straddles x = 1: tied squares go to index 0.
    const auto net2 = make_net({{0.4, 0.5}, {1.6, 0.5}}, {{-0.1, 0}, {2.1, 0}, {2.1, 1}, {-0.1, 1}});
    const auto tau2 = build_tau_Y(net2, net2.region, {0.2, SquareDistance::exact});
    for (const auto& s : tau2.squares) {
        const double lo = tau2.origin.x + tau2.side * s.i, hi = lo + tau2.side;
        if (lo < 1.0 - 1e-12 && hi > 1.0 + 1e-12) CHECK(s.owner == 0);
    }
}

TEST_CASE("lattice net gives 16-square blocks") {
    const Polygon region = box(10, 10);
    std::vector<Point2> pts;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) pts.push_back({i + 0.5, j + 0.5});
    const auto net = make_net(pts, region);
    CHECK(net.r_sep == doctest::Approx(1.0));
    for (auto mode : {SquareDistance::corners_and_center, SquareDistance::exact}) {
        const auto tau = build_tau_Y(net, region, {0.0, mode});
        CHECK(tau.side == 0.25);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            REQUIRE(tau.tiles[p].size() == 16);
            // The block is the unit cell around the point.
            for (auto k : tau.tiles[p]) {
                const auto sq = tau.square_polygon(tau.squares[k]);
                const Point2 c = (sq[0] + sq[2]) * 0.5;
                CHECK(std::abs(c.x - pts[p].x) < 0.5);
                CHECK(std::abs(c.y - pts[p].y) < 0.5);
            }
        }
        CHECK(distinct_tile_shapes(tau) == 1);
        check_partition(net, region, tau, mode);
    }
}

TEST_CASE("aperiodic net partitions") {
    const auto sys = penrose_system();
    const auto patch = inflate_patch(sys, 0, 5);
    const auto net = extract_net(sys, patch, 50);
    const auto tau = build_tau_Y(net, net.region);
    CHECK(tau.side <= net.r_sep / 4);
    CHECK(tau.side > net.r_sep / 8);
    check_partition(net, net.region, tau, SquareDistance::corners_and_center);
    // Each point owns the square containing it.
    for (std::size_t p = 0; p < net.points.size(); ++p) {
        bool holds = false;
        for (auto k : tau.tiles[p]) {
            const auto sq = tau.square_polygon(tau.squares[k]);
            holds |= net.points[p].x >= sq[0].x && net.points[p].x <= sq[2].x && net.points[p].y >= sq[0].y &&
                     net.points[p].y <= sq[2].y;
        }
        CHECK(holds);
    }
}
