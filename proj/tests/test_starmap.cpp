#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "startile/starmap.hpp"
#include "startile/systems.hpp"

using namespace startile;

namespace {

StarPolygon regular_of_area(int n, double area) {
    const double radius = std::sqrt(2 * area / (n * std::sin(kTwoPi / n)));
    Polygon p;
    for (int k = 0; k < n; ++k) p.push_back({radius * std::cos(kTwoPi * k / n), radius * std::sin(kTwoPi * k / n)});
    return StarPolygon(p, {0, 0});
}

StarPolygon square_of_area(double area) {
    const double h = 0.5 * std::sqrt(area);
    return StarPolygon({{h, -h}, {h, h}, {-h, h}, {-h, -h}}, {0, 0});
}

std::vector<Point2> disk_points(int count, std::uint64_t seed, double r_max = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Point2> out;
    for (int k = 0; k < count; ++k) {
        const double r = r_max * std::sqrt(u(rng)), t = kTwoPi * u(rng);
        out.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return out;
}

// Disk angles of the rays H sends onto vertex rays.
std::vector<double> break_thetas(const ElevationMap& h) {
    std::vector<double> out;
    for (std::size_t k = 0; k < h.domain().size(); ++k) out.push_back(h.theta_of_eta(h.domain().angle_breaks()[k]));
    out.push_back(kTwoPi);
    return out;
}

bool near_break(const std::vector<double>& thetas, Point2 x, double tube) {
    const double r = norm(x);
    double t = std::atan2(x.y, x.x);
    if (t < 0) t += kTwoPi;
    for (double b : thetas)
        if (r * std::abs(t - b) < tube) return true;
    return false;
}

std::vector<StarPolygon> test_domains() {
    std::vector<StarPolygon> out{square_of_area(kPi), regular_of_area(7, 2.0),
                                 StarPolygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {0.5, 0.5})};
    for (const auto& name : builtin_names())
        for (const auto& p : builtin_system(name).prototiles) out.push_back(p.shape);
    return out;
}

}  // namespace

TEST_CASE("elevation map of a near-disk is near the identity") {
    const ElevationMap h(regular_of_area(1024, kPi));
    double worst = 0;
    for (const auto& x : disk_points(1000, 1)) worst = std::max(worst, distance(h.forward(x), x));
    CHECK(worst <= 5e-3);
}

TEST_CASE("elevation map basics") {
    for (const auto& t : test_domains()) {
        const ElevationMap h(t);
        CHECK(distance(h.forward({0, 0}), t.center()) == 0.0);
        CHECK(h.jacobian() == doctest::Approx(t.area() / kPi));
        // Unit circle lands on the boundary.
        for (int k = 0; k < 200; ++k) {
            const double th = kTwoPi * k / 200;
            CHECK(oracle::dist_to_boundary(t.vertices(), h.forward({std::cos(th), std::sin(th)})) <= 1e-9);
        }
        // η strictly increasing in θ.
        double prev = -1;
        for (int k = 0; k <= 2000; ++k) {
            const double eta = h.eta_of_theta(kTwoPi * k / 2000);
            CHECK(eta > prev);
            prev = eta;
        }
    }
    const ElevationMap sq(square_of_area(kPi));
    CHECK(sq.eta_of_theta(kPi / 2) == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("elevation map round trip") {
    for (const auto& t : test_domains()) {
        const ElevationMap h(t);
        double worst = 0;
        for (const auto& x : disk_points(10000, 2)) worst = std::max(worst, distance(h.inverse(h.forward(x)), x));
        // Points exactly on break rays.
        for (double th : break_thetas(h))
            for (double r : {0.1, 0.5, 1.0}) {
                const Point2 x{r * std::cos(th), r * std::sin(th)};
                worst = std::max(worst, distance(h.inverse(h.forward(x)), x));
            }
        CHECK(worst <= 1e-9);
    }
}

TEST_CASE("elevation map preserves sector areas") {
    for (const auto& t : test_domains()) {
        const ElevationMap h(t);
        for (double th : {0.5, 1.0, 2.0}) {
            // Fan from the center through the boundary images, by shoelace.
            const double eta = h.eta_of_theta(th);
            Polygon fan{t.center(), t.boundary_point(0.0)};
            for (std::size_t k = 1; k < t.size() && t.angle_breaks()[k] < eta; ++k) fan.push_back(t.vertex(k));
            fan.push_back(h.forward({std::cos(th), std::sin(th)}));
            CHECK(std::abs(oracle::shoelace(fan) - 0.5 * th * t.area() / kPi) <= 1e-10);
        }
    }
}

TEST_CASE("elevation map Jacobian is |T| / pi") {
    for (const auto& t : test_domains()) {
        const ElevationMap h(t);
        const auto breaks = break_thetas(h);
        std::vector<double> res;
        for (const auto& x : disk_points(4000, 3)) {
            const double r = norm(x);
            if (r < 1e-2 || r > 1 - 1e-2 || near_break(breaks, x, 1e-2)) continue;
            res.push_back(std::abs(oracle::jacobian([&](Point2 p) { return h.forward(p); }, x, 1e-6) / h.jacobian() - 1));
        }
        CHECK(oracle::median(res) <= 1e-3);
    }
}

TEST_CASE("elevation coordinate") {
    const StarPolygon t({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, {0.5, 0.5});
    const ElevationMap h(t);
    for (const auto& x : disk_points(500, 4)) CHECK(h.elevation(h.forward(x)) == doctest::Approx(norm(x)).epsilon(1e-9));
    CHECK_THROWS_AS(h.inverse({5, 5}), DomainError);
    CHECK_THROWS_AS(h.forward({2, 0}), DomainError);
}

TEST_CASE("star to star") {
    const StarPolygon sq = square_of_area(kPi);
    const PlaneMap same = star_to_star(sq, sq);
    for (const auto& y : oracle::uniform_in(sq.vertices(), 500, 5)) CHECK(distance(same(y), y) <= 1e-9);

    const StarPolygon gon = regular_of_area(1024, kPi);
    const PlaneMap m = star_to_star(sq, gon);
    std::vector<double> res;
    for (const auto& y : oracle::uniform_in(sq.vertices(), 1000, 6)) {
        if (oracle::dist_to_boundary(sq.vertices(), y) < 1e-2 || norm(y) < 1e-2) continue;
        if (std::abs(std::abs(y.x) - std::abs(y.y)) < 1e-2) continue;  // diagonal break rays
        res.push_back(std::abs(oracle::jacobian([&](Point2 p) { return m(p); }, y, 1e-6) - 1));
    }
    CHECK(oracle::median(res) <= 1e-3);

    // Images of equal-angle sectors have equal area: the fan through the image
    // of the sector boundary.
    const StarToStarLayer layer(sq, gon);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, kTwoPi);
    for (int k = 0; k < 20; ++k) {
        const double eta = u(rng);
        const Point2 image = layer.apply(sq.boundary_point(eta));
        const double eta2 = gon.angle_of(image);
        CHECK(gon.sector_area(eta2) == doctest::Approx(sq.sector_area(eta)).epsilon(1e-8));
    }
    CHECK_THROWS_AS(star_to_star(sq, regular_of_area(5, 2.0)), GeometryError);
}

TEST_CASE("numerical jacobian of linear maps") {
    const PlaneMap id;
    CHECK(numerical_jacobian(id, {0.3, 0.4}, 1e-5) == doctest::Approx(1.0).epsilon(1e-9));
    const PlaneMap diag(std::make_shared<LinearLayer>(std::array<double, 4>{2, 0, 0, 0.5}));
    CHECK(numerical_jacobian(diag, {0.3, 0.4}, 1e-5) == doctest::Approx(1.0).epsilon(1e-9));
    const PlaneMap shear(std::make_shared<LinearLayer>(std::array<double, 4>{1, 3, 0, 2}, Point2{1, 1}));
    CHECK(numerical_jacobian(shear, {-2, 5}, 1e-5) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("elevation layer Jacobian on an area-pi domain") {
    const StarPolygon t = regular_of_area(5, kPi);
    const ElevationMap h(t);
    const PlaneMap map(std::make_shared<ElevationLayer>(h));
    const auto breaks = break_thetas(h);
    std::vector<double> res;
    for (const auto& x : disk_points(2000, 8, 0.98)) {
        if (norm(x) < 1e-2 || near_break(breaks, x, 1e-2)) continue;
        res.push_back(std::abs(numerical_jacobian(map, x, 1e-6) - 1));
    }
    CHECK(oracle::median(res) <= 1e-3);
}
