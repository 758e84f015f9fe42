#include "doctest.h"
#include "oracles.hpp"
#include "startile/realize.hpp"
#include "startile/starmap.hpp"
#include "startile/systems.hpp"

using namespace startile;

TEST_CASE("level densities") {
    const auto chair = chair_system();
    const SupertileTree ctree(chair, 0, 4);
    for (int m = 0; m <= 4; ++m) {
        const auto d = level_density(ctree, chair, TileDensity::f_tau(), m);
        for (double v : d.values) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    const auto pen = penrose_system();
    auto tree = std::make_shared<SupertileTree>(pen, 0, 6);
    const auto masses = node_masses(*tree, pen, TileDensity::f_tau());
    const auto d0 = level_density(*tree, masses, 0);
    for (std::size_t k = 0; k < d0.nodes.size(); ++k)
        CHECK(d0.values[k] == doctest::Approx(1.0 / tree->node(d0.nodes[k]).shape.area()).epsilon(1e-12));

    // Refinement consistency: area-weighted mean of the children's values.
    for (int m = 1; m <= 6; ++m) {
        const auto dm = level_density(*tree, masses, m);
        const auto dc = level_density(*tree, masses, m - 1);
        for (std::size_t k = 0; k < dm.nodes.size(); ++k) {
            const auto& node = tree->node(dm.nodes[k]);
            double mass = 0, area = 0;
            for (int c : node.children) {
                mass += dc.value_of_node(c) * tree->node(c).shape.area();
                area += tree->node(c).shape.area();
            }
            CHECK(mass / area == doctest::Approx(dm.values[k]).epsilon(1e-9));
        }
    }

    // Values approach rho, with the deviation shrinking from level to level.
    const double rho = pf_stats(pen).rho;
    double prev = 1e300;
    for (int m = 0; m <= 6; ++m) {
        const auto dm = level_density(*tree, masses, m);
        double worst = 0;
        for (double v : dm.values) worst = std::max(worst, std::abs(v / rho - 1));
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("phi_0 is the identity") {
    const auto real = build_phi_m(penrose_system(), 0, 0);
    CHECK(real.map.is_identity());
}

TEST_CASE("chair realization is the identity") {
    const auto sys = chair_system();
    RealizeOptions opts;
    opts.working_level = 4;
    const auto real = build_phi_m(sys, 0, 3, TileDensity::f_tau(), opts);
    for (const auto& x : oracle::uniform_in(real.tree->node(0).shape.vertices(), 1000, 1)) CHECK(distance(real.map(x), x) <= 1e-6);
    const auto res = verify_realization(real, sys, TileDensity::f_tau(), 500, 42);
    CHECK(res.median <= 1e-9);
    CHECK(bilip_estimate(real.map, real.tree->node(0).shape.vertices(), 500, 42) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("verification helpers") {
    const StarPolygon sq({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}, {0, 0});
    const auto pts = oracle::uniform_in(sq.vertices(), 500, 2);
    const auto id = verify_jacobian(PlaneMap(), [](Point2) { return 1.0; }, pts, 1e-5);
    CHECK(id.max <= 1e-9);

    const double r = std::sqrt(2 * 4.0 / (7 * std::sin(kTwoPi / 7)));
    Polygon hep;
    for (int k = 0; k < 7; ++k) hep.push_back({r * std::cos(kTwoPi * k / 7), r * std::sin(kTwoPi * k / 7)});
    const PlaneMap s2s = star_to_star(sq, StarPolygon(hep, {0, 0}));
    std::vector<Point2> inner;
    for (const auto& p : pts)
        if (oracle::dist_to_boundary(sq.vertices(), p) > 1e-2) inner.push_back(p);
    CHECK(verify_jacobian(s2s, [](Point2) { return 1.0; }, inner, 1e-6).median <= 1e-3);

    CHECK(bilip_estimate(PlaneMap(), sq.vertices(), 200, 1) == 1.0);
    const PlaneMap diag(std::make_shared<LinearLayer>(std::array<double, 4>{2, 0, 0, 0.5}));
    CHECK(bilip_estimate(diag, sq.vertices(), 200, 1) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Penrose phi_3 on a level-6 working supertile") {
    const auto sys = penrose_system();
    const auto real = build_phi_m(sys, 0, 3);
    REQUIRE(real.builds.size() == 3);
    const auto res = verify_realization(real, sys, TileDensity::f_tau(), 2000, 42);
    CHECK(res.median <= 5e-2);
    CHECK(res.excluded_fraction < 0.01);

    // Each level fixes its supertile boundaries.
    for (int k = 1; k <= 3; ++k) {
        const auto& build = real.builds[static_cast<std::size_t>(k - 1)];
        double grid = 0;
        for (const auto& r : build.reports) grid = std::max(grid, r.flow.grid_scale);
        grid *= std::pow(sys.xi, k - 1);  // correctors live in the canonical frame
        const PlaneMap layer(real.map.layers()[static_cast<std::size_t>(k - 1)]);
        double disp = 0;
        for (int n : real.tree->at_level(k))
            for (const auto& b : sample_boundary(real.tree->node(n).shape.vertices(), 60)) disp = std::max(disp, distance(layer(b), b));
        CHECK(disp <= 2 * grid + 1e-12);
    }

    // The images stay in the working supertile and the bound is finite.
    const auto region = real.tree->node(0).shape.vertices();
    for (const auto& x : oracle::uniform_in(region, 2000, 3)) {
        const Point2 y = real.map(x);
        CHECK((oracle::inside(region, y) || oracle::dist_to_boundary(region, y) < 1e-9));
    }
    const double bl = bilip_estimate(real.map, region, 500, 42);
    CHECK(std::isfinite(bl));
    CHECK(bl >= 1.0);

    // Residual against f / rho does not grow with m (10% noise allowance).
    const double rho = pf_stats(sys).rho;
    const auto pts = sample_tiles(*real.tree, 2000, 7);
    double prev = 1e300;
    for (int m = 1; m <= 3; ++m) {
        const auto phi = real.prefix(m);
        const auto s = verify_jacobian(
            phi.map, [&](Point2 x) { return 1.0 / (rho * real.tree->node(real.tree->locate(x, 0)).shape.area()); }, pts.points,
            1e-5);
        CHECK(s.median <= 1.1 * prev);
        prev = s.median;
    }
}

TEST_CASE("distinct correctors are shared") {
    const auto real = build_phi_m(penrose_system(), 0, 2);
    for (const auto& b : real.builds) {
        CHECK(b.distinct_correctors >= 1);
        CHECK(b.distinct_correctors <= b.supertiles);
    }
    const auto chair = build_phi_m(chair_system(), 0, 2, TileDensity::f_tau(), {4, {}, kDefaultTileCap});
    for (const auto& b : chair.builds) CHECK(b.distinct_correctors == 1);
}

TEST_CASE("failed correctors name the supertile") {
    RealizeOptions opts;
    opts.working_level = 3;
    opts.corrector.flow_tolerance = 1e-14;
    opts.corrector.radial_tolerance = 1e-14;
    try {
        build_phi_m(penrose_system(), 0, 1, TileDensity::f_tau(), opts);
        FAIL("expected a numeric failure");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("supertile 0:3/") != std::string::npos);
    }
}

TEST_CASE("per-type densities") {
    const auto sys = penrose_system();
    const auto f = TileDensity::per_type({2.0, 1.0});
    RealizeOptions opts;
    opts.working_level = 4;
    const auto real = build_phi_m(sys, 0, 2, f, opts);
    CHECK(verify_realization(real, sys, f, 1000, 3).median <= 5e-2);
}

TEST_CASE("supertile problems") {
    const auto p = supertile_problem(penrose_system(), penrose::acute, 1);
    REQUIRE(p.parts.size() == 3);
    double area = 0;
    for (const auto& part : p.parts) area += part.area();
    CHECK(area == doctest::Approx(p.whole.area()).epsilon(1e-12));
    for (std::size_t k = 0; k < 3; ++k) CHECK(p.values[k] == doctest::Approx(1.0 / p.parts[k].area()).epsilon(1e-12));
    CHECK_THROWS_AS(supertile_problem(penrose_system(), 5, 1), ValidationError);
    CHECK_THROWS_AS(supertile_problem(penrose_system(), 0, 0), ValidationError);
}
