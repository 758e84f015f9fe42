// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "startile/corrections.hpp"
#include "startile/nets.hpp"
#include "startile/output.hpp"
#include "startile/realize.hpp"
#include "startile/starmap.hpp"
#include "startile/substitution.hpp"
#include "startile/systems.hpp"

using namespace startile;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double t = seconds_since(t0);
    o.require(t < budget_s, "runtime " + fmt(t) + " s over " + fmt(budget_s) + " s");
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " |" << o.detail.str() << " time="
              << fmt(t) << "s" << std::endl;
}

std::vector<Point2> disk_points(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Point2> out;
    for (int k = 0; k < count; ++k) {
        const double r = std::sqrt(u(rng)), t = kTwoPi * u(rng);
        out.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return out;
}

void criterion1(Outcome& o) {
    long checks = 0;
    for (const auto& name : builtin_names()) {
        const auto sys = builtin_system(name);
        oracle::Matrix m;
        for (const auto& row : substitution_matrix(sys)) m.emplace_back(row.begin(), row.end());
        for (int root = 0; root < static_cast<int>(sys.size()); ++root)
            for (int level = 0; level <= 5; ++level) {
                const Patch patch = inflate_patch(sys, root, level);
                std::vector<long long> enumerated(sys.size(), 0);
                for (const auto& t : patch.tiles) ++enumerated[static_cast<std::size_t>(t.type)];
                const auto mp = oracle::power(m, level);
                const auto counts = count_tiles(sys, root, level);
                for (std::size_t i = 0; i < sys.size(); ++i) {
                    o.require(enumerated[i] == mp[i][static_cast<std::size_t>(root)],
                              name + " enumeration vs matrix power at level " + std::to_string(level));
                    o.require(counts[i] == mp[i][static_cast<std::size_t>(root)], name + " census at level " + std::to_string(level));
                    ++checks;
                }
            }
    }
    o.detail << " exact per-type equalities=" << checks;
}

void criterion2(Outcome& o) {
    const auto pen = penrose_system();
    const auto stats = pf_stats(pen);
    const double ratio = stats.lambda2_abs / stats.lambda;
    const double phi = (1 + std::sqrt(5.0)) / 2;
    o.require(std::abs(ratio - std::pow(phi, -4)) < 1e-12, "eigen ratio");
    o.require(std::abs(ratio - 0.145898) < 5e-7, "eigen ratio vs 0.145898");
    const auto rep = decay_report(pen, 0, 6, 20);
    double lo = 1e300, hi = 0;
    for (const auto& row : rep.rows) lo = std::min(lo, row.normalized), hi = std::max(hi, row.normalized);
    o.require((hi - lo) / hi < 0.1, "normalized deviation varies by " + fmt((hi - lo) / hi));
    o.detail << " lambda2/lambda=" << fmt(ratio) << " normalized deviation in [" << fmt(lo) << ", " << fmt(hi)
             << "] spread=" << fmt((hi - lo) / hi);
    for (const std::string name : {"chair", "squares"}) {
        const auto sys = builtin_system(name);
        for (int m = 0; m <= 8; ++m) o.require(e_value(sys, 0, m).e == 1.0, name + " e(T) at level " + std::to_string(m));
        o.require(product_report(sys, 8).product == 1.0, name + " product");
    }
    o.detail << " chair/squares e(T)=1 for m<=8, product=1";
}

void criterion3(Outcome& o) {
    double worst_median = 0, worst_sector = 0, worst_trip = 0, worst_excluded = 0;
    int domains = 0;
    for (const auto& name : builtin_names()) {
        for (const auto& proto : builtin_system(name).prototiles) {
            ++domains;
            const StarPolygon& t = proto.shape;
            const ElevationMap h(t);
            std::vector<double> breaks;
            for (std::size_t k = 0; k < t.size(); ++k) breaks.push_back(h.theta_of_eta(t.angle_breaks()[k]));
            breaks.push_back(kTwoPi);
            const double tube = 1e-3, step = 1e-6;
            std::vector<double> res;
            int excluded = 0;
            const auto pts = disk_points(10000, 42 + domains);
            for (const auto& x : pts) {
                const double r = norm(x);
                double th = std::atan2(x.y, x.x);
                if (th < 0) th += kTwoPi;
                bool skip = r < tube || r > 1 - tube;
                for (double b : breaks) skip |= r * std::abs(th - b) < tube;
                if (skip) {
                    ++excluded;
                    continue;
                }
                const double j = oracle::jacobian([&](Point2 p) { return h.forward(p); }, x, step);
                res.push_back(std::abs(j / h.jacobian() - 1));
            }
            worst_median = std::max(worst_median, oracle::median(res));
            worst_excluded = std::max(worst_excluded, static_cast<double>(excluded) / pts.size());

            std::mt19937_64 rng(7 + domains);
            std::uniform_real_distribution<double> u(0, kTwoPi);
            for (int k = 0; k < 100; ++k) {
                const double th = u(rng);
                const double eta = h.eta_of_theta(th);
                Polygon fan{t.center(), t.boundary_point(0.0)};
                for (std::size_t v = 1; v < t.size() && t.angle_breaks()[v] < eta; ++v) fan.push_back(t.vertex(v));
                fan.push_back(h.forward({std::cos(th), std::sin(th)}));
                worst_sector = std::max(worst_sector, std::abs(oracle::shoelace(fan) - 0.5 * th * t.area() / kPi));
            }
            for (const auto& x : pts) worst_trip = std::max(worst_trip, distance(h.inverse(h.forward(x)), x));
        }
    }
    o.require(worst_median <= 1e-3, "Jacobian median");
    o.require(worst_excluded < 0.01, "excluded fraction");
    o.require(worst_sector <= 1e-10, "sector area");
    o.require(worst_trip <= 1e-9, "round trip");
    o.detail << " prototiles=" << domains << " worst median |Jac/(|T|/pi)-1|=" << fmt(worst_median)
             << " worst excluded=" << fmt(worst_excluded) << " sector residual=" << fmt(worst_sector)
             << " round trip=" << fmt(worst_trip);
}

void criterion4(Outcome& o) {
    const StarPolygon sq({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}, {0, 0});
    const Profile h1 = Profile::step(2.0, 2.0 / 3.0, 0.5);
    const double g = square_g(h1, 0.5);
    const RadialEqualizer eq(sq, h1, Profile::constant(1.0));
    const double image = eq.apply({0.5, 0.0}).x;
    o.require(std::abs(g - 0.5 * std::sqrt(2.0)) <= 1e-9, "g(1/2)");
    o.require(std::abs(image - 0.5 * std::sqrt(2.0)) <= 1e-9, "image half-side");
    const PlaneMap map(std::make_shared<RadialEqualizer>(eq));
    std::vector<double> res;
    for (const auto& x : oracle::uniform_in(sq.vertices(), 10000, 4)) {
        const double s = std::max(std::abs(x.x), std::abs(x.y));
        if (std::abs(s - 0.5) < 1e-3 || s > 1 - 1e-3 || s < 1e-3 || std::abs(std::abs(x.x) - std::abs(x.y)) < 1e-3) continue;
        res.push_back(std::abs(numerical_jacobian(map, x, 1e-6) / h1(s) - 1));
    }
    const double med = oracle::median(res);
    o.require(med <= 1e-3, "Jacobian median");
    o.detail << " g(1/2)=" << fmt(g) << " image half-side=" << fmt(image) << " median |Jac/h1-1|=" << fmt(med)
             << " samples=" << res.size();
}

void criterion5(Outcome& o) {
    const StarPolygon sq({{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}, {0, 0});
    const StarAnnulus annulus{sq, 0.4};
    auto h = std::make_shared<ElevationMap>(sq);
    auto bump = [h](double at) {
        return [h, at](Point2 x) {
            const Polar p = h->inverse_polar(x);
            if (p.r <= 0.4) return 1.0;
            const double radial = std::pow(std::sin(kPi * (p.r - 0.4) / 0.6), 2);
            return 1.0 + 2.0 * radial * std::exp(2.0 * (std::cos(p.theta - at) - 1));
        };
    };
    const auto g1 = bump(0.0), g2 = bump(kPi);
    FlowOptions opts;
    opts.grid = 256;
    const auto flow = std::make_shared<AnnulusFlow>(annulus, g1, g2, opts);
    const PlaneMap map(flow);
    std::vector<double> res;
    for (const auto& x : oracle::uniform_in(sq.vertices(), 10000, 5)) {
        if (!annulus.contains(x)) continue;
        res.push_back(std::abs(numerical_jacobian(map, x, 1e-5) * g2(map(x)) / g1(x) - 1));
    }
    double disp = 0;
    for (const auto& poly : flow->fixed_boundaries())
        for (const auto& b : sample_boundary(poly, 1000)) disp = std::max(disp, distance(map(b), b));
    const double med = oracle::median(res);
    o.require(med <= 1e-2, "Jacobian ratio median");
    o.require(disp <= 2 * flow->grid_scale(), "boundary displacement");
    o.detail << " grid=256^2 median residual=" << fmt(med) << " boundary displacement=" << fmt(disp)
             << " grid scale=" << fmt(flow->grid_scale()) << " samples=" << res.size();
}

void criterion6(Outcome& o) {
    const auto p = supertile_problem(penrose_system(), penrose::acute, 1);
    const TileCorrector psi = tile_corrector(p.whole, p.parts, p.values);
    const JacobianSummary s = verify_corrector(psi, p, 10000, 42);
    double exact_disp = 0;
    for (std::size_t layer : {std::size_t{0}, std::size_t{2}}) {
        const PlaneMap one(psi.map.layers()[layer]);
        for (const auto& b : sample_boundary(p.whole.vertices(), 1000)) exact_disp = std::max(exact_disp, distance(one(b), b));
    }
    double disp = 0;
    for (const auto& b : sample_boundary(p.whole.vertices(), 1000)) disp = std::max(disp, distance(psi.map(b), b));
    const double grid = psi.report.flow.grid_scale;
    o.require(s.median <= 2e-2, "median residual");
    o.require(exact_disp <= 1e-6, "exact layers move the boundary");
    o.require(disp <= 2 * grid, "boundary displacement");
    o.detail << " samples=" << s.samples << " median=" << fmt(s.median) << " p90=" << fmt(s.p90)
             << " exact-layer displacement=" << fmt(exact_disp) << " overall displacement=" << fmt(disp)
             << " (2*grid scale=" << fmt(2 * grid) << ")";
}

void criterion7(Outcome& o) {
    const auto pen = penrose_system();
    const auto t0 = Clock::now();
    const Realization real = build_phi_m(pen, 0, 3);
    const double build = seconds_since(t0);
    const JacobianSummary s = verify_realization(real, pen, TileDensity::f_tau(), 10000, 42);
    o.require(s.median <= 5e-2, "Penrose phi_3 median");
    o.require(s.excluded_fraction < 0.01, "excluded fraction");
    o.detail << " penrose working level 6: median=" << fmt(s.median) << " p90=" << fmt(s.p90) << " samples=" << s.samples
             << " excluded=" << fmt(s.excluded_fraction) << " build=" << fmt(build) << "s";

    const auto chair = chair_system();
    double worst = 0;
    for (int m = 1; m <= 3; ++m) {
        const Realization c = build_phi_m(chair, 0, m);
        for (const auto& x : oracle::uniform_in(c.tree->node(0).shape.vertices(), 2000, 10 + m))
            worst = std::max(worst, distance(c.map(x), x));
    }
    o.require(worst <= 1e-6, "chair identity");
    o.detail << " chair max displacement m<=3=" << fmt(worst);
}

void criterion8(Outcome& o) {
    const Polygon region{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    std::vector<Point2> pts;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) pts.push_back({i + 0.5, j + 0.5});
    const SeparatedNet net = make_net(pts, region);
    const TauY tau = build_tau_Y(net, region, {0.25, SquareDistance::corners_and_center});
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    int blocks = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        bool block = tau.tiles[p].size() == 16;
        for (auto k : tau.tiles[p]) {
            const auto& s = tau.squares[k];
            const Point2 ll = tau.origin + tau.side * Point2{double(s.i), double(s.j)};
            block &= ll.x >= pts[p].x - 0.5 - 1e-12 && ll.x + tau.side <= pts[p].x + 0.5 + 1e-12;
            block &= ll.y >= pts[p].y - 0.5 - 1e-12 && ll.y + tau.side <= pts[p].y + 0.5 + 1e-12;
            o.require(seen.insert({s.i, s.j}).second, "square assigned twice");
            // Brute-force ownership: no other point strictly closer, ties to the lowest index.
            double mine = 1e300;
            int owner = -1;
            for (std::size_t q = 0; q < pts.size(); ++q) {
                double d = distance(pts[q], ll + Point2{tau.side / 2, tau.side / 2});
                for (double a : {0.0, tau.side})
                    for (double b : {0.0, tau.side}) d = std::min(d, distance(pts[q], ll + Point2{a, b}));
                if (d < mine) mine = d, owner = static_cast<int>(q);
            }
            o.require(owner == static_cast<int>(p), "ownership");
        }
        blocks += block;
    }
    o.require(blocks == 100, "16-square blocks");
    o.require(seen.size() == 1600 && tau.squares.size() == 1600, "partition covers the region");
    o.require(distinct_tile_shapes(tau) == 1, "one shape up to translation");
    o.detail << " blocks=" << blocks << "/100 squares=" << tau.squares.size() << " shapes=" << distinct_tile_shapes(tau);
}

std::string stats_csv() {
    const auto st = convergence_report(penrose_system(), 12);
    std::ostringstream out;
    CsvWriter csv(out, {"level", "E", "excess", "product", "fitted_epsilon", "eigen_ratio", "rho"});
    for (const auto& r : st.rows)
        csv.cell(r.level).cell(r.E).cell(r.excess).cell(r.product).cell(*st.fitted_epsilon).cell(st.eigen_ratio).cell(st.rho).end_row();
    return out.str();
}

std::string realize_csv() {
    const auto pen = penrose_system();
    RealizeOptions opts;
    opts.working_level = 4;
    const Realization real = build_phi_m(pen, 0, 2, TileDensity::f_tau(), opts);
    std::ostringstream out;
    CsvWriter csv(out, {"level", "residual_median", "residual_p90", "bilip_lower"});
    for (int m = 1; m <= 2; ++m) {
        const auto phi = real.prefix(m);
        const auto s = verify_realization(phi, pen, TileDensity::f_tau(), 2000, 42);
        csv.cell(m).cell(s.median).cell(s.p90).cell(bilip_estimate(phi.map, real.tree->node(0).shape.vertices(), 500, 42)).end_row();
    }
    return out.str();
}

void criterion9(Outcome& o) {
    const std::string a = stats_csv(), b = stats_csv();
    const std::string c = realize_csv(), d = realize_csv();
    o.require(a == b, "stats CSV differs between runs");
    o.require(c == d, "realize CSV differs between runs");
    o.detail << " stats bytes=" << a.size() << " realize bytes=" << c.size();
}

}  // namespace

int main() {
    run(1, "census exactness (chair, squares, Penrose; m<=5)", 10, criterion1);
    run(2, "tile-count decay and e(T)=1 for chair/squares", 5, criterion2);
    run(3, "elevation map contract on every prototile", 30, criterion3);
    run(4, "radial equalizer two-level square example", 1e9, criterion4);
    run(5, "annulus flow contract at 256^2", 60, criterion5);
    run(6, "Penrose acute level-1 corrector", 1e9, criterion6);
    run(7, "phi_3 on a Penrose level-6 working supertile; chair identity", 600, criterion7);
    run(8, "tau_Y lattice blocks", 5, criterion8);
    run(9, "deterministic CSV reports", 1e9, criterion9);
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << 9 - failures << "/9" << std::endl;
    return failures ? 1 : 0;
}
