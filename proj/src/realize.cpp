#include "startile/realize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "startile/parallel.hpp"

namespace startile {

std::vector<double> node_masses(const SupertileTree& tree, const SubstitutionSystem& sys, const TileDensity& f) {
    const auto& nodes = tree.nodes();
    std::vector<double> mass(nodes.size(), 0.0);
    for (std::size_t i = nodes.size(); i-- > 0;) {
        const auto& n = nodes[i];
        if (n.level == 0) {
            mass[i] = f.is_f_tau() ? 1.0 : f.value(sys, {n.type, n.placement, n.address}, n.shape) * n.shape.area();
        }
        if (n.parent >= 0) mass[static_cast<std::size_t>(n.parent)] += mass[i];
    }
    return mass;
}

LevelDensity level_density(const SupertileTree& tree, const std::vector<double>& masses, int m) {
    if (m < 0 || m > tree.level()) throw ValidationError("level_density: level outside the working supertile");
    LevelDensity d;
    d.level = m;
    d.nodes = tree.at_level(m);
    for (std::size_t k = 0; k < d.nodes.size(); ++k) {
        const int n = d.nodes[k];
        d.values.push_back(masses[static_cast<std::size_t>(n)] / tree.node(n).shape.area());
        d.index_[n] = k;
    }
    return d;
}

LevelDensity level_density(const SupertileTree& tree, const SubstitutionSystem& sys, const TileDensity& f, int m) {
    return level_density(tree, node_masses(tree, sys, f), m);
}

double LevelDensity::value_of_node(int node) const {
    const auto it = index_.find(node);
    return it == index_.end() ? 0.0 : values[it->second];
}

double LevelDensity::at(const SupertileTree& tree, Point2 x) const { return value_of_node(tree.locate(x, level)); }

LevelLayer::LevelLayer(std::shared_ptr<const SupertileTree> tree, int level, std::vector<Similarity> frames,
                       std::vector<int> corrector_of, std::vector<std::shared_ptr<const TileCorrector>> correctors)
    : tree_(std::move(tree)), level_(level), frames_(std::move(frames)), corrector_of_(std::move(corrector_of)),
      correctors_(std::move(correctors)) {
    const auto& nodes = tree_->at_level(level_);
    for (std::size_t k = 0; k < nodes.size(); ++k) slot_[nodes[k]] = k;
    for (const auto& f : frames_) inverses_.push_back(f.inverse());
}

Point2 LevelLayer::apply(Point2 x) const {
    const int node = tree_->locate(x, level_);
    if (node < 0) return x;
    const std::size_t k = slot_.at(node);
    const auto& corr = *correctors_[static_cast<std::size_t>(corrector_of_[k])];
    if (corr.report.identity) return x;
    return frames_[k](corr.map(inverses_[k](x)));
}

std::vector<Polygon> LevelLayer::fixed_boundaries() const {
    std::vector<Polygon> out;
    for (int n : tree_->at_level(level_)) out.push_back(tree_->node(n).shape.vertices());
    return out;
}

namespace {

std::string address_string(const SupertileAddress& a) {
    std::ostringstream s;
    s << a.root_type << ":" << a.level << "/";
    for (std::size_t k = 0; k < a.path.size(); ++k) s << (k ? "." : "") << a.path[k];
    return s.str();
}

}  // namespace

Realization build_phi_m(const SubstitutionSystem& sys, int root_type, int levels, const TileDensity& f,
                        const RealizeOptions& options) {
    if (levels < 0 || levels > options.working_level)
        throw ValidationError("build_phi_m: levels must lie between 0 and the working level");
    Realization real;
    real.tree = std::make_shared<SupertileTree>(sys, root_type, options.working_level, options.max_tiles);
    real.masses = node_masses(*real.tree, sys, f);
    real.levels = levels;
    const auto& tree = *real.tree;

    for (int k = 1; k <= levels; ++k) {
        const auto& nodes = tree.at_level(k);
        std::map<std::string, int> key_index;
        std::vector<int> representative;
        std::vector<int> corrector_of;
        std::vector<Similarity> frames;
        for (int n : nodes) {
            const auto& node = tree.node(n);
            std::ostringstream key;
            key << node.type;
            double first = 0.0;
            for (int c : node.children) {
                const double v = real.masses[static_cast<std::size_t>(c)] / tree.node(c).shape.area();
                if (first == 0.0) first = v;
                char buf[32];
                std::snprintf(buf, sizeof buf, "|%.9e", v / first);
                key << buf;
            }
            auto [it, fresh] = key_index.emplace(key.str(), static_cast<int>(representative.size()));
            if (fresh) representative.push_back(n);
            corrector_of.push_back(it->second);
            frames.push_back(node.placement.compose(Similarity::scaling(1.0 / sys.xi)));
        }

        std::vector<std::shared_ptr<const TileCorrector>> correctors(representative.size());
        std::vector<std::string> errors(representative.size());
        parallel_for(representative.size(), [&](std::size_t r) {
            const auto& node = tree.node(representative[r]);
            const StarPolygon whole = transform(sys.prototile(node.type).shape, Similarity::scaling(sys.xi));
            const auto& rule = sys.rules.at(static_cast<std::size_t>(node.type));
            std::vector<StarPolygon> parts;
            std::vector<double> values;
            for (std::size_t c = 0; c < rule.size(); ++c) {
                parts.push_back(transform(sys.prototile(rule[c].type).shape, rule[c].placement));
                const int child = node.children[c];
                values.push_back(real.masses[static_cast<std::size_t>(child)] / tree.node(child).shape.area());
            }
            try {
                correctors[r] = std::make_shared<TileCorrector>(tile_corrector(whole, parts, values, options.corrector));
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        });
        for (std::size_t r = 0; r < errors.size(); ++r)
            if (!errors[r].empty())
                throw NumericError("build_phi_m: corrector for supertile " +
                                   address_string(tree.node(representative[r]).address) + " failed: " + errors[r]);

        LevelBuild build;
        build.level = k;
        build.supertiles = static_cast<int>(nodes.size());
        build.distinct_correctors = static_cast<int>(correctors.size());
        for (const auto& c : correctors) build.reports.push_back(c->report);
        real.builds.push_back(std::move(build));
        real.map.then(std::make_shared<LevelLayer>(real.tree, k, std::move(frames), std::move(corrector_of), std::move(correctors)));
    }
    return real;
}

Realization Realization::prefix(int k) const {
    if (k < 0 || k > levels) throw ValidationError("Realization::prefix: level out of range");
    Realization out;
    out.tree = tree;
    out.masses = masses;
    out.levels = k;
    for (int i = 0; i < k; ++i) out.map.then(map.layers()[static_cast<std::size_t>(i)]);
    out.builds.assign(builds.begin(), builds.begin() + k);
    return out;
}

SupertileProblem supertile_problem(const SubstitutionSystem& sys, int type, int level, const TileDensity& f) {
    if (type < 0 || type >= static_cast<int>(sys.size())) throw ValidationError("supertile: unknown prototile");
    if (level < 1) throw ValidationError("supertile: level must be at least 1");
    const std::vector<double> per_type = f.type_values(sys);
    SupertileProblem p;
    p.whole = transform(sys.prototile(type).shape, Similarity::scaling(sys.xi));
    const double child_scale2 = std::pow(sys.xi, 2 * (level - 1));
    for (const auto& rule : sys.rules.at(static_cast<std::size_t>(type))) {
        p.parts.push_back(transform(sys.prototile(rule.type).shape, rule.placement));
        const auto counts = count_tiles(sys, rule.type, level - 1);
        double mass = 0.0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            mass += counts[i].convert_to<double>() * (f.is_f_tau() ? 1.0 : per_type[i] * sys.prototiles[i].shape.area());
        p.values.push_back(mass / (child_scale2 * sys.prototile(rule.type).shape.area()));
    }
    return p;
}

JacobianSummary verify_corrector(const TileCorrector& corrector, const SupertileProblem& problem, int samples,
                                 std::uint64_t seed, double margin) {
    const auto& whole = problem.whole;
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& v : whole.vertices()) {
        x0 = std::min(x0, v.x);
        y0 = std::min(y0, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::vector<Point2> pts;
    std::vector<double> target;
    long excluded = 0;
    for (long tries = 0; static_cast<int>(pts.size()) < samples && tries < 100L * samples + 1000; ++tries) {
        const Point2 p{ux(rng), uy(rng)};
        if (!point_strictly_inside(whole.vertices(), p)) continue;
        int part = -1;
        for (std::size_t i = 0; i < problem.parts.size() && part < 0; ++i)
            if (problem.parts[i].contains(p, 0.0)) part = static_cast<int>(i);
        if (part < 0) continue;
        const auto& shape = problem.parts[static_cast<std::size_t>(part)];
        if (boundary_distance(shape.vertices(), p) < margin * shape.inradius()) {
            ++excluded;
            continue;
        }
        pts.push_back(p);
        target.push_back(corrector.report.normalization * problem.values[static_cast<std::size_t>(part)]);
    }
    std::vector<double> res(pts.size());
    const double h = 1e-5 * whole.diameter();
    parallel_for(pts.size(), [&](std::size_t i) {
        res[i] = std::abs(numerical_jacobian(corrector.map, pts[i], h) / target[i] - 1.0);
    });
    const ResidualSummary s = summarize(std::move(res));
    const double total = static_cast<double>(pts.size()) + static_cast<double>(excluded);
    return {s.samples, s.median, s.p90, s.max, total > 0 ? excluded / total : 0.0};
}

SamplePoints sample_tiles(const SupertileTree& tree, int count, std::uint64_t seed, double margin) {
    const StarPolygon& root = tree.node(0).shape;
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& v : root.vertices()) {
        x0 = std::min(x0, v.x);
        y0 = std::min(y0, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    SamplePoints out;
    long excluded = 0;
    for (long tries = 0; static_cast<int>(out.points.size()) < count && tries < 100L * count + 1000; ++tries) {
        const Point2 p{ux(rng), uy(rng)};
        if (!point_strictly_inside(root.vertices(), p)) continue;
        const int leaf = tree.locate(p, 0);
        if (leaf < 0) continue;
        const StarPolygon& shape = tree.node(leaf).shape;
        if (!shape.contains(p, 0.0) || boundary_distance(shape.vertices(), p) < margin * shape.inradius()) {
            ++excluded;
            continue;
        }
        out.points.push_back(p);
        out.tiles.push_back(leaf);
    }
    const double total = static_cast<double>(out.points.size() + static_cast<std::size_t>(excluded));
    out.excluded_fraction = total > 0 ? static_cast<double>(excluded) / total : 0.0;
    return out;
}

JacobianSummary verify_jacobian(const PlaneMap& map, const std::function<double(Point2)>& target,
                                const std::vector<Point2>& points, double h) {
    std::vector<double> res(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        res[i] = std::abs(numerical_jacobian(map, points[i], h) / target(points[i]) - 1.0);
    });
    const ResidualSummary s = summarize(std::move(res));
    return {s.samples, s.median, s.p90, s.max, 0.0};
}

JacobianSummary verify_realization(const Realization& real, const SubstitutionSystem& sys, const TileDensity& f,
                                   int samples, std::uint64_t seed) {
    const auto& tree = *real.tree;
    const SamplePoints pts = sample_tiles(tree, samples, seed);
    const LevelDensity fm = real.density(real.levels);
    double diam = 0.0;
    for (const auto& p : sys.prototiles) diam = std::max(diam, p.shape.diameter());
    auto f_at = [&](Point2 x) {
        const int leaf = tree.locate(x, 0);
        const auto& n = tree.node(leaf);
        return f.is_f_tau() ? 1.0 / n.shape.area() : f.value(sys, {n.type, n.placement, n.address}, n.shape);
    };
    JacobianSummary s = verify_jacobian(
        real.map, [&](Point2 x) { return f_at(x) / fm.at(tree, real.map(x)); }, pts.points, 1e-5 * diam);
    s.excluded_fraction = pts.excluded_fraction;
    return s;
}

double bilip_estimate(const PlaneMap& map, const Polygon& region, int pairs, std::uint64_t seed, double min_separation) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& v : region) {
        x0 = std::min(x0, v.x);
        y0 = std::min(y0, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    const double diam = diameter(region);
    const double lo = std::log(std::max(min_separation, 1e-12)), hi = std::log(std::max(diam, 2 * min_separation));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1), ud(lo, hi);
    double worst = 1.0;
    for (int i = 0; i < pairs; ++i) {
        // Directions are evenly spread so the extreme stretch directions are hit.
        const double angle = kPi * i / std::max(pairs, 1);
        const Point2 dir{std::cos(angle), std::sin(angle)};
        for (int tries = 0; tries < 200; ++tries) {
            const Point2 x{ux(rng), uy(rng)};
            const Point2 y = x + std::exp(ud(rng)) * dir;
            if (!point_in_polygon(region, x, 0.0) || !point_in_polygon(region, y, 0.0)) continue;
            const double ratio = distance(map(x), map(y)) / distance(x, y);
            worst = std::max({worst, ratio, 1.0 / ratio});
            break;
        }
    }
    return worst;
}

ConvergenceStats convergence_report(const SubstitutionSystem& sys, int max_level, const TileDensity& f) {
    const ProductReport pr = product_report(sys, max_level, f);
    ConvergenceStats s;
    for (const auto& r : pr.rows) s.rows.push_back({r.level, r.E, r.excess, r.partial_product, std::nullopt, std::nullopt});
    s.fitted_epsilon = pr.fitted_ratio;
    s.eigen_ratio = pr.eigen_ratio;
    s.rho = pf_stats(sys).rho;
    return s;
}

}  // namespace startile
