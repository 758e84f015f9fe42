#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "startile/corrections.hpp"
#include "startile/errors.hpp"
#include "startile/nets.hpp"
#include "startile/output.hpp"
#include "startile/realize.hpp"
#include "startile/rulefile.hpp"
#include "startile/starmap.hpp"
#include "startile/substitution.hpp"

using namespace startile;
using nlohmann::json;

namespace {

// Opens `path` for writing, or returns std::cout for "" and "-".
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ValidationError("cannot write " + path);
        }
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::pair<int, int> parse_supertile(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument(s);
        return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
    } catch (const std::logic_error&) {
        throw ValidationError("--supertile expects type:level, got '" + s + "'");
    }
}

void draw_tiles(SvgCanvas& svg, const SupertileTree& tree, double stroke = 0.5) {
    for (int n : tree.at_level(0)) {
        const auto& node = tree.node(n);
        svg.polygon(node.shape.vertices(), {type_color(node.type), "#333", stroke, 1.0});
    }
}

void write_svg(const SvgCanvas& svg, const std::string& path) {
    Sink sink(path);
    svg.write(sink.get());
}

// Polar grid of `domain` pushed through H and then `map`.
void draw_elevation_grid(SvgCanvas& svg, const StarPolygon& domain, const PlaneMap& map, int grid, const SvgStyle& style) {
    const ElevationMap h(domain);
    const int rings = std::max(2, grid / 8);
    const int spokes = std::max(4, grid);
    for (int i = 1; i <= rings; ++i) {
        std::vector<Point2> line;
        for (int k = 0; k <= grid; ++k) line.push_back(map.apply(h.forward_polar(double(i) / rings, kTwoPi * k / grid)));
        svg.polyline(line, style);
    }
    for (int k = 0; k < spokes; ++k) {
        std::vector<Point2> line;
        for (int i = 0; i <= grid; ++i) line.push_back(map.apply(h.forward_polar(double(i) / grid, kTwoPi * k / spokes)));
        svg.polyline(line, style);
    }
}

int cmd_gen(const std::string& system, int level, int root, const std::string& out, std::uint64_t cap) {
    const auto sys = resolve_system(system);
    const Patch patch = inflate_patch(sys, root, level, cap);
    Sink sink(out);
    sink.get() << patch_to_json(sys, patch).dump(1) << '\n';
    std::cerr << "tiles: " << patch.tiles.size() << '\n';
    return 0;
}

int cmd_render(const std::string& in, const std::string& out, int deform) {
    const Patch patch = load_patch(in);
    const json j = read_json(in);
    SvgCanvas svg;
    for (const auto& t : j.at("tiles"))
        svg.polygon(polygon_from_json(t.at("vertices")), {type_color(t.at("type").get<int>()), "#333", 0.5, 1.0});
    if (deform > 0) {
        const auto sys = system_from_json(j.at("rules"));
        RealizeOptions opts;
        opts.working_level = patch.level;
        const Realization real = build_phi_m(sys, patch.root_type, deform, TileDensity::f_tau(), opts);
        for (const auto& t : j.at("tiles")) {
            auto line = sample_boundary(polygon_from_json(t.at("vertices")), 64);
            for (auto& p : line) p = real.map.apply(p);
            line.push_back(line.front());
            svg.polyline(line, {"none", "#1b3a6b", 0.6, 0.9});
        }
    }
    write_svg(svg, out);
    return 0;
}

int cmd_stats(const std::string& system, int levels, const std::string& out) {
    const auto sys = resolve_system(system);
    const ConvergenceStats stats = convergence_report(sys, levels);
    Sink sink(out);
    CsvWriter csv(sink.get(), {"level", "E", "excess", "product", "fitted_epsilon", "eigen_ratio", "rho"});
    for (const auto& r : stats.rows) {
        csv.cell(r.level).cell(r.E).cell(r.excess).cell(r.product);
        csv.cell(stats.fitted_epsilon ? fmt(*stats.fitted_epsilon) : std::string());
        csv.cell(stats.eigen_ratio).cell(stats.rho);
        csv.end_row();
    }
    return 0;
}

int cmd_correct(const std::string& system, const std::string& supertile, const std::string& report, const std::string& svg_path,
                int samples, std::uint64_t seed, int grid) {
    const auto sys = resolve_system(system);
    const auto [type, level] = parse_supertile(supertile);
    const SupertileProblem problem = supertile_problem(sys, type, level);
    CorrectorOptions opts;
    opts.seed = seed;
    const TileCorrector psi = tile_corrector(problem.whole, problem.parts, problem.values, opts);
    const JacobianSummary sampled = verify_corrector(psi, problem, samples, seed);

    Sink sink(report);
    CsvWriter csv(sink.get(), {"stage", "identity", "samples", "median", "p90", "max", "boundary_displacement"});
    for (const auto& s : psi.report.stages) {
        csv.cell(s.stage).cell(s.identity ? 1 : 0).cell(s.samples).cell(s.median).cell(s.p90).cell(std::string());
        csv.cell(s.boundary_displacement).end_row();
    }
    csv.cell("sampled").cell(psi.report.identity ? 1 : 0).cell(sampled.samples).cell(sampled.median).cell(sampled.p90);
    csv.cell(sampled.max).cell(std::string()).end_row();

    if (!svg_path.empty()) {
        SvgCanvas svg;
        for (std::size_t k = 0; k < problem.parts.size(); ++k) svg.polygon(problem.parts[k].vertices(), {"#eeeeee", "#999", 0.5, 1.0});
        draw_elevation_grid(svg, problem.whole, psi.map, grid, {"none", "#1b3a6b", 0.6, 1.0});
        svg.polygon(problem.whole.vertices(), {"none", "#000", 1.2, 1.0});
        write_svg(svg, svg_path);
    }
    return 0;
}

int cmd_realize(const std::string& system, int root, int levels, int working, int samples, std::uint64_t seed, int pairs,
                const std::string& report, const std::string& svg_path) {
    const auto sys = resolve_system(system);
    RealizeOptions opts;
    opts.working_level = working;
    opts.corrector.seed = seed;
    const Realization real = build_phi_m(sys, root, levels, TileDensity::f_tau(), opts);
    const ProductReport products = product_report(sys, std::max(levels, 1));
    const Polygon region = real.tree->node(0).shape.vertices();

    Sink sink(report);
    CsvWriter csv(sink.get(), {"level", "E", "product", "residual_median", "residual_p90", "bilip_lower"});
    for (int m = 1; m <= levels; ++m) {
        const Realization phi = real.prefix(m);
        const JacobianSummary res = verify_realization(phi, sys, TileDensity::f_tau(), samples, seed);
        const double bilip = bilip_estimate(phi.map, region, pairs, seed);
        const auto& row = products.rows.at(static_cast<std::size_t>(m - 1));
        csv.cell(m).cell(row.E).cell(row.partial_product).cell(res.median).cell(res.p90).cell(bilip).end_row();
    }

    if (!svg_path.empty()) {
        SvgCanvas svg;
        draw_tiles(svg, *real.tree, 0.3);
        for (int n : real.tree->at_level(0)) {
            auto line = sample_boundary(real.tree->node(n).shape.vertices(), 32);
            for (auto& p : line) p = real.map.apply(p);
            line.push_back(line.front());
            svg.polyline(line, {"none", "#1b3a6b", 0.5, 0.9});
        }
        write_svg(svg, svg_path);
    }
    return 0;
}

int cmd_net(const std::string& in, const std::string& out) {
    const Patch patch = load_patch(in);
    const auto sys = system_from_json(read_json(in).at("rules"));
    const SeparatedNet net = extract_net(sys, patch);
    json j;
    j["points"] = polygon_to_json(net.points);
    j["region"] = polygon_to_json(net.region);
    j["r_sep"] = net.r_sep;
    j["R_cov"] = net.R_cov;
    Sink sink(out);
    sink.get() << j.dump(1) << '\n';
    std::cerr << "points: " << net.points.size() << " r_sep: " << fmt(net.r_sep) << " R_cov: " << fmt(net.R_cov) << '\n';
    return 0;
}

int cmd_tauy(const std::string& in, const std::string& side, bool exact, const std::string& svg_path, const std::string& out) {
    const json j = read_json(in);
    if (!j.contains("points") || !j.contains("region")) throw ValidationError("net file needs points and region");
    const SeparatedNet net = make_net(polygon_from_json(j.at("points")), polygon_from_json(j.at("region")), 0);
    TauYOptions opts;
    if (side != "auto") {
        try {
            opts.side = std::stod(side);
        } catch (const std::logic_error&) {
            throw ValidationError("--side expects auto or a positive number");
        }
        if (!(opts.side > 0)) throw ValidationError("--side expects auto or a positive number");
    }
    opts.distance = exact ? SquareDistance::exact : SquareDistance::corners_and_center;
    const TauY tau = build_tau_Y(net, net.region, opts);

    Sink sink(out);
    CsvWriter csv(sink.get(), {"point", "x", "y", "squares", "shape"});
    for (std::size_t p = 0; p < net.points.size(); ++p)
        csv.cell(static_cast<long long>(p)).cell(net.points[p].x).cell(net.points[p].y)
            .cell(static_cast<long long>(tau.tiles[p].size())).cell(tile_shape_key(tau, p)).end_row();
    std::cerr << "side: " << fmt(tau.side) << " squares: " << tau.squares.size() << " shapes: " << distinct_tile_shapes(tau) << '\n';

    if (!svg_path.empty()) {
        SvgCanvas svg;
        for (const auto& s : tau.squares) svg.polygon(tau.square_polygon(s), {type_color(s.owner), "none", 0.0, 1.0});
        for (const auto& p : net.points) svg.circle(p, 2.0, {"#000", "none", 0.0, 1.0});
        write_svg(svg, svg_path);
    }
    return 0;
}

int cmd_starmap(const std::string& domain_file, const std::string& system, int prototile, int grid, const std::string& out) {
    StarPolygon domain;
    if (!domain_file.empty()) {
        domain = star_polygon_from_json(read_json(domain_file));
    } else {
        if (system.empty()) throw ValidationError("starmap needs --domain or --system");
        domain = resolve_system(system).prototile(prototile).shape;
    }
    SvgCanvas svg;
    svg.polygon(domain.vertices(), {"#f4f1de", "#000", 1.2, 1.0});
    draw_elevation_grid(svg, domain, PlaneMap(), grid, {"none", "#3d405b", 0.5, 1.0});
    write_svg(svg, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Star-shaped substitution tilings and prescribed-Jacobian maps"};
    app.require_subcommand(1);
    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();

    std::string system, in, out, report, svg, supertile = "0:1", side = "auto", domain;
    int level = 3, root = 0, levels = 12, working = 6, samples = 10000, grid = 64, pairs = 2000, prototile = 0, deform = 0;
    std::uint64_t cap = kDefaultTileCap;
    bool exact = false;

    auto* gen = app.add_subcommand("gen", "Write a level-m patch as JSON");
    gen->add_option("--system", system, "Built-in name or rule-file path")->required();
    gen->add_option("--level", level)->capture_default_str();
    gen->add_option("--root", root, "Root prototile id")->capture_default_str();
    gen->add_option("--out", out, "Output path (stdout when omitted)");
    gen->add_option("--max-tiles", cap)->capture_default_str();

    auto* render = app.add_subcommand("render", "Render a patch JSON as SVG");
    render->add_option("--in", in)->required();
    render->add_option("--out", out);
    render->add_option("--deform", deform, "Overlay tile edges under phi_k")->capture_default_str();

    auto* stats = app.add_subcommand("stats", "E(m), partial products and decay fit as CSV");
    stats->add_option("--system", system)->required();
    stats->add_option("--levels", levels)->capture_default_str();
    stats->add_option("--out", out);

    auto* correct = app.add_subcommand("correct", "Build one supertile corrector and report its residuals");
    correct->add_option("--system", system)->required();
    correct->add_option("--supertile", supertile, "type:level")->capture_default_str();
    correct->add_option("--report", report);
    correct->add_option("--svg", svg);
    correct->add_option("--samples", samples)->capture_default_str();
    correct->add_option("--grid", grid)->capture_default_str();

    auto* realize = app.add_subcommand("realize", "Build phi_m on the working supertile and report convergence");
    realize->add_option("--system", system)->required();
    realize->add_option("--root", root)->capture_default_str();
    realize->add_option("--levels", levels)->capture_default_str();
    realize->add_option("--working-level", working)->capture_default_str();
    realize->add_option("--samples", samples)->capture_default_str();
    realize->add_option("--pairs", pairs, "Point pairs for the biLipschitz bound")->capture_default_str();
    realize->add_option("--report", report);
    realize->add_option("--svg", svg);

    auto* net = app.add_subcommand("net", "Extract the separated net of a patch");
    net->add_option("--in", in)->required();
    net->add_option("--out", out);

    auto* tauy = app.add_subcommand("tauy", "Square-grid tiling tau_Y of a net");
    tauy->add_option("--net", in)->required();
    tauy->add_option("--side", side, "auto or a grid side")->capture_default_str();
    tauy->add_flag("--exact", exact, "Exact point-to-square distance");
    tauy->add_option("--svg", svg);
    tauy->add_option("--out", out);

    auto* starmap = app.add_subcommand("starmap", "Image of a polar grid under the elevation map");
    starmap->add_option("--domain", domain, "Star polygon JSON");
    starmap->add_option("--system", system);
    starmap->add_option("--prototile", prototile)->capture_default_str();
    starmap->add_option("--grid", grid)->capture_default_str();
    starmap->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (levels < 0 || level < 0 || samples < 1 || grid < 2 || pairs < 1) throw ValidationError("counts must be positive");
        if (*gen) return cmd_gen(system, level, root, out, cap);
        if (*render) return cmd_render(in, out, deform);
        if (*stats) return cmd_stats(system, levels, out);
        if (*correct) return cmd_correct(system, supertile, report, svg, samples, seed, grid);
        if (*realize) return cmd_realize(system, root, levels, working, samples, seed, pairs, report, svg);
        if (*net) return cmd_net(in, out);
        if (*tauy) return cmd_tauy(in, side, exact, svg, out);
        if (*starmap) return cmd_starmap(domain, system, prototile, grid, out);
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << '\n';
        return 1;
    } catch (const GeometryError& e) {
        std::cerr << "error: geometry: " << e.what() << '\n';
        return 1;
    } catch (const ResourceError& e) {
        std::cerr << "error: resource: " << e.what() << '\n';
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: validation: " << e.what() << '\n';
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: numeric: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
