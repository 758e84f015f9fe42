#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "startile/corrections.hpp"
#include "startile/plane_map.hpp"
#include "startile/substitution.hpp"

namespace startile {

// Integral of f over every node of the tree (exact leaf counts for f_tau).
std::vector<double> node_masses(const SupertileTree& tree, const SubstitutionSystem& sys, const TileDensity& f);

/// f_m: on each level-m supertile, the mean ∫_T f / |T|.
struct LevelDensity {
    int level = 0;
    std::vector<int> nodes;      // tree nodes at this level
    std::vector<double> values;  // same order

    // Value on the level-m supertile containing x (0 outside the tree).
    double at(const SupertileTree& tree, Point2 x) const;
    double value_of_node(int node) const;

private:
    friend LevelDensity level_density(const SupertileTree&, const std::vector<double>&, int);
    std::map<int, std::size_t> index_;
};

LevelDensity level_density(const SupertileTree& tree, const std::vector<double>& masses, int m);
LevelDensity level_density(const SupertileTree& tree, const SubstitutionSystem& sys, const TileDensity& f, int m);

/// ψ_k: a tile corrector on every level-k supertile, built once per distinct
/// (type, child values) in the parent's canonical frame and moved into place.
class LevelLayer : public MapLayer {
public:
    LevelLayer(std::shared_ptr<const SupertileTree> tree, int level, std::vector<Similarity> frames,
               std::vector<int> corrector_of, std::vector<std::shared_ptr<const TileCorrector>> correctors);

    Point2 apply(Point2 x) const override;
    std::string label() const override { return "level_" + std::to_string(level_); }
    std::vector<Polygon> fixed_boundaries() const override;

    int level() const { return level_; }
    const std::vector<std::shared_ptr<const TileCorrector>>& correctors() const { return correctors_; }

private:
    std::shared_ptr<const SupertileTree> tree_;
    int level_;
    std::map<int, std::size_t> slot_;  // node -> position in frames_
    std::vector<Similarity> frames_;
    std::vector<Similarity> inverses_;
    std::vector<int> corrector_of_;
    std::vector<std::shared_ptr<const TileCorrector>> correctors_;
};

struct RealizeOptions {
    int working_level = 6;
    CorrectorOptions corrector;
    std::uint64_t max_tiles = kDefaultTileCap;
};

struct LevelBuild {
    int level = 0;
    int supertiles = 0;
    int distinct_correctors = 0;
    std::vector<CorrectorReport> reports;
};

struct Realization {
    std::shared_ptr<const SupertileTree> tree;
    std::vector<double> masses;
    int levels = 0;
    PlaneMap map;  // φ_m = ψ_m o ... o ψ_1
    std::vector<LevelBuild> builds;

    LevelDensity density(int m) const { return level_density(*tree, masses, m); }
    // φ_k for k <= levels, sharing the layers already built.
    Realization prefix(int k) const;
};

// Throws NumericError naming the supertile address when a corrector fails.
Realization build_phi_m(const SubstitutionSystem& sys, int root_type, int levels, const TileDensity& f = TileDensity::f_tau(),
                        const RealizeOptions& options = {});

/// A level-m supertile in the canonical frame (xi times the prototile) split
/// into its children, with the mean of f on each child.
struct SupertileProblem {
    StarPolygon whole;
    std::vector<StarPolygon> parts;
    std::vector<double> values;
};

// f must be f_tau or per-type.
SupertileProblem supertile_problem(const SubstitutionSystem& sys, int type, int level,
                                   const TileDensity& f = TileDensity::f_tau());

struct JacobianSummary {
    int samples = 0;
    double median = 0.0;
    double p90 = 0.0;
    double max = 0.0;
    double excluded_fraction = 0.0;
};

struct SamplePoints {
    std::vector<Point2> points;
    std::vector<int> tiles;  // level-0 node of each point
    double excluded_fraction = 0.0;
};

// Uniform points in the working supertile at least margin * inradius away from
// the boundary of their tile.
SamplePoints sample_tiles(const SupertileTree& tree, int count, std::uint64_t seed, double margin = 1e-3);

// Relative residual |Jac_num(map)(x) / target(x) - 1| over the points.
JacobianSummary verify_jacobian(const PlaneMap& map, const std::function<double(Point2)>& target,
                                const std::vector<Point2>& points, double h);

// Samples the realization: target f(x) / f_m(φ_m(x)).
JacobianSummary verify_realization(const Realization& real, const SubstitutionSystem& sys, const TileDensity& f,
                                   int samples, std::uint64_t seed);

// Samples |Jac(ψ) ∫f / (|T| f) - 1| at points kept margin * inradius away from
// the part boundaries.
JacobianSummary verify_corrector(const TileCorrector& corrector, const SupertileProblem& problem, int samples,
                                 std::uint64_t seed, double margin = 1e-3);

// Lower bound on the biLipschitz constant from random pairs inside `region`.
double bilip_estimate(const PlaneMap& map, const Polygon& region, int pairs, std::uint64_t seed,
                      double min_separation = 1e-4);

struct ConvergenceRow {
    int level = 0;
    double E = 1.0;
    double excess = 0.0;
    double product = 1.0;
    std::optional<JacobianSummary> residual;
    std::optional<double> bilip_lower;
};

struct ConvergenceStats {
    std::vector<ConvergenceRow> rows;
    std::optional<double> fitted_epsilon;
    double eigen_ratio = 0.0;
    double rho = 0.0;
};

ConvergenceStats convergence_report(const SubstitutionSystem& sys, int max_level, const TileDensity& f = TileDensity::f_tau());

}  // namespace startile
