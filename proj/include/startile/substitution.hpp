#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "startile/errors.hpp"
#include "startile/geometry.hpp"
#include "startile/similarity.hpp"

namespace startile {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_100;
using IntMatrix = std::vector<std::vector<std::int64_t>>;

struct Prototile {
    int id = 0;
    std::string label;
    StarPolygon shape;
};

// Places a prototile of `type` inside the xi-inflated parent.
struct ChildRule {
    int type = 0;
    Similarity placement;
};

struct SubstitutionSystem {
    std::string name;
    std::vector<Prototile> prototiles;
    double xi = 1.0;
    std::vector<std::vector<ChildRule>> rules;  // indexed by parent id

    std::size_t size() const { return prototiles.size(); }
    const Prototile& prototile(int id) const { return prototiles.at(static_cast<std::size_t>(id)); }
    // Polygon of child `k` of a unit parent of type `parent` (children at scale 1/xi).
    StarPolygon child_shape(int parent, std::size_t k) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validation_report(const SubstitutionSystem& sys);
// Throws ValidationError listing every violation.
void validate_system(const SubstitutionSystem& sys);

IntMatrix substitution_matrix(const SubstitutionSystem& sys);
bool is_primitive(const IntMatrix& m);

struct SupertileAddress {
    int root_type = 0;
    int level = 0;
    std::vector<int> path;
};

struct PlacedTile {
    int type = 0;
    Similarity placement;  // prototile frame -> world
    SupertileAddress address;
};

struct Patch {
    std::string system;
    int root_type = 0;
    int level = 0;
    std::vector<PlacedTile> tiles;
};

StarPolygon tile_shape(const SubstitutionSystem& sys, const PlacedTile& tile);

// The level-m supertile of `root_type` is xi^m times the prototile, so level-0
// tiles come out at prototile size.
Similarity root_placement(const SubstitutionSystem& sys, int level);

inline constexpr std::uint64_t kDefaultTileCap = 5'000'000;

Patch inflate_patch(const SubstitutionSystem& sys, int root_type, int level,
                    std::uint64_t max_tiles = kDefaultTileCap);

// Re-derives the placement (and type) a path addresses.
PlacedTile resolve_address(const SubstitutionSystem& sys, const SupertileAddress& address);

std::vector<BigInt> count_tiles(const SubstitutionSystem& sys, int root_type, int level);
BigInt total_tiles(const SubstitutionSystem& sys, int root_type, int level);

/// Hierarchy of supertiles inside one working supertile: node 0 is the root at
/// `level`, leaves are level-0 tiles.
struct SupertileNode {
    int type = 0;
    int level = 0;
    Similarity placement;
    SupertileAddress address;
    int parent = -1;
    std::vector<int> children;
    StarPolygon shape;
};

class SupertileTree {
public:
    SupertileTree(const SubstitutionSystem& sys, int root_type, int level,
                  std::uint64_t max_tiles = kDefaultTileCap);

    int level() const { return level_; }
    int root_type() const { return root_type_; }
    const std::vector<SupertileNode>& nodes() const { return nodes_; }
    const SupertileNode& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& at_level(int k) const { return by_level_.at(static_cast<std::size_t>(k)); }

    // Node at level k containing p (nearest when p sits on or just outside a
    // boundary); -1 when p is outside the root.
    int locate(Point2 p, int k) const;
    // Tile (level 0) count below a node.
    std::int64_t leaf_count(int i) const { return leaf_counts_[static_cast<std::size_t>(i)]; }

private:
    int level_;
    int root_type_;
    std::vector<SupertileNode> nodes_;
    std::vector<std::vector<int>> by_level_;
    std::vector<std::int64_t> leaf_counts_;
};

struct PFStats {
    double lambda = 0.0;
    double lambda2_abs = 0.0;
    double rho = 0.0;
    std::vector<double> right_vec;  // normalized to sum 1
    std::vector<double> left_vec;   // normalized so left . right = 1
    std::vector<double> rho_by_type;
    double lambda_power_iteration = 0.0;
};

PFStats pf_stats(const SubstitutionSystem& sys);

/// Perron-Frobenius data of the substitution matrix in 100-digit precision.
/// `leading(t)` is lim_m count_total(t, m) / lambda^m, i.e. rho * |P_t|.
class HighPrecisionPF {
public:
    explicit HighPrecisionPF(const IntMatrix& m);
    const BigFloat& lambda() const { return lambda_; }
    const BigFloat& leading(int type) const { return leading_.at(static_cast<std::size_t>(type)); }
    // rho * |T| for the level-m supertile of `type`.
    BigFloat expected_count(int type, int level) const;

private:
    BigFloat lambda_;
    std::vector<BigFloat> leading_;
};

/// Density that is constant on each level-0 tile.
class TileDensity {
public:
    static TileDensity f_tau();
    static TileDensity per_type(std::vector<double> values);
    static TileDensity custom(std::function<double(const PlacedTile&, const StarPolygon&)> fn);

    bool is_f_tau() const { return kind_ == Kind::f_tau; }
    bool is_per_type() const { return kind_ != Kind::custom; }
    double value(const SubstitutionSystem& sys, const PlacedTile& tile, const StarPolygon& shape) const;
    // Per-type values (f_tau resolves to 1/|P_i|).
    std::vector<double> type_values(const SubstitutionSystem& sys) const;

private:
    enum class Kind { f_tau, per_type, custom };
    Kind kind_ = Kind::f_tau;
    std::vector<double> values_;
    std::function<double(const PlacedTile&, const StarPolygon&)> fn_;
};

struct EValue {
    double e = 1.0;
    double excess = 0.0;  // e - 1, computed without cancellation
    double mass = 0.0;    // integral of f over T
    double expected = 0.0;  // rho |T|
};

EValue e_value(const SubstitutionSystem& sys, int root_type, int level, const TileDensity& f = TileDensity::f_tau());
EValue E_of_m(const SubstitutionSystem& sys, int level, const TileDensity& f = TileDensity::f_tau());

struct ProductRow {
    int level = 0;
    double E = 1.0;
    double excess = 0.0;
    double partial_product = 1.0;
};

struct ProductReport {
    std::vector<ProductRow> rows;
    std::optional<double> fitted_ratio;  // exp(slope) of log(E(m)-1) over m >= fit_from
    double eigen_ratio = 0.0;            // lambda2_abs / lambda
    double product = 1.0;
};

ProductReport product_report(const SubstitutionSystem& sys, int max_level, const TileDensity& f = TileDensity::f_tau(),
                             int fit_from = 4);

struct DecayRow {
    int level = 0;
    std::string count;  // exact decimal
    double deviation = 0.0;   // |rho|T_m| - count|
    double normalized = 0.0;  // deviation / lambda2_abs^m
};

struct DecayReport {
    std::vector<DecayRow> rows;
    double constant = 0.0;  // C fitted at the first row
    // Smallest level from which deviation <= 1.1 * C * lambda2_abs^m holds through the last row.
    std::optional<int> holds_from;
};

DecayReport decay_report(const SubstitutionSystem& sys, int root_type, int lo, int hi);

}  // namespace startile
