#include "startile/substitution.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace startile {

StarPolygon SubstitutionSystem::child_shape(int parent, std::size_t k) const {
    const ChildRule& c = rules.at(static_cast<std::size_t>(parent)).at(k);
    return transform(prototile(c.type).shape, Similarity::scaling(1.0 / xi).compose(c.placement));
}

ValidationReport validation_report(const SubstitutionSystem& sys) {
    ValidationReport report;
    auto fail = [&](const std::string& msg) { report.violations.push_back(msg); };
    const int n = static_cast<int>(sys.prototiles.size());
    if (n == 0) {
        fail("system has no prototiles");
        return report;
    }
    if (!(sys.xi > 1.0)) fail("inflation constant must exceed 1");
    for (int i = 0; i < n; ++i) {
        if (sys.prototiles[static_cast<std::size_t>(i)].id != i) {
            std::ostringstream msg;
            msg << "prototile at position " << i << " has id " << sys.prototiles[static_cast<std::size_t>(i)].id;
            fail(msg.str());
        }
    }
    if (static_cast<int>(sys.rules.size()) != n) {
        fail("number of rules does not match number of prototiles");
        return report;
    }
    for (int j = 0; j < n; ++j) {
        const Prototile& parent = sys.prototiles[static_cast<std::size_t>(j)];
        const auto& children = sys.rules[static_cast<std::size_t>(j)];
        auto where = [&]() {
            std::ostringstream msg;
            msg << "rule for prototile '" << parent.label << "' (id " << j << "): ";
            return msg.str();
        };
        if (children.empty()) {
            fail(where() + "no children");
            continue;
        }
        bool types_ok = true;
        for (const auto& c : children) {
            if (c.type < 0 || c.type >= n) types_ok = false;
        }
        if (!types_ok) {
            fail(where() + "child references an unknown prototile");
            continue;
        }
        const double parent_area = sys.xi * sys.xi * parent.shape.area();
        double child_area = 0.0;
        for (const auto& c : children) child_area += c.placement.scale * c.placement.scale * sys.prototile(c.type).shape.area();
        if (std::abs(child_area - parent_area) > 1e-9 * parent_area) {
            std::ostringstream msg;
            msg << where() << "children cover area " << child_area << " but the inflated parent has area " << parent_area;
            fail(msg.str());
        }
        const Polygon inflated = transform(parent.shape.vertices(), Similarity::scaling(sys.xi));
        std::vector<Polygon> placed;
        for (std::size_t k = 0; k < children.size(); ++k) {
            placed.push_back(transform(sys.prototile(children[k].type).shape.vertices(), children[k].placement));
            for (const auto& v : placed.back()) {
                if (!point_in_polygon(inflated, v, 1e-9)) {
                    std::ostringstream msg;
                    msg << where() << "child " << k << " leaves the inflated parent";
                    fail(msg.str());
                    break;
                }
            }
        }
        for (std::size_t a = 0; a < placed.size(); ++a) {
            for (std::size_t b = a + 1; b < placed.size(); ++b) {
                const double ov = overlap_area(placed[a], placed[b]);
                if (ov > 1e-9 * std::max(1.0, parent_area)) {
                    std::ostringstream msg;
                    msg << where() << "children " << a << " and " << b << " overlap (area " << ov << ")";
                    fail(msg.str());
                }
            }
        }
    }
    if (report.ok() && !is_primitive(substitution_matrix(sys))) fail("substitution matrix is not primitive");
    return report;
}

void validate_system(const SubstitutionSystem& sys) {
    const auto report = validation_report(sys);
    if (report.ok()) return;
    std::ostringstream msg;
    msg << "invalid substitution system '" << sys.name << "':";
    for (const auto& v : report.violations) msg << "\n  " << v;
    throw ValidationError(msg.str());
}

IntMatrix substitution_matrix(const SubstitutionSystem& sys) {
    const std::size_t n = sys.prototiles.size();
    IntMatrix m(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t j = 0; j < n; ++j)
        for (const auto& c : sys.rules.at(j)) ++m.at(static_cast<std::size_t>(c.type))[j];
    return m;
}

bool is_primitive(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return false;
    for (const auto& row : m)
        if (row.size() != n) return false;
    std::vector<std::vector<char>> base(n, std::vector<char>(n)), power;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) base[i][j] = m[i][j] > 0;
    power = base;
    const std::size_t limit = (n - 1) * (n - 1) + 1;
    for (std::size_t k = 1; k <= limit; ++k) {
        bool positive = true;
        for (const auto& row : power)
            for (char v : row) positive = positive && v;
        if (positive) return true;
        std::vector<std::vector<char>> next(n, std::vector<char>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (power[i][l])
                    for (std::size_t j = 0; j < n; ++j) next[i][j] = next[i][j] || base[l][j];
        power = std::move(next);
    }
    return false;
}

StarPolygon tile_shape(const SubstitutionSystem& sys, const PlacedTile& tile) {
    return transform(sys.prototile(tile.type).shape, tile.placement);
}

Similarity root_placement(const SubstitutionSystem& sys, int level) {
    return Similarity::scaling(std::pow(sys.xi, level));
}

namespace {

Similarity child_placement(const SubstitutionSystem& sys, const Similarity& parent, const ChildRule& rule) {
    return parent.compose(Similarity::scaling(1.0 / sys.xi)).compose(rule.placement);
}

void expand(const SubstitutionSystem& sys, const PlacedTile& tile, std::vector<PlacedTile>& out) {
    if (static_cast<int>(tile.address.path.size()) == tile.address.level) {
        out.push_back(tile);
        return;
    }
    const auto& children = sys.rules.at(static_cast<std::size_t>(tile.type));
    for (std::size_t k = 0; k < children.size(); ++k) {
        PlacedTile child{children[k].type, child_placement(sys, tile.placement, children[k]), tile.address};
        child.address.path.push_back(static_cast<int>(k));
        expand(sys, child, out);
    }
}

void check_root(const SubstitutionSystem& sys, int root_type, int level) {
    if (root_type < 0 || root_type >= static_cast<int>(sys.size())) throw ValidationError("unknown root prototile");
    if (level < 0) throw ValidationError("level must be non-negative");
}

void check_budget(const SubstitutionSystem& sys, int root_type, int level, std::uint64_t max_tiles) {
    const BigInt total = total_tiles(sys, root_type, level);
    if (total > BigInt(max_tiles)) {
        std::ostringstream msg;
        msg << "level " << level << " supertile has " << total << " tiles, above the cap of " << max_tiles;
        throw ResourceError(msg.str());
    }
}

}  // namespace

Patch inflate_patch(const SubstitutionSystem& sys, int root_type, int level, std::uint64_t max_tiles) {
    check_root(sys, root_type, level);
    check_budget(sys, root_type, level, max_tiles);
    Patch patch{sys.name, root_type, level, {}};
    PlacedTile root{root_type, root_placement(sys, level), {root_type, level, {}}};
    expand(sys, root, patch.tiles);
    return patch;
}

PlacedTile resolve_address(const SubstitutionSystem& sys, const SupertileAddress& address) {
    check_root(sys, address.root_type, address.level);
    if (static_cast<int>(address.path.size()) > address.level) throw ValidationError("address path longer than its level");
    PlacedTile tile{address.root_type, root_placement(sys, address.level), {address.root_type, address.level, {}}};
    for (int k : address.path) {
        const auto& children = sys.rules.at(static_cast<std::size_t>(tile.type));
        if (k < 0 || k >= static_cast<int>(children.size())) throw ValidationError("address path indexes a missing child");
        tile.placement = child_placement(sys, tile.placement, children[static_cast<std::size_t>(k)]);
        tile.type = children[static_cast<std::size_t>(k)].type;
        tile.address.path.push_back(k);
    }
    return tile;
}

std::vector<BigInt> count_tiles(const SubstitutionSystem& sys, int root_type, int level) {
    check_root(sys, root_type, level);
    const IntMatrix m = substitution_matrix(sys);
    const std::size_t n = m.size();
    std::vector<BigInt> v(n, 0);
    v[static_cast<std::size_t>(root_type)] = 1;
    for (int step = 0; step < level; ++step) {
        std::vector<BigInt> next(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (m[i][j] != 0) next[i] += m[i][j] * v[j];
        v = std::move(next);
    }
    return v;
}

BigInt total_tiles(const SubstitutionSystem& sys, int root_type, int level) {
    BigInt total = 0;
    for (const auto& c : count_tiles(sys, root_type, level)) total += c;
    return total;
}

SupertileTree::SupertileTree(const SubstitutionSystem& sys, int root_type, int level, std::uint64_t max_tiles)
    : level_(level), root_type_(root_type), by_level_(static_cast<std::size_t>(level) + 1) {
    check_root(sys, root_type, level);
    check_budget(sys, root_type, level, max_tiles);
    const Similarity root = root_placement(sys, level);
    nodes_.push_back({root_type, level, root, {root_type, level, {}}, -1, {}, transform(sys.prototile(root_type).shape, root)});
    by_level_[static_cast<std::size_t>(level)].push_back(0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].level == 0) continue;
        const auto& children = sys.rules.at(static_cast<std::size_t>(nodes_[i].type));
        for (std::size_t k = 0; k < children.size(); ++k) {
            SupertileNode child;
            child.type = children[k].type;
            child.level = nodes_[i].level - 1;
            child.placement = child_placement(sys, nodes_[i].placement, children[k]);
            child.address = nodes_[i].address;
            child.address.path.push_back(static_cast<int>(k));
            child.parent = static_cast<int>(i);
            child.shape = transform(sys.prototile(child.type).shape, child.placement);
            const int idx = static_cast<int>(nodes_.size());
            nodes_[i].children.push_back(idx);
            by_level_[static_cast<std::size_t>(child.level)].push_back(idx);
            nodes_.push_back(std::move(child));
        }
    }
    leaf_counts_.assign(nodes_.size(), 0);
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        if (nodes_[i].level == 0) leaf_counts_[i] = 1;
        if (nodes_[i].parent >= 0) leaf_counts_[static_cast<std::size_t>(nodes_[i].parent)] += leaf_counts_[i];
    }
}

int SupertileTree::locate(Point2 p, int k) const {
    if (k < 0 || k > level_) return -1;
    const auto& root = nodes_[0];
    if (!root.shape.contains(p, 1e-12) && boundary_distance(root.shape.vertices(), p) > 1e-9 * root.shape.diameter())
        return -1;
    int cur = 0;
    while (nodes_[static_cast<std::size_t>(cur)].level > k) {
        const auto& kids = nodes_[static_cast<std::size_t>(cur)].children;
        int next = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int c : kids) {
            const auto& shape = nodes_[static_cast<std::size_t>(c)].shape;
            if (shape.contains(p, 1e-13)) {
                next = c;
                break;
            }
            const double d = boundary_distance(shape.vertices(), p);
            if (d < best) {
                best = d;
                next = c;
            }
        }
        cur = next;
    }
    return cur;
}

PFStats pf_stats(const SubstitutionSystem& sys) {
    const IntMatrix im = substitution_matrix(sys);
    const auto n = static_cast<Eigen::Index>(im.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = static_cast<double>(im[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);

    auto perron = [&](const Eigen::MatrixXd& a, double& lambda, double& second) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(a);
        if (es.info() != Eigen::Success) throw NumericError("pf_stats: eigen decomposition failed");
        const auto vals = es.eigenvalues();
        Eigen::Index lead = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (vals(i).real() > vals(lead).real()) lead = i;
        lambda = vals(lead).real();
        second = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != lead) second = std::max(second, std::abs(vals(i)));
        Eigen::VectorXd v = es.eigenvectors().col(lead).real();
        if (v.sum() < 0) v = -v;
        if ((v.array() <= 0).any()) throw NumericError("pf_stats: Perron vector is not positive");
        return Eigen::VectorXd(v / v.sum());
    };

    PFStats s;
    double lt = 0.0, st = 0.0;
    const Eigen::VectorXd v = perron(m, s.lambda, s.lambda2_abs);
    Eigen::VectorXd u = perron(m.transpose(), lt, st);
    u /= u.dot(v);
    s.right_vec.assign(v.data(), v.data() + n);
    s.left_vec.assign(u.data(), u.data() + n);
    for (Eigen::Index t = 0; t < n; ++t)
        s.rho_by_type.push_back(u(t) / sys.prototile(static_cast<int>(t)).shape.area());
    s.rho = s.rho_by_type[0];
    const auto [lo, hi] = std::minmax_element(s.rho_by_type.begin(), s.rho_by_type.end());
    if (*hi - *lo > 1e-9 * *hi) throw NumericError("pf_stats: tile density depends on the prototile type");

    Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / static_cast<double>(n);
    double estimate = 0.0;
    for (int it = 0; it < 10000; ++it) {
        Eigen::VectorXd y = m * x;
        const double next = y.sum() / x.sum();
        x = y / y.sum();
        if (it > 0 && std::abs(next - estimate) <= 1e-15 * next) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    s.lambda_power_iteration = estimate;
    if (std::abs(estimate - s.lambda) > 1e-9 * s.lambda) throw NumericError("pf_stats: power iteration disagrees with eigen solver");
    return s;
}

HighPrecisionPF::HighPrecisionPF(const IntMatrix& im) {
    const std::size_t n = im.size();
    using Mat = std::vector<std::vector<BigFloat>>;
    Mat m(n, std::vector<BigFloat>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i][j] = BigFloat(im[i][j]);

    auto normalize = [](Mat& a) {
        BigFloat mx = 0;
        for (const auto& row : a)
            for (const auto& x : row) mx = std::max(mx, BigFloat(abs(x)));
        for (auto& row : a)
            for (auto& x : row) x /= mx;
    };
    auto column_sums = [&](const Mat& a, bool transpose) {
        std::vector<BigFloat> v(n, BigFloat(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v[i] += transpose ? a[j][i] : a[i][j];
        BigFloat total = 0;
        for (const auto& x : v) total += x;
        for (auto& x : v) x /= total;
        return v;
    };

    // A^(2^k) collapses onto the Perron projector v u^T.
    Mat a = m;
    normalize(a);
    std::vector<BigFloat> v = column_sums(a, false);
    for (int k = 0; k < 40; ++k) {
        Mat sq(n, std::vector<BigFloat>(n, BigFloat(0)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                for (std::size_t j = 0; j < n; ++j) sq[i][j] += a[i][l] * a[l][j];
        a = std::move(sq);
        normalize(a);
        std::vector<BigFloat> next = column_sums(a, false);
        BigFloat change = 0;
        for (std::size_t i = 0; i < n; ++i) change = std::max(change, BigFloat(abs(next[i] - v[i])));
        v = std::move(next);
        if (change < BigFloat("1e-95")) break;
    }
    std::vector<BigFloat> u = column_sums(a, true);

    lambda_ = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lambda_ += m[i][j] * v[j];
    BigFloat uv = 0, ones_v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        uv += u[i] * v[i];
        ones_v += v[i];
    }
    for (std::size_t t = 0; t < n; ++t) leading_.push_back(ones_v * u[t] / uv);
}

BigFloat HighPrecisionPF::expected_count(int type, int level) const {
    return boost::multiprecision::pow(lambda_, level) * leading(type);
}

TileDensity TileDensity::f_tau() { return {}; }

TileDensity TileDensity::per_type(std::vector<double> values) {
    TileDensity d;
    d.kind_ = Kind::per_type;
    d.values_ = std::move(values);
    return d;
}

TileDensity TileDensity::custom(std::function<double(const PlacedTile&, const StarPolygon&)> fn) {
    TileDensity d;
    d.kind_ = Kind::custom;
    d.fn_ = std::move(fn);
    return d;
}

double TileDensity::value(const SubstitutionSystem& sys, const PlacedTile& tile, const StarPolygon& shape) const {
    switch (kind_) {
        case Kind::f_tau:
            return 1.0 / shape.area();
        case Kind::per_type:
            return values_.at(static_cast<std::size_t>(tile.type));
        case Kind::custom:
            return fn_(tile, shape);
    }
    (void)sys;
    return 0.0;
}

std::vector<double> TileDensity::type_values(const SubstitutionSystem& sys) const {
    if (kind_ == Kind::per_type) return values_;
    if (kind_ == Kind::custom) throw std::logic_error("type_values: custom densities have no per-type values");
    std::vector<double> out;
    for (const auto& p : sys.prototiles) out.push_back(1.0 / p.shape.area());
    return out;
}

EValue e_value(const SubstitutionSystem& sys, int root_type, int level, const TileDensity& f) {
    const HighPrecisionPF hp(substitution_matrix(sys));
    const BigFloat expected = hp.expected_count(root_type, level);
    BigFloat mass = 0;
    if (f.is_f_tau()) {
        for (const auto& c : count_tiles(sys, root_type, level)) mass += BigFloat(c);
    } else if (f.is_per_type()) {
        const auto values = f.type_values(sys);
        const auto counts = count_tiles(sys, root_type, level);
        for (std::size_t i = 0; i < counts.size(); ++i)
            mass += BigFloat(counts[i]) * BigFloat(values.at(i)) * BigFloat(sys.prototiles[i].shape.area());
    } else {
        const Patch patch = inflate_patch(sys, root_type, level);
        double total = 0.0;
        for (const auto& t : patch.tiles) {
            const StarPolygon shape = tile_shape(sys, t);
            total += f.value(sys, t, shape) * shape.area();
        }
        mass = total;
    }
    if (!(mass > 0)) throw NumericError("e_value: density has non-positive mass");
    const BigFloat lo = std::min(mass, expected);
    const BigFloat excess = abs(expected - mass) / lo;
    EValue out;
    out.excess = static_cast<double>(excess);
    out.e = 1.0 + out.excess;
    out.mass = static_cast<double>(mass);
    out.expected = static_cast<double>(expected);
    return out;
}

EValue E_of_m(const SubstitutionSystem& sys, int level, const TileDensity& f) {
    EValue best;
    best.excess = -1.0;
    for (std::size_t t = 0; t < sys.size(); ++t) {
        const EValue e = e_value(sys, static_cast<int>(t), level, f);
        if (e.excess > best.excess) best = e;
    }
    return best;
}

ProductReport product_report(const SubstitutionSystem& sys, int max_level, const TileDensity& f, int fit_from) {
    ProductReport report;
    double log_product = 0.0;
    std::vector<std::pair<double, double>> fit;
    for (int m = 1; m <= max_level; ++m) {
        const EValue e = E_of_m(sys, m, f);
        log_product += std::log1p(e.excess);
        report.rows.push_back({m, e.e, e.excess, std::exp(log_product)});
        if (m >= fit_from && e.excess > 0) fit.emplace_back(m, std::log(e.excess));
    }
    report.product = std::exp(log_product);
    if (fit.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : fit) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(fit.size());
        report.fitted_ratio = std::exp((k * sxy - sx * sy) / (k * sxx - sx * sx));
    }
    const PFStats pf = pf_stats(sys);
    report.eigen_ratio = pf.lambda2_abs / pf.lambda;
    return report;
}

DecayReport decay_report(const SubstitutionSystem& sys, int root_type, int lo, int hi) {
    const HighPrecisionPF hp(substitution_matrix(sys));
    const PFStats pf = pf_stats(sys);
    DecayReport report;
    for (int m = lo; m <= hi; ++m) {
        const BigInt count = total_tiles(sys, root_type, m);
        const BigFloat dev = abs(hp.expected_count(root_type, m) - BigFloat(count));
        DecayRow row;
        row.level = m;
        row.count = count.str();
        row.deviation = static_cast<double>(dev);
        if (pf.lambda2_abs > 0) {
            row.normalized = static_cast<double>(dev / boost::multiprecision::pow(BigFloat(pf.lambda2_abs), m));
        } else {
            row.normalized = row.deviation < 1e-60 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        report.rows.push_back(std::move(row));
    }
    if (report.rows.empty()) return report;
    report.constant = report.rows.front().normalized;
    for (std::size_t start = 0; start < report.rows.size(); ++start) {
        bool ok = true;
        for (std::size_t i = start; i < report.rows.size() && ok; ++i)
            ok = report.rows[i].normalized <= 1.1 * report.constant;
        if (ok) {
            report.holds_from = report.rows[start].level;
            break;
        }
    }
    return report;
}

}  // namespace startile
