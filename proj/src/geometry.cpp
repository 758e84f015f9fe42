#include "startile/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace startile {

namespace {

double scale_of(std::span<const Point2> poly) {
    double s = 0.0;
    for (const auto& p : poly) s = std::max({s, std::abs(p.x), std::abs(p.y)});
    return std::max(s, 1.0);
}

bool on_segment(Point2 p, Point2 a, Point2 b, double eps) { return segment_distance(p, a, b) <= eps; }

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d, double eps) {
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    return on_segment(a, c, d, eps) || on_segment(b, c, d, eps) || on_segment(c, a, b, eps) ||
           on_segment(d, a, b, eps);
}

double segment_segment_distance(Point2 a, Point2 b, Point2 c, Point2 d) {
    if (segments_touch(a, b, c, d, 0.0)) return 0.0;
    return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                     segment_distance(d, a, b)});
}

// Sutherland-Hodgman: clip `subject` by the left half-plane of the directed line ab.
Polygon clip_half_plane(const Polygon& subject, Point2 a, Point2 b) {
    Polygon out;
    const std::size_t n = subject.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = subject[i];
        const Point2 q = subject[(i + 1) % n];
        const double sp = orient(a, b, p);
        const double sq = orient(a, b, q);
        if (sp >= 0) out.push_back(p);
        if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
            out.push_back(lerp(p, q, sp / (sp - sq)));
        }
    }
    return out;
}

double convex_intersection_area(const Polygon& a, const Polygon& b) {
    Polygon clipped = a;
    for (std::size_t i = 0; i < b.size() && !clipped.empty(); ++i) {
        clipped = clip_half_plane(clipped, b[i], b[(i + 1) % b.size()]);
    }
    return clipped.size() < 3 ? 0.0 : std::abs(signed_area(clipped));
}

// Ear clipping; input must be simple and counterclockwise.
std::vector<Polygon> triangulate(const Polygon& poly) {
    std::vector<Polygon> tris;
    std::vector<std::size_t> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::size_t guard = 0;
    while (idx.size() > 3 && guard++ < 10 * poly.size() * poly.size()) {
        bool clipped = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const Point2 a = poly[idx[(i + idx.size() - 1) % idx.size()]];
            const Point2 b = poly[idx[i]];
            const Point2 c = poly[idx[(i + 1) % idx.size()]];
            if (orient(a, b, c) <= 0) continue;
            bool empty = true;
            for (std::size_t j : idx) {
                const Point2 p = poly[j];
                if (p == a || p == b || p == c) continue;
                if (orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0) {
                    empty = false;
                    break;
                }
            }
            if (!empty) continue;
            tris.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) break;
    }
    if (idx.size() == 3) tris.push_back({poly[idx[0]], poly[idx[1]], poly[idx[2]]});
    return tris;
}

double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a;
}

// Ray p + s*dir hitting segment cd; returns s (or +inf).
double ray_segment(Point2 p, Point2 dir, Point2 c, Point2 d) {
    const Point2 e = d - c;
    const double den = cross(dir, e);
    if (std::abs(den) < 1e-300) return std::numeric_limits<double>::infinity();
    const Point2 w = c - p;
    const double s = cross(w, e) / den;
    const double u = cross(w, dir) / den;
    if (u < -1e-12 || u > 1 + 1e-12 || s <= 0) return std::numeric_limits<double>::infinity();
    return s;
}

Point2 ray_line(Point2 p, Point2 dir, Point2 c, Point2 d) {
    const Point2 e = d - c;
    const double s = cross(c - p, e) / cross(dir, e);
    return p + s * dir;
}

}  // namespace

double signed_area(std::span<const Point2> poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

double diameter(std::span<const Point2> poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, distance(poly[i], poly[j]));
    return d;
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 e = b - a;
    const double len2 = dot(e, e);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, e) / len2, 0.0, 1.0);
    return distance(p, a + t * e);
}

double boundary_distance(std::span<const Point2> poly, Point2 p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
}

bool point_in_polygon(std::span<const Point2> poly, Point2 p, double eps) {
    if (boundary_distance(poly, p) <= eps * scale_of(poly)) return true;
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 a = poly[i];
        const Point2 b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool point_strictly_inside(std::span<const Point2> poly, Point2 p, double eps) {
    return boundary_distance(poly, p) > eps * scale_of(poly) && point_in_polygon(poly, p, 0.0);
}

bool is_simple(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = poly[i];
        const Point2 b = poly[(i + 1) % n];
        if (a == b) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const Point2 c = poly[j];
            const Point2 d = poly[(j + 1) % n];
            if (adjacent) {
                // Adjacent edges may only share their common vertex.
                const Point2 shared = (j == i + 1) ? b : a;
                const Point2 far_ab = (j == i + 1) ? a : b;
                const Point2 far_cd = (j == i + 1) ? d : c;
                if (std::abs(orient(far_ab, shared, far_cd)) < 1e-14 * scale_of(poly) &&
                    dot(far_ab - shared, far_cd - shared) > 0) {
                    return false;
                }
                continue;
            }
            if (segments_touch(a, b, c, d, 0.0)) return false;
        }
    }
    return true;
}

Polygon normalize_polygon(Polygon poly, double eps) {
    const double tol = eps * scale_of(poly);
    bool changed = true;
    while (changed && poly.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < poly.size() && poly.size() >= 3; ++i) {
            const std::size_t n = poly.size();
            const Point2 prev = poly[(i + n - 1) % n];
            const Point2 cur = poly[i];
            const Point2 next = poly[(i + 1) % n];
            const bool duplicate = distance(cur, next) <= tol;
            const double len = distance(prev, next);
            const bool collinear =
                len > 0 && std::abs(orient(prev, cur, next)) <= tol * len && dot(cur - prev, next - cur) > 0;
            if (duplicate || collinear) {
                poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(duplicate ? (i + 1) % n : i));
                changed = true;
                break;
            }
        }
    }
    if (poly.size() >= 3 && signed_area(poly) < 0) std::reverse(poly.begin() + 1, poly.end());
    return poly;
}

bool segment_inside(std::span<const Point2> poly, Point2 a, Point2 b, double eps) {
    const double tol = eps * scale_of(poly);
    if (!point_in_polygon(poly, a, eps) || !point_in_polygon(poly, b, eps)) return false;
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return true;
    std::vector<double> ts{0.0, 1.0};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 c = poly[i];
        const Point2 d = poly[(i + 1) % n];
        if (segment_distance(c, a, b) <= tol) ts.push_back(std::clamp(dot(c - a, ab) / len2, 0.0, 1.0));
        const Point2 e = d - c;
        const double den = cross(ab, e);
        if (std::abs(den) > 1e-300) {
            const double t = cross(c - a, e) / den;
            const double u = cross(c - a, ab) / den;
            if (t >= 0 && t <= 1 && u >= 0 && u <= 1) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (ts[i + 1] - ts[i] <= 1e-15) continue;
        if (!point_in_polygon(poly, a + (0.5 * (ts[i] + ts[i + 1])) * ab, eps)) return false;
    }
    return true;
}

bool triangle_inside(std::span<const Point2> poly, Point2 a, Point2 b, Point2 c, double eps) {
    if (!segment_inside(poly, a, b, eps) || !segment_inside(poly, b, c, eps) || !segment_inside(poly, c, a, eps))
        return false;
    const double tol = eps * scale_of(poly);
    const double sgn = orient(a, b, c) >= 0 ? 1.0 : -1.0;
    for (const auto& v : poly) {
        const double d1 = sgn * orient(a, b, v) / std::max(distance(a, b), 1e-300);
        const double d2 = sgn * orient(b, c, v) / std::max(distance(b, c), 1e-300);
        const double d3 = sgn * orient(c, a, v) / std::max(distance(c, a), 1e-300);
        if (d1 > tol && d2 > tol && d3 > tol) return false;
    }
    return true;
}

double polygon_separation(std::span<const Point2> a, std::span<const Point2> b) {
    if (point_in_polygon(b, a[0], 0.0) || point_in_polygon(a, b[0], 0.0)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            d = std::min(d, segment_segment_distance(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]));
    return d;
}

double overlap_area(std::span<const Point2> a, std::span<const Point2> b) {
    const auto ta = triangulate(normalize_polygon(Polygon(a.begin(), a.end())));
    const auto tb = triangulate(normalize_polygon(Polygon(b.begin(), b.end())));
    double total = 0.0;
    for (const auto& x : ta)
        for (const auto& y : tb) total += convex_intersection_area(x, y);
    return total;
}

Polygon polygon_kernel(std::span<const Point2> poly) {
    double lo_x = poly[0].x, hi_x = poly[0].x, lo_y = poly[0].y, hi_y = poly[0].y;
    for (const auto& p : poly) {
        lo_x = std::min(lo_x, p.x);
        hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y);
        hi_y = std::max(hi_y, p.y);
    }
    Polygon k{{lo_x, lo_y}, {hi_x, lo_y}, {hi_x, hi_y}, {lo_x, hi_y}};
    for (std::size_t i = 0; i < poly.size() && !k.empty(); ++i) {
        k = clip_half_plane(k, poly[i], poly[(i + 1) % poly.size()]);
    }
    if (k.size() < 3 || signed_area(k) <= 0) return {};
    return normalize_polygon(std::move(k));
}

Polygon visibility_polygon(std::span<const Point2> poly, Point2 q) {
    if (!point_strictly_inside(poly, q)) throw GeometryError("visibility_polygon: viewpoint is not strictly inside");
    std::vector<double> angles;
    for (const auto& v : poly) angles.push_back(wrap_angle(std::atan2(v.y - q.y, v.x - q.x)));
    std::sort(angles.begin(), angles.end());
    std::vector<double> crit;
    for (double a : angles)
        if (crit.empty() || a - crit.back() > 1e-13) crit.push_back(a);
    if (crit.size() > 1 && crit.front() + kTwoPi - crit.back() <= 1e-13) crit.pop_back();

    const std::size_t m = crit.size();
    const std::size_t n = poly.size();
    // Nearest edge for the open interval (crit[i], crit[i+1]).
    std::vector<std::size_t> edge(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double hi = (i + 1 < m) ? crit[i + 1] : crit[0] + kTwoPi;
        const double mid = 0.5 * (crit[i] + hi);
        const Point2 dir{std::cos(mid), std::sin(mid)};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const double s = ray_segment(q, dir, poly[k], poly[(k + 1) % n]);
            if (s < best) {
                best = s;
                edge[i] = k;
            }
        }
        if (!std::isfinite(best)) throw GeometryError("visibility_polygon: ray escaped the polygon");
    }
    Polygon out;
    const double tol = 1e-12 * scale_of(poly);
    for (std::size_t i = 0; i < m; ++i) {
        const Point2 dir{std::cos(crit[i]), std::sin(crit[i])};
        const std::size_t before = edge[(i + m - 1) % m];
        const std::size_t after = edge[i];
        const Point2 p0 = ray_line(q, dir, poly[before], poly[(before + 1) % n]);
        const Point2 p1 = ray_line(q, dir, poly[after], poly[(after + 1) % n]);
        out.push_back(p0);
        if (distance(p0, p1) > tol) out.push_back(p1);
    }
    return normalize_polygon(std::move(out));
}

StarPolygon::StarPolygon(Polygon vertices, Point2 center) : vertices_(normalize_polygon(std::move(vertices))), center_(center) {
    if (!std::isfinite(center.x) || !std::isfinite(center.y)) throw GeometryError("star polygon: non-finite center");
    for (const auto& v : vertices_)
        if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw GeometryError("star polygon: non-finite vertex");
    if (vertices_.size() < 3) throw GeometryError("star polygon: fewer than 3 distinct vertices");
    if (!is_simple(vertices_)) throw GeometryError("star polygon: boundary is not simple");
    area_ = signed_area(vertices_);
    if (!(area_ > 0)) throw GeometryError("star polygon: non-positive area");
    if (!point_strictly_inside(vertices_, center_)) throw GeometryError("star polygon: center is not strictly inside");

    const std::size_t n = vertices_.size();
    const double diam = startile::diameter(vertices_);
    triangle_areas_.resize(n);
    cumulative_.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const Point2 a = vertices_[k];
        const Point2 b = vertices_[(k + 1) % n];
        const double h = orient(a, b, center_) / distance(a, b);
        if (!(h > 1e-10 * diam)) {
            std::ostringstream msg;
            msg << "star polygon: center does not see edge " << k << " (not in the open kernel)";
            throw GeometryError(msg.str());
        }
        triangle_areas_[k] = 0.5 * orient(center_, a, b);
        cumulative_[k + 1] = cumulative_[k] + triangle_areas_[k];
    }
    const Point2 r0 = vertices_[0] - center_;
    ref_angle_ = std::atan2(r0.y, r0.x);
    breaks_.resize(n + 1);
    breaks_[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) breaks_[k] = angle_of(vertices_[k]);
    breaks_[n] = kTwoPi;
    for (std::size_t k = 1; k <= n; ++k)
        if (!(breaks_[k] > breaks_[k - 1])) throw GeometryError("star polygon: vertex angles are not increasing");
}

double StarPolygon::diameter() const { return startile::diameter(vertices_); }

double StarPolygon::inradius() const { return boundary_distance(vertices_, center_); }

double StarPolygon::angle_of(Point2 p) const {
    const Point2 r0 = vertices_[0] - center_;
    const Point2 d = p - center_;
    return wrap_angle(std::atan2(cross(r0, d), dot(r0, d)));
}

std::size_t StarPolygon::edge_at(double eta) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), eta);
    const auto k = static_cast<std::ptrdiff_t>(it - breaks_.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(vertices_.size()) - 1));
}

std::pair<std::size_t, double> StarPolygon::ray_hit(double eta) const {
    const std::size_t k = edge_at(eta);
    const Point2 a = vertices_[k];
    const Point2 e = vertex(k + 1) - a;
    const double ang = ref_angle_ + eta;
    const Point2 dir{std::cos(ang), std::sin(ang)};
    const double t = -cross(dir, a - center_) / cross(dir, e);
    return {k, std::clamp(t, 0.0, 1.0)};
}

double StarPolygon::boundary_radius(double alpha) const {
    return distance(boundary_point(wrap_angle(alpha)), center_);
}

Point2 StarPolygon::boundary_point(double eta) const {
    if (eta >= kTwoPi) return vertices_[0];
    const auto [k, t] = ray_hit(eta);
    return lerp(vertices_[k], vertex(k + 1), t);
}

double StarPolygon::sector_area(double eta) const {
    if (!(eta >= -1e-15 && eta <= kTwoPi + 1e-12)) throw GeometryError("sector_area: angle outside [0, 2pi]");
    if (eta <= 0) return 0.0;
    if (eta >= kTwoPi) return cumulative_.back();
    const auto [k, t] = ray_hit(eta);
    return cumulative_[k] + t * triangle_areas_[k];
}

std::pair<std::size_t, double> StarPolygon::locate_sector(double target) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    auto k = static_cast<std::ptrdiff_t>(it - cumulative_.begin()) - 1;
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(vertices_.size()) - 1);
    const auto ku = static_cast<std::size_t>(k);
    return {ku, std::clamp((target - cumulative_[ku]) / triangle_areas_[ku], 0.0, 1.0)};
}

double StarPolygon::solve_eta(double target) const {
    const double total = cumulative_.back();
    if (!(target >= -1e-12 * total && target <= total * (1 + 1e-12)))
        throw GeometryError("solve_eta: target area outside [0, |T|]");
    if (target <= 0) return 0.0;
    if (target >= total) return kTwoPi;
    const auto [k, t] = locate_sector(target);
    const Point2 a = vertices_[k] - center_;
    const Point2 p = lerp(vertices_[k], vertex(k + 1), t) - center_;
    return breaks_[k] + std::atan2(cross(a, p), dot(a, p));
}

bool StarPolygon::contains(Point2 p, double eps) const { return point_in_polygon(vertices_, p, eps); }

StarPolygon StarPolygon::contract(double r) const {
    if (!(r > 0 && r < 1)) throw GeometryError("contract: ratio must lie in (0, 1)");
    Polygon v;
    v.reserve(vertices_.size());
    for (const auto& p : vertices_) v.push_back(center_ + r * (p - center_));
    return StarPolygon(std::move(v), center_);
}

double polygon_area(const StarPolygon& poly) { return signed_area(poly.vertices()); }

bool is_star_center(std::span<const Point2> poly, Point2 p) {
    if (!point_strictly_inside(poly, p)) throw GeometryError("is_star_center: point is not strictly inside the polygon");
    const double tol = 1e-12 * diameter(poly);
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point2 a = poly[k];
        const Point2 b = poly[(k + 1) % poly.size()];
        if (orient(a, b, p) / distance(a, b) < -tol) return false;
    }
    return true;
}

namespace {

bool in_open_kernel(const StarPolygon& t, Point2 q) {
    const double tol = 1e-10 * t.diameter();
    for (std::size_t k = 0; k < t.size(); ++k) {
        const Point2 a = t.vertex(k);
        const Point2 b = t.vertex(k + 1);
        if (!(orient(a, b, q) / distance(a, b) > tol)) return false;
    }
    return true;
}

std::vector<Point2> boundary_samples(const StarPolygon& p, int count) {
    std::vector<Point2> out;
    double perimeter = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) perimeter += distance(p.vertex(k), p.vertex(k + 1));
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Point2 a = p.vertex(k);
        const Point2 b = p.vertex(k + 1);
        const int m = std::max(1, static_cast<int>(std::round(count * distance(a, b) / perimeter)));
        for (int i = 0; i < m; ++i) out.push_back(lerp(a, b, static_cast<double>(i) / m));
    }
    return out;
}

}  // namespace

WitnessPoint find_witness_point(const StarPolygon& whole, std::span<const StarPolygon> parts, double r,
                                const WitnessOptions& opts) {
    if (!(r > 0 && r < 1)) throw GeometryError("find_witness_point: ratio must lie in (0, 1)");
    double part_area = 0.0;
    for (const auto& p : parts) part_area += p.area();
    if (std::abs(part_area - whole.area()) > 1e-9 * std::max(1.0, whole.area()))
        throw GeometryError("find_witness_point: part areas do not sum to the area of the whole");

    const int n = opts.grid_half_width;
    std::vector<std::tuple<double, int, int>> offsets;
    for (int i = -n; i <= n; ++i)
        for (int j = -n; j <= n; ++j)
            if (i * i + j * j <= n * n) offsets.emplace_back(std::hypot(i, j), i, j);
    std::sort(offsets.begin(), offsets.end());

    int tried = 0, rejected_inside = 0, rejected_kernel = 0, rejected_visibility = 0;
    for (double r_used = r; r_used >= opts.r_min; r_used *= 0.5) {
        std::vector<StarPolygon> contracted;
        std::vector<std::vector<Point2>> samples;
        for (const auto& p : parts) {
            contracted.push_back(p.contract(r_used));
            samples.push_back(boundary_samples(contracted.back(), opts.boundary_samples));
        }
        auto accept = [&](Point2 q, bool& kernel) {
            ++tried;
            if (!point_strictly_inside(whole.vertices(), q, 1e-9)) return false;
            kernel = in_open_kernel(whole, q);
            if (opts.require_kernel && !kernel) {
                ++rejected_kernel;
                return false;
            }
            for (const auto& c : contracted) {
                if (point_in_polygon(c.vertices(), q, 1e-9)) {
                    ++rejected_inside;
                    return false;
                }
            }
            if (kernel) return true;
            for (std::size_t k = 0; k < samples.size(); ++k)
                for (const auto& x : samples[k])
                    if (!segment_inside(whole.vertices(), q, x)) {
                        ++rejected_visibility;
                        return false;
                    }
            for (const auto& c : contracted)
                for (std::size_t e = 0; e < c.size(); ++e)
                    if (!triangle_inside(whole.vertices(), q, c.vertex(e), c.vertex(e + 1))) {
                        ++rejected_visibility;
                        return false;
                    }
            return true;
        };

        double delta = 0.2 * whole.inradius();
        for (int level = 0; level <= opts.delta_halvings; ++level, delta *= 0.5) {
            for (const auto& [dist, i, j] : offsets) {
                if (level > 0 && i == 0 && j == 0) continue;
                const Point2 q = whole.center() + (delta / n) * Point2{static_cast<double>(i), static_cast<double>(j)};
                bool kernel = false;
                if (accept(q, kernel)) return {q, r_used, kernel};
            }
        }

        // Points on the part boundaries never lie in a contracted part; try
        // those farthest from every contracted part first.
        std::vector<std::pair<double, Point2>> seams;
        for (const auto& p : parts) {
            for (std::size_t e = 0; e < p.size(); ++e) {
                for (int k = 0; k < 8; ++k) {
                    const Point2 q = lerp(p.vertex(e), p.vertex(e + 1), k / 8.0);
                    if (!point_strictly_inside(whole.vertices(), q, 1e-9)) continue;
                    double sep = std::numeric_limits<double>::infinity();
                    for (const auto& c : contracted) {
                        const double d = point_in_polygon(c.vertices(), q, 0.0) ? 0.0 : boundary_distance(c.vertices(), q);
                        sep = std::min(sep, d);
                    }
                    seams.emplace_back(-sep, q);
                }
            }
        }
        std::sort(seams.begin(), seams.end(), [](const auto& a, const auto& b) {
            return a.first < b.first || (a.first == b.first && (a.second.x < b.second.x || (a.second.x == b.second.x && a.second.y < b.second.y)));
        });
        for (const auto& [neg_sep, q] : seams) {
            bool kernel = false;
            if (accept(q, kernel)) return {q, r_used, kernel};
        }
    }
    std::ostringstream msg;
    msg << "find_witness_point: no witness point found down to r = " << opts.r_min << " (candidates " << tried
        << ", inside contracted parts " << rejected_inside << ", outside kernel " << rejected_kernel
        << ", visibility failures " << rejected_visibility << ")";
    throw GeometryError(msg.str());
}

}  // namespace startile
