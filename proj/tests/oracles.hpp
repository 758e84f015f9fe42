#pragma once

// Brute-force reference computations, kept independent of the library so the
// tests do not grade the code against itself.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "startile/geometry.hpp"
#include "startile/plane_map.hpp"

namespace oracle {

using startile::Point2;

inline double shoelace(const std::vector<Point2>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& a = p[i];
        const auto& b = p[(i + 1) % p.size()];
        s += a.x * b.y - a.y * b.x;
    }
    return 0.5 * s;
}

// Even-odd ray casting; boundary points are unspecified.
inline bool inside(const std::vector<Point2>& poly, Point2 q) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

inline double dist_to_boundary(const std::vector<Point2>& poly, Point2 q) {
    double best = 1e300;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const Point2 ab{b.x - a.x, b.y - a.y};
        double t = ((q.x - a.x) * ab.x + (q.y - a.y) * ab.y) / (ab.x * ab.x + ab.y * ab.y);
        t = std::fmax(0.0, std::fmin(1.0, t));
        best = std::fmin(best, std::hypot(a.x + t * ab.x - q.x, a.y + t * ab.y - q.y));
    }
    return best;
}

// Segment visibility by dense sampling: every sample strictly inside or within
// `tol` of the boundary.
inline bool segment_visible(const std::vector<Point2>& poly, Point2 a, Point2 b, int steps = 400, double tol = 1e-9) {
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const Point2 p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        if (!inside(poly, p) && dist_to_boundary(poly, p) > tol) return false;
    }
    return true;
}

inline std::vector<Point2> uniform_in(const std::vector<Point2>& poly, int count, std::uint64_t seed) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& v : poly) {
        x0 = std::fmin(x0, v.x), y0 = std::fmin(y0, v.y);
        x1 = std::fmax(x1, v.x), y1 = std::fmax(y1, v.y);
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::vector<Point2> out;
    while (static_cast<int>(out.size()) < count) {
        const Point2 p{ux(rng), uy(rng)};
        if (inside(poly, p)) out.push_back(p);
    }
    return out;
}

// Forward-difference-free central Jacobian determinant.
template <class F>
double jacobian(const F& f, Point2 x, double h) {
    const Point2 px = f(Point2{x.x + h, x.y}), mx = f(Point2{x.x - h, x.y});
    const Point2 py = f(Point2{x.x, x.y + h}), my = f(Point2{x.x, x.y - h});
    const double a = (px.x - mx.x) / (2 * h), c = (px.y - mx.y) / (2 * h);
    const double b = (py.x - my.x) / (2 * h), d = (py.y - my.y) / (2 * h);
    return a * d - b * c;
}

inline double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

using Matrix = std::vector<std::vector<long long>>;

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c(a.size(), std::vector<long long>(b[0].size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Matrix power(const Matrix& m, int e) {
    Matrix r(m.size(), std::vector<long long>(m.size(), 0));
    for (std::size_t i = 0; i < m.size(); ++i) r[i][i] = 1;
    for (int k = 0; k < e; ++k) r = multiply(m, r);
    return r;
}

}  // namespace oracle
