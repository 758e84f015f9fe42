#include "startile/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace startile {

namespace {

using cplx = std::complex<double>;

cplx to_c(Point2 p) { return {p.x, p.y}; }
Point2 to_p(cplx z) { return {z.real(), z.imag()}; }
cplx conj_if(bool r, cplx z) { return r ? std::conj(z) : z; }

cplx multiplier(const Similarity& s) { return std::polar(s.scale, s.rotation); }

Similarity from_affine(cplx a, cplx b, bool reflect) { return {std::abs(a), std::arg(a), reflect, to_p(b)}; }

}  // namespace

Similarity Similarity::from_triangles(const std::array<Point2, 3>& src, const std::array<Point2, 3>& dst,
                                      double tol) {
    const cplx p0 = to_c(src[0]), p1 = to_c(src[1]), p2 = to_c(src[2]);
    const cplx q0 = to_c(dst[0]), q1 = to_c(dst[1]), q2 = to_c(dst[2]);
    const double size = std::max(std::abs(q1 - q0), std::abs(q2 - q0));
    for (bool reflect : {false, true}) {
        const cplx a = (q1 - q0) / conj_if(reflect, p1 - p0);
        const cplx b = q0 - a * conj_if(reflect, p0);
        if (std::abs(a * conj_if(reflect, p2) + b - q2) <= tol * size) return from_affine(a, b, reflect);
    }
    throw GeometryError("Similarity::from_triangles: triangles are not similar");
}

Point2 Similarity::apply(Point2 p) const {
    return to_p(multiplier(*this) * conj_if(reflect, to_c(p)) + to_c(translation));
}

Similarity Similarity::compose(const Similarity& inner) const {
    const cplx a1 = multiplier(*this), b1 = to_c(translation);
    const cplx a2 = multiplier(inner), b2 = to_c(inner.translation);
    return from_affine(a1 * conj_if(reflect, a2), a1 * conj_if(reflect, b2) + b1, reflect != inner.reflect);
}

Similarity Similarity::inverse() const {
    const cplx a = multiplier(*this), b = to_c(translation);
    return from_affine(conj_if(reflect, 1.0 / a), -conj_if(reflect, b / a), reflect);
}

std::array<double, 4> Similarity::linear() const {
    const double c = scale * std::cos(rotation);
    const double s = scale * std::sin(rotation);
    const double f = reflect ? -1.0 : 1.0;
    return {c, -s * f, s, c * f};
}

Polygon transform(const Polygon& poly, const Similarity& s) {
    Polygon out;
    out.reserve(poly.size());
    for (const auto& p : poly) out.push_back(s(p));
    if (s.reflect && out.size() > 2) std::reverse(out.begin() + 1, out.end());
    return out;
}

StarPolygon transform(const StarPolygon& poly, const Similarity& s) {
    return StarPolygon(transform(poly.vertices(), s), s(poly.center()));
}

}  // namespace startile
