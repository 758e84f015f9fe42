#include "startile/plane_map.hpp"

namespace startile {

PlaneMap& PlaneMap::then(LayerPtr layer) {
    if (layer) layers_.push_back(std::move(layer));
    return *this;
}

PlaneMap& PlaneMap::then(const PlaneMap& next) {
    layers_.insert(layers_.end(), next.layers_.begin(), next.layers_.end());
    return *this;
}

Point2 PlaneMap::apply(Point2 x) const {
    for (const auto& layer : layers_) x = layer->apply(x);
    return x;
}

std::vector<Polygon> PlaneMap::fixed_boundaries() const {
    std::vector<Polygon> out;
    for (const auto& layer : layers_) {
        auto f = layer->fixed_boundaries();
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

ConjugatedLayer::ConjugatedLayer(PlaneMap inner, Similarity frame)
    : inner_(std::move(inner)), frame_(frame), inverse_(frame.inverse()) {}

std::vector<Polygon> ConjugatedLayer::fixed_boundaries() const {
    std::vector<Polygon> out;
    for (const auto& p : inner_.fixed_boundaries()) out.push_back(transform(p, frame_));
    return out;
}

std::array<double, 4> numerical_derivative(const PlaneMap& map, Point2 x, double h) {
    for (int attempt = 0;; ++attempt) {
        try {
            const Point2 dx = map(x + Point2{h, 0}) - map(x - Point2{h, 0});
            const Point2 dy = map(x + Point2{0, h}) - map(x - Point2{0, h});
            const double s = 0.5 / h;
            return {dx.x * s, dy.x * s, dx.y * s, dy.y * s};
        } catch (const DomainError&) {
            if (attempt >= 1) throw;
            h *= 0.25;
        }
    }
}

double numerical_jacobian(const PlaneMap& map, Point2 x, double h) {
    const auto d = numerical_derivative(map, x, h);
    return d[0] * d[3] - d[1] * d[2];
}

std::vector<Point2> sample_boundary(const Polygon& poly, int count) {
    std::vector<Point2> out;
    if (poly.empty() || count <= 0) return out;
    const std::size_t n = poly.size();
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) cum[k + 1] = cum[k] + distance(poly[k], poly[(k + 1) % n]);
    std::size_t k = 0;
    for (int i = 0; i < count; ++i) {
        const double s = cum[n] * (i + 0.5) / count;
        while (k + 1 < n && cum[k + 1] < s) ++k;
        const double len = cum[k + 1] - cum[k];
        out.push_back(lerp(poly[k], poly[(k + 1) % n], len > 0 ? (s - cum[k]) / len : 0.0));
    }
    return out;
}

}  // namespace startile
