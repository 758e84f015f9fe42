#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "startile/geometry.hpp"
#include "startile/similarity.hpp"

namespace startile {

/// One piecewise-defined homeomorphism in a PlaneMap stack. A layer is the
/// identity outside its region of action.
class MapLayer {
public:
    virtual ~MapLayer() = default;
    virtual Point2 apply(Point2 x) const = 0;
    virtual std::string label() const = 0;
    // Polygons whose boundaries the layer fixes pointwise.
    virtual std::vector<Polygon> fixed_boundaries() const { return {}; }
};

using LayerPtr = std::shared_ptr<const MapLayer>;

/// Composition of layers; the first layer pushed acts first.
class PlaneMap {
public:
    PlaneMap() = default;
    explicit PlaneMap(LayerPtr layer) { then(std::move(layer)); }

    PlaneMap& then(LayerPtr layer);
    PlaneMap& then(const PlaneMap& next);

    Point2 apply(Point2 x) const;
    Point2 operator()(Point2 x) const { return apply(x); }

    bool is_identity() const { return layers_.empty(); }
    const std::vector<LayerPtr>& layers() const { return layers_; }
    std::vector<Polygon> fixed_boundaries() const;

private:
    std::vector<LayerPtr> layers_;
};

// x -> A x + b with A row major.
class LinearLayer : public MapLayer {
public:
    LinearLayer(std::array<double, 4> a, Point2 b = {}) : a_(a), b_(b) {}
    Point2 apply(Point2 x) const override { return {a_[0] * x.x + a_[1] * x.y + b_.x, a_[2] * x.x + a_[3] * x.y + b_.y}; }
    std::string label() const override { return "linear"; }

private:
    std::array<double, 4> a_;
    Point2 b_;
};

class FunctionLayer : public MapLayer {
public:
    FunctionLayer(std::function<Point2(Point2)> fn, std::string label) : fn_(std::move(fn)), label_(std::move(label)) {}
    Point2 apply(Point2 x) const override { return fn_(x); }
    std::string label() const override { return label_; }

private:
    std::function<Point2(Point2)> fn_;
    std::string label_;
};

// frame o inner o frame^-1: a map built in a canonical frame moved into place.
class ConjugatedLayer : public MapLayer {
public:
    ConjugatedLayer(PlaneMap inner, Similarity frame);
    Point2 apply(Point2 x) const override { return frame_(inner_(inverse_(x))); }
    std::string label() const override { return "conjugated"; }
    std::vector<Polygon> fixed_boundaries() const override;

private:
    PlaneMap inner_;
    Similarity frame_;
    Similarity inverse_;
};

// Central-difference derivative, row major.
std::array<double, 4> numerical_derivative(const PlaneMap& map, Point2 x, double h);

// Central-difference Jacobian determinant. When an evaluation leaves the
// domain the step is retried at h/4, then DomainError propagates.
double numerical_jacobian(const PlaneMap& map, Point2 x, double h);

// `count` points spread along the boundary by arc length.
std::vector<Point2> sample_boundary(const Polygon& poly, int count);

}  // namespace startile
