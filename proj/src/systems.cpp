#include "startile/systems.hpp"

#include <cmath>

namespace startile {

namespace {

Point2 centroid(const Polygon& p) {
    Point2 c{};
    for (const auto& v : p) c = c + v;
    return (1.0 / static_cast<double>(p.size())) * c;
}

Similarity rotation_then(double angle, Point2 t) { return {1.0, angle, false, t}; }

}  // namespace

SubstitutionSystem chair_system() {
    SubstitutionSystem sys;
    sys.name = "chair";
    sys.xi = 2.0;
    const Polygon chair{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    sys.prototiles.push_back({0, "chair", StarPolygon(chair, {0.5, 0.5})});
    sys.rules.push_back({
        {0, Similarity::identity()},
        {0, Similarity::translate({1, 1})},
        {0, rotation_then(kPi / 2, {4, 0})},
        {0, rotation_then(-kPi / 2, {0, 4})},
    });
    return sys;
}

SubstitutionSystem squares_system() {
    SubstitutionSystem sys;
    sys.name = "squares";
    sys.xi = 2.0;
    sys.prototiles.push_back({0, "square", StarPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {0.5, 0.5})});
    sys.rules.push_back({
        {0, Similarity::translate({0, 0})},
        {0, Similarity::translate({1, 0})},
        {0, Similarity::translate({0, 1})},
        {0, Similarity::translate({1, 1})},
    });
    return sys;
}

SubstitutionSystem penrose_system() {
    const double phi = kGolden;
    const double d18 = kPi / 10;
    const Polygon acute{{0, 0}, {phi * std::cos(-d18), phi * std::sin(-d18)}, {phi * std::cos(d18), phi * std::sin(d18)}};
    const Polygon obtuse{{0, 0}, {phi, 0}, {phi / 2, phi / 2 * std::tan(kPi / 5)}};

    SubstitutionSystem sys;
    sys.name = "penrose";
    sys.xi = phi;
    sys.prototiles.push_back({penrose::acute, "half-kite", StarPolygon(acute, centroid(acute))});
    sys.prototiles.push_back({penrose::obtuse, "half-dart", StarPolygon(obtuse, centroid(obtuse))});

    auto place = [](const Polygon& proto, Point2 a, Point2 b, Point2 c) {
        return Similarity::from_triangles({proto[0], proto[1], proto[2]}, {a, b, c});
    };

    // Inflated half-kite: the axis runs tip -> tail.
    {
        const Point2 a = phi * acute[penrose::tip];
        const Point2 b = phi * acute[penrose::tail];
        const Point2 c = phi * acute[penrose::side];
        // The half-dart sits on the long side with its nose at the tip.
        const Point2 w = a + (1.0 / phi) * (b - a);
        const Point2 r = a + (1.0 / (phi * phi)) * (c - a);
        sys.rules.push_back({
            {penrose::acute, place(acute, c, w, b)},
            {penrose::acute, place(acute, c, w, r)},
            {penrose::obtuse, place(obtuse, a, w, r)},
        });
    }
    // Inflated half-dart: the axis runs nose -> reflex.
    {
        const Point2 y = phi * obtuse[penrose::nose];
        const Point2 z = phi * obtuse[penrose::wing];
        const Point2 x = phi * obtuse[penrose::reflex];
        const Point2 e = y + (1.0 / phi) * (z - y);
        sys.rules.push_back({
            {penrose::acute, place(acute, y, x, e)},
            {penrose::obtuse, place(obtuse, z, x, e)},
        });
    }
    return sys;
}

std::vector<std::string> builtin_names() { return {"chair", "squares", "penrose"}; }

SubstitutionSystem builtin_system(const std::string& name) {
    if (name == "chair") return chair_system();
    if (name == "squares") return squares_system();
    if (name == "penrose") return penrose_system();
    throw ValidationError("unknown built-in system '" + name + "'");
}

}  // namespace startile
