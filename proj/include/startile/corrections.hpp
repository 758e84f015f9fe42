#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "startile/errors.hpp"
#include "startile/geometry.hpp"
#include "startile/plane_map.hpp"
#include "startile/starmap.hpp"

namespace startile {

/// Piecewise-linear function on [0, 1]; a repeated knot is a jump.
class Profile {
public:
    Profile(std::vector<double> knots, std::vector<double> values);
    static Profile constant(double v) { return Profile({0.0, 1.0}, {v, v}); }
    // base + height * max(0, (r - s) / r)
    static Profile hat(double base, double height, double r);
    // base outside [a, b], rising linearly to base + height at the midpoint.
    static Profile tent(double base, double height, double a, double b);
    // `inner` on [0, at], `outer` on (at, 1].
    static Profile step(double inner, double outer, double at);

    double operator()(double s) const;
    // ∫_0^s p(t) t dt
    double moment(double s) const;
    double total_moment() const { return cumulative_.back(); }
    // s with moment(s) = m.
    double inverse_moment(double m) const;

    double min() const;
    double max() const;
    // Infinite when the profile jumps.
    double lipschitz() const;
    bool is_constant() const;
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> cumulative_;  // moment at each knot
    double segment_moment(std::size_t k, double x) const;
};

/// Density constant on the elevation lines of a star polygon; `outside`
/// applies beyond it.
struct ElevationDensity {
    StarPolygon domain;
    Profile profile = Profile::constant(1.0);
    double outside = 1.0;

    double operator()(Point2 x) const;
    // Integral over the domain: 2|D| ∫ p(s) s ds.
    double integral() const { return 2.0 * domain.area() * profile.total_moment(); }
};

/// Piecewise density: each part carries an elevation profile, `base` elsewhere
/// in the enclosing region.
struct PartwiseDensity {
    std::vector<ElevationDensity> parts;
    double base = 1.0;

    double operator()(Point2 x) const;
    double integral() const;
    double max() const;
};

// The explicit radial profile on S_1 = [-1, 1]^2 that pushes h forward to the
// constant 1: g(r) = ½ sqrt(∫_{S_r} h), with ∫_{S_r} h = 8 ∫_0^r h(t) t dt.
double square_g(const Profile& h, double r);

/// Map of a star polygon D onto itself that fixes ∂D, preserves every ray from
/// the center and has Jacobian h1(x) / h2(φ(x)), where h1, h2 are profiles in
/// D's elevation coordinate with equal integrals.
class RadialEqualizer : public MapLayer {
public:
    RadialEqualizer(StarPolygon domain, Profile h1, Profile h2);

    Point2 apply(Point2 x) const override;
    std::string label() const override { return "radial_equalizer"; }
    std::vector<Polygon> fixed_boundaries() const override { return {domain_.vertices()}; }

    // Elevation of φ(x) for a point of elevation s.
    double image_elevation(double s) const;
    double target_jacobian(Point2 x) const;
    bool is_identity() const { return identity_; }
    const StarPolygon& domain() const { return domain_; }

private:
    StarPolygon domain_;
    ElevationMap elevation_;
    Profile h1_;
    Profile h2_;
    bool identity_ = false;
};

/// Radial equalizers on the parts of a partition; the identity elsewhere.
class PartwiseLayer : public MapLayer {
public:
    explicit PartwiseLayer(std::vector<std::shared_ptr<const RadialEqualizer>> maps) : maps_(std::move(maps)) {}
    Point2 apply(Point2 x) const override;
    std::string label() const override { return "partwise_equalizer"; }
    std::vector<Polygon> fixed_boundaries() const override;

private:
    std::vector<std::shared_ptr<const RadialEqualizer>> maps_;
};

/// A = S minus the contraction of S by `inner_ratio` about its center.
struct StarAnnulus {
    StarPolygon outer;
    double inner_ratio = 0.5;

    bool contains(Point2 x) const;
    double area() const { return outer.area() * (1.0 - inner_ratio * inner_ratio); }
    StarPolygon inner() const { return outer.contract(inner_ratio); }
};

struct FlowOptions {
    int grid = 256;
    int steps = 64;
    // Allowed relative mismatch of the sampled masses before they are rebalanced.
    double mass_tolerance = 1e-2;
};

struct FlowDiagnostics {
    double mass1 = 0.0;
    double mass2 = 0.0;
    double rescale = 1.0;      // factor applied to the sampled g2
    double transported = 0.0;  // ∫ (g1 - g2)^+
    double grid_scale = 0.0;
    bool identity = false;
};

/// Moser flow on a star annulus carrying density g1 to g2: Jacobian
/// g1(x) / g2(φ(x)), the identity on ∂A and outside A.
///
/// Works in the pulled-back coordinates (σ, θ) of the outer elevation map,
/// where both densities are sampled on a grid and interpolated bilinearly. The
/// velocity field solves div v = G1 - G2 in closed form per cell and vanishes
/// on σ = r_in and σ = 1, so the boundary is fixed exactly.
class AnnulusFlow : public MapLayer {
public:
    AnnulusFlow(StarAnnulus annulus, const std::function<double(Point2)>& g1, const std::function<double(Point2)>& g2,
                FlowOptions options = {});

    Point2 apply(Point2 x) const override;
    std::string label() const override { return "annulus_flow"; }
    std::vector<Polygon> fixed_boundaries() const override;

    Polar flow(Polar p) const;
    const FlowDiagnostics& diagnostics() const { return diag_; }
    double grid_scale() const { return diag_.grid_scale; }
    const StarAnnulus& annulus() const { return annulus_; }

private:
    struct Cell {
        std::size_t i, j, j1;
        double alpha, beta;
    };
    Cell locate(double sigma, double theta) const;
    Point2 velocity(double sigma, double theta, double t) const;

    StarAnnulus annulus_;
    ElevationMap elevation_;
    FlowOptions options_;
    FlowDiagnostics diag_;
    std::size_t ns_ = 0, nt_ = 0;
    double a_ = 0.0, hs_ = 0.0, ht_ = 0.0;
    std::vector<double> g1_, g2_, f_, c_;  // nodal, index i * nt + j
    std::vector<double> m_, mm_;          // per θ node
};

// f2 for a partition with per-part values f (already normalized): min f
// outside the contracted parts, a hat min f + c_i max(0, (r - s)/r) in part i
// with c_i = 3 (f_i - min f) / r^2 so that each part keeps its mass.
PartwiseDensity build_f2(const StarPolygon& whole, const std::vector<StarPolygon>& parts, const std::vector<double>& f,
                         double r);

// f3 on S: min f off the annulus, a tent in S's elevation on [r_in, 1] carrying
// the excess mass of f2. Throws GeometryError when the contracted parts are not
// inside the annulus or S is not inside T.
ElevationDensity build_f3(const StarPolygon& whole, const StarAnnulus& annulus, const PartwiseDensity& f2, double r);

struct CorrectorOptions {
    double r = 0.8;               // contraction of the parts
    double inner_fraction = 0.5;  // r_in as a fraction of the largest admissible one
    FlowOptions flow;
    int check_samples = 256;
    double radial_tolerance = 1e-3;
    double flow_tolerance = 1e-2;
    std::uint64_t seed = 42;
    WitnessOptions witness;
};

struct StageReport {
    std::string stage;
    bool identity = false;
    int samples = 0;
    double median = 0.0;  // relative Jacobian residual
    double p90 = 0.0;
    double boundary_displacement = 0.0;
};

struct CorrectorReport {
    double normalization = 1.0;  // |T| / ∫ f
    double min_f = 1.0;          // min of the normalized f
    Point2 q{};
    double r = 0.0;
    double r_in = 0.0;
    double f2_peak = 0.0;
    double f3_peak = 0.0;
    FlowDiagnostics flow;
    std::vector<StageReport> stages;
    bool identity = false;
};

struct TileCorrector {
    PlaneMap map;
    CorrectorReport report;
};

/// ψ = ψ3 o ψ2 o ψ1 on T with Jacobian (|T| / ∫_T f) f, fixing ∂T. `f` holds
/// the constant value of the density on each part.
TileCorrector tile_corrector(const StarPolygon& whole, const std::vector<StarPolygon>& parts,
                             const std::vector<double>& f, const CorrectorOptions& options = {});

struct ResidualSummary {
    int samples = 0;
    double median = 0.0;
    double p90 = 0.0;
    double max = 0.0;
};

ResidualSummary summarize(std::vector<double> residuals);

}  // namespace startile
