#include "startile/corrections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace startile {

namespace {

// Elevation of x in a star polygon: 1 on the boundary, > 1 outside.
double elevation(const StarPolygon& d, Point2 x) {
    const Point2 c = d.center();
    const double r = distance(x, c);
    if (r == 0.0) return 0.0;
    return r / distance(d.boundary_point(d.angle_of(x)), c);
}

double wrap(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a >= kTwoPi ? 0.0 : a;
}

}  // namespace

// ---------------------------------------------------------------- Profile

Profile::Profile(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() < 2 || knots_.size() != values_.size()) throw ValidationError("profile: need matching knots and values");
    if (knots_.front() != 0.0 || knots_.back() != 1.0) throw ValidationError("profile: knots must span [0, 1]");
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        if (!std::isfinite(values_[k])) throw ValidationError("profile: non-finite value");
        if (k > 0 && knots_[k] < knots_[k - 1]) throw ValidationError("profile: knots must be nondecreasing");
    }
    cumulative_.assign(knots_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) cumulative_[k + 1] = cumulative_[k] + segment_moment(k, knots_[k + 1]);
}

Profile Profile::hat(double base, double height, double r) {
    if (!(r > 0 && r < 1)) throw ValidationError("hat profile: support radius must lie in (0, 1)");
    return Profile({0.0, r, 1.0}, {base + height, base, base});
}

Profile Profile::tent(double base, double height, double a, double b) {
    if (!(a >= 0 && a < b && b <= 1)) throw ValidationError("tent profile: need 0 <= a < b <= 1");
    const double mid = 0.5 * (a + b);
    return Profile({0.0, a, mid, b, 1.0}, {base, base, base + height, base, base});
}

Profile Profile::step(double inner, double outer, double at) {
    if (!(at > 0 && at < 1)) throw ValidationError("step profile: jump must lie in (0, 1)");
    return Profile({0.0, at, at, 1.0}, {inner, inner, outer, outer});
}

double Profile::segment_moment(std::size_t k, double x) const {
    const double a = knots_[k], b = knots_[k + 1];
    if (b <= a) return 0.0;
    const double slope = (values_[k + 1] - values_[k]) / (b - a);
    const double alpha = values_[k] - slope * a;
    return alpha * (x * x - a * a) / 2.0 + slope * (x * x * x - a * a * a) / 3.0;
}

double Profile::operator()(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
    k = std::min(k, knots_.size() - 2);
    while (k > 0 && knots_[k + 1] <= knots_[k]) --k;
    const double a = knots_[k], b = knots_[k + 1];
    if (b <= a) return values_[k + 1];
    return values_[k] + (values_[k + 1] - values_[k]) * (s - a) / (b - a);
}

double Profile::moment(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
    k = std::min(k, knots_.size() - 2);
    return cumulative_[k] + segment_moment(k, s);
}

double Profile::inverse_moment(double m) const {
    const double total = cumulative_.back();
    if (m <= 0) return 0.0;
    if (m >= total) return 1.0;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), m);
    std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin() - 1, 0));
    k = std::min(k, knots_.size() - 2);
    const double target = m - cumulative_[k];
    double lo = knots_[k], hi = knots_[k + 1];
    const double pa = (*this)(lo);
    double x = pa > 0 ? std::sqrt(lo * lo + 2.0 * target / pa) : 0.5 * (lo + hi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int it2 = 0; it2 < 200; ++it2) {
        const double fx = segment_moment(k, x) - target;
        if (fx == 0.0) break;
        if (fx > 0) hi = x;
        else lo = x;
        const double d = (*this)(x) * x;
        double next = d > 0 ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-16 * std::max(1.0, x) || hi - lo <= 1e-16) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

double Profile::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Profile::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Profile::lipschitz() const {
    double lip = 0.0;
    for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
        const double dv = std::abs(values_[k + 1] - values_[k]);
        const double ds = knots_[k + 1] - knots_[k];
        if (ds <= 0) {
            if (dv > 0) return std::numeric_limits<double>::infinity();
            continue;
        }
        lip = std::max(lip, dv / ds);
    }
    return lip;
}

bool Profile::is_constant() const { return min() == max(); }

// ---------------------------------------------------------------- densities

double ElevationDensity::operator()(Point2 x) const {
    const double s = elevation(domain, x);
    return s <= 1.0 ? profile(s) : outside;
}

double PartwiseDensity::operator()(Point2 x) const {
    for (const auto& p : parts) {
        const double s = elevation(p.domain, x);
        if (s <= 1.0) return p.profile(s);
    }
    return base;
}

double PartwiseDensity::integral() const {
    double total = 0.0;
    for (const auto& p : parts) total += p.integral();
    return total;
}

double PartwiseDensity::max() const {
    double m = base;
    for (const auto& p : parts) m = std::max(m, p.profile.max());
    return m;
}

double square_g(const Profile& h, double r) { return 0.5 * std::sqrt(8.0 * h.moment(r)); }

// ---------------------------------------------------------------- radial equalizer

RadialEqualizer::RadialEqualizer(StarPolygon domain, Profile h1, Profile h2)
    : domain_(std::move(domain)), elevation_(domain_), h1_(std::move(h1)), h2_(std::move(h2)) {
    if (!(h1_.min() > 0) || !(h2_.min() > 0)) throw ValidationError("radial_equalizer: profiles must be strictly positive");
    const double i1 = h1_.total_moment(), i2 = h2_.total_moment();
    if (std::abs(i1 - i2) > 1e-9 * std::max(i1, i2)) {
        std::ostringstream msg;
        msg << "radial_equalizer: integrals differ (" << 2 * domain_.area() * i1 << " vs " << 2 * domain_.area() * i2 << ")";
        throw ValidationError(msg.str());
    }
    identity_ = h1_.knots() == h2_.knots() && h1_.values() == h2_.values();
    if (!identity_ && h1_.is_constant() && h2_.is_constant()) identity_ = h1_.min() == h2_.min();
}

double RadialEqualizer::image_elevation(double s) const {
    if (identity_) return s;
    return h2_.inverse_moment(h1_.moment(s));
}

Point2 RadialEqualizer::apply(Point2 x) const {
    if (identity_) return x;
    const double s = elevation(domain_, x);
    if (s == 0.0 || s >= 1.0) return x;
    const Point2 c = domain_.center();
    return c + (image_elevation(s) / s) * (x - c);
}

double RadialEqualizer::target_jacobian(Point2 x) const {
    const double s = std::min(elevation(domain_, x), 1.0);
    return h1_(s) / h2_(image_elevation(s));
}

Point2 PartwiseLayer::apply(Point2 x) const {
    for (const auto& m : maps_) {
        const double s = elevation(m->domain(), x);
        if (s < 1.0) return m->apply(x);
    }
    return x;
}

std::vector<Polygon> PartwiseLayer::fixed_boundaries() const {
    std::vector<Polygon> out;
    for (const auto& m : maps_) out.push_back(m->domain().vertices());
    return out;
}

bool StarAnnulus::contains(Point2 x) const {
    const double s = elevation(outer, x);
    return s >= inner_ratio && s <= 1.0;
}

// ---------------------------------------------------------------- annulus flow

AnnulusFlow::AnnulusFlow(StarAnnulus annulus, const std::function<double(Point2)>& g1,
                         const std::function<double(Point2)>& g2, FlowOptions options)
    : annulus_(std::move(annulus)), elevation_(annulus_.outer), options_(options) {
    if (!(annulus_.inner_ratio > 0 && annulus_.inner_ratio < 1)) throw ValidationError("annulus_transport: inner ratio must lie in (0, 1)");
    if (options_.grid < 4 || options_.steps < 1) throw ValidationError("annulus_transport: grid and step counts too small");
    a_ = annulus_.inner_ratio;
    ns_ = static_cast<std::size_t>(options_.grid) + 1;
    nt_ = static_cast<std::size_t>(options_.grid);
    hs_ = (1.0 - a_) / options_.grid;
    ht_ = kTwoPi / options_.grid;
    double rmax = 0.0;
    for (const auto& v : annulus_.outer.vertices()) rmax = std::max(rmax, distance(v, annulus_.outer.center()));
    diag_.grid_scale = std::max(hs_, ht_) * rmax;

    g1_.resize(ns_ * nt_);
    g2_.resize(ns_ * nt_);
    for (std::size_t i = 0; i < ns_; ++i) {
        const double sigma = a_ + hs_ * static_cast<double>(i);
        for (std::size_t j = 0; j < nt_; ++j) {
            const Point2 x = elevation_.forward_polar(sigma, ht_ * static_cast<double>(j));
            const double v1 = g1(x), v2 = g2(x);
            if (!(v1 > 0) || !(v2 > 0)) throw ValidationError("annulus_transport: densities must be strictly positive");
            g1_[i * nt_ + j] = sigma * v1;
            g2_[i * nt_ + j] = sigma * v2;
        }
    }
    // Trapezoid in σ, periodic sum in θ: the exact integral of the bilinear interpolant.
    auto integral = [&](const std::vector<double>& g) {
        double total = 0.0;
        for (std::size_t i = 0; i < ns_; ++i) {
            const double w = (i == 0 || i + 1 == ns_) ? 0.5 : 1.0;
            for (std::size_t j = 0; j < nt_; ++j) total += w * g[i * nt_ + j];
        }
        return total * hs_ * ht_ * elevation_.jacobian();
    };
    diag_.mass1 = integral(g1_);
    diag_.mass2 = integral(g2_);
    if (std::abs(diag_.mass1 - diag_.mass2) > options_.mass_tolerance * diag_.mass1) {
        std::ostringstream msg;
        msg << "annulus_transport: masses differ (" << diag_.mass1 << " vs " << diag_.mass2 << ")";
        throw ValidationError(msg.str());
    }
    diag_.rescale = diag_.mass1 / diag_.mass2;
    for (auto& v : g2_) v *= diag_.rescale;

    f_.resize(ns_ * nt_);
    double positive = 0.0;
    bool zero = true;
    for (std::size_t k = 0; k < f_.size(); ++k) {
        f_[k] = g1_[k] - g2_[k];
        if (std::abs(f_[k]) > 1e-14 * g1_[k]) zero = false;
    }
    for (std::size_t i = 0; i < ns_; ++i) {
        const double w = (i == 0 || i + 1 == ns_) ? 0.5 : 1.0;
        for (std::size_t j = 0; j < nt_; ++j) positive += w * std::max(0.0, f_[i * nt_ + j]);
    }
    diag_.transported = positive * hs_ * ht_ * elevation_.jacobian();
    diag_.identity = zero;

    c_.assign(ns_ * nt_, 0.0);
    for (std::size_t j = 0; j < nt_; ++j)
        for (std::size_t i = 1; i < ns_; ++i)
            c_[i * nt_ + j] = c_[(i - 1) * nt_ + j] + 0.5 * hs_ * (f_[(i - 1) * nt_ + j] + f_[i * nt_ + j]);
    m_.resize(nt_ + 1);
    for (std::size_t j = 0; j < nt_; ++j) m_[j] = c_[(ns_ - 1) * nt_ + j];
    m_[nt_] = m_[0];
    mm_.assign(nt_ + 1, 0.0);
    for (std::size_t j = 0; j < nt_; ++j) mm_[j + 1] = mm_[j] + 0.5 * ht_ * (m_[j] + m_[j + 1]);
    // Remove the rounding residue of the total so M is periodic.
    const double drift = mm_[nt_];
    for (std::size_t j = 0; j <= nt_; ++j) mm_[j] -= drift * static_cast<double>(j) / static_cast<double>(nt_);
}

AnnulusFlow::Cell AnnulusFlow::locate(double sigma, double theta) const {
    const double u = std::clamp((sigma - a_) / hs_, 0.0, static_cast<double>(ns_ - 1));
    std::size_t i = std::min(static_cast<std::size_t>(u), ns_ - 2);
    const double v = wrap(theta) / ht_;
    std::size_t j = std::min(static_cast<std::size_t>(v), nt_ - 1);
    return {i, j, (j + 1) % nt_, u - static_cast<double>(i), v - static_cast<double>(j)};
}

Point2 AnnulusFlow::velocity(double sigma, double theta, double t) const {
    const Cell c = locate(sigma, theta);
    const std::size_t r0 = c.i * nt_, r1 = (c.i + 1) * nt_;
    auto interp_theta = [&](const std::vector<double>& g, std::size_t row) {
        return (1 - c.beta) * g[row + c.j] + c.beta * g[row + c.j1];
    };
    const double f0 = interp_theta(f_, r0), f1 = interp_theta(f_, r1);
    const double cum = interp_theta(c_, r0) + hs_ * (c.alpha * f0 + 0.5 * c.alpha * c.alpha * (f1 - f0));
    const double mj = m_[c.j], mj1 = m_[c.j + 1];
    const double mh = (1 - c.beta) * mj + c.beta * mj1;
    const double big_m = mm_[c.j] + ht_ * (c.beta * mj + 0.5 * c.beta * c.beta * (mj1 - mj));
    const double u = std::clamp((sigma - a_) / (1.0 - a_), 0.0, 1.0);
    const double w = 6.0 * u * (1.0 - u) / (1.0 - a_);
    const double big_w = u * u * (3.0 - 2.0 * u);
    const double g1 = (1 - c.alpha) * interp_theta(g1_, r0) + c.alpha * interp_theta(g1_, r1);
    const double g2 = (1 - c.alpha) * interp_theta(g2_, r0) + c.alpha * interp_theta(g2_, r1);
    const double rho = (1 - t) * g1 + t * g2;
    return {(cum - mh * big_w) / rho, w * big_m / rho};
}

Polar AnnulusFlow::flow(Polar p) const {
    if (diag_.identity) return p;
    const double dt = 1.0 / options_.steps;
    double s = p.r, th = p.theta;
    auto clamp_s = [&](double v) { return std::clamp(v, a_, 1.0); };
    for (int k = 0; k < options_.steps; ++k) {
        const double t = k * dt;
        const Point2 k1 = velocity(s, th, t);
        const Point2 k2 = velocity(clamp_s(s + 0.5 * dt * k1.x), th + 0.5 * dt * k1.y, t + 0.5 * dt);
        const Point2 k3 = velocity(clamp_s(s + 0.5 * dt * k2.x), th + 0.5 * dt * k2.y, t + 0.5 * dt);
        const Point2 k4 = velocity(clamp_s(s + dt * k3.x), th + dt * k3.y, t + dt);
        s = clamp_s(s + dt / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x));
        th += dt / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    }
    return {s, wrap(th)};
}

Point2 AnnulusFlow::apply(Point2 x) const {
    if (diag_.identity) return x;
    const double s = elevation(annulus_.outer, x);
    if (s <= a_ || s >= 1.0) return x;
    const Polar p = flow(elevation_.inverse_polar(x));
    return elevation_.forward_polar(p.r, p.theta);
}

std::vector<Polygon> AnnulusFlow::fixed_boundaries() const {
    return {annulus_.outer.vertices(), annulus_.inner().vertices()};
}

// ---------------------------------------------------------------- f2, f3

PartwiseDensity build_f2(const StarPolygon& whole, const std::vector<StarPolygon>& parts, const std::vector<double>& f,
                         double r) {
    if (parts.size() != f.size() || parts.empty()) throw ValidationError("build_f2: need one value per part");
    if (!(r > 0 && r < 1)) throw ValidationError("build_f2: contraction must lie in (0, 1)");
    (void)whole;
    const double m = *std::min_element(f.begin(), f.end());
    PartwiseDensity out;
    out.base = m;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double c = 3.0 * (f[i] - m) / (r * r);
        if (c < 0) throw std::logic_error("build_f2: negative hat height");
        out.parts.push_back({parts[i], c > 0 ? Profile::hat(m, c, r) : Profile::constant(m), m});
    }
    return out;
}

ElevationDensity build_f3(const StarPolygon& whole, const StarAnnulus& annulus, const PartwiseDensity& f2, double r) {
    const StarPolygon& s = annulus.outer;
    for (const auto& v : s.vertices())
        if (!whole.contains(v, 1e-9 * whole.diameter())) throw GeometryError("build_f3: S is not contained in T");
    const StarPolygon hole = annulus.inner();
    for (const auto& p : f2.parts) {
        if (p.profile.is_constant()) continue;
        const StarPolygon pr = p.domain.contract(r);
        for (const auto& v : pr.vertices())
            if (!s.contains(v, 1e-9 * s.diameter())) throw GeometryError("build_f3: a contracted part leaves S");
        if (!(polygon_separation(hole.vertices(), pr.vertices()) > 0))
            throw GeometryError("build_f3: a contracted part meets the inner hole of the annulus");
    }
    const double m = f2.base;
    double part_area = 0.0;
    for (const auto& p : f2.parts) part_area += p.domain.area();
    const double excess = std::max(0.0, f2.integral() - m * part_area);
    const double c = 2.0 * excess / annulus.area();
    return {s, c > 0 ? Profile::tent(m, c, annulus.inner_ratio, 1.0) : Profile::constant(m), m};
}

// ---------------------------------------------------------------- corrector

ResidualSummary summarize(std::vector<double> r) {
    ResidualSummary s;
    s.samples = static_cast<int>(r.size());
    if (r.empty()) return s;
    std::sort(r.begin(), r.end());
    auto quantile = [&](double q) { return r[static_cast<std::size_t>(std::floor(q * static_cast<double>(r.size() - 1)))]; };
    s.median = r.size() % 2 ? r[r.size() / 2] : 0.5 * (r[r.size() / 2 - 1] + r[r.size() / 2]);
    s.p90 = quantile(0.9);
    s.max = r.back();
    return s;
}

namespace {

std::vector<Point2> sample_inside(const StarPolygon& d, int count, std::mt19937_64& rng,
                                  const std::function<bool(Point2)>& accept) {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& v : d.vertices()) {
        x0 = std::min(x0, v.x);
        y0 = std::min(y0, v.y);
        x1 = std::max(x1, v.x);
        y1 = std::max(y1, v.y);
    }
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    std::vector<Point2> out;
    const double margin = 1e-4 * d.diameter();
    for (long tries = 0; static_cast<int>(out.size()) < count && tries < 1000L * count; ++tries) {
        const Point2 p{ux(rng), uy(rng)};
        if (!point_strictly_inside(d.vertices(), p) || boundary_distance(d.vertices(), p) < margin) continue;
        if (accept && !accept(p)) continue;
        out.push_back(p);
    }
    return out;
}

StageReport check_stage(const std::string& name, const PlaneMap& map, const std::vector<Point2>& pts, double h,
                        const std::function<double(Point2)>& target) {
    StageReport rep;
    rep.stage = name;
    std::vector<double> res;
    for (const auto& p : pts) {
        const double j = numerical_jacobian(map, p, h);
        const double t = target(p);
        res.push_back(std::abs(j / t - 1.0));
    }
    const auto s = summarize(std::move(res));
    rep.samples = s.samples;
    rep.median = s.median;
    rep.p90 = s.p90;
    return rep;
}

}  // namespace

TileCorrector tile_corrector(const StarPolygon& whole, const std::vector<StarPolygon>& parts, const std::vector<double>& f,
                             const CorrectorOptions& opt) {
    if (parts.empty() || parts.size() != f.size()) throw ValidationError("tile_corrector: need one density value per part");
    double mass = 0.0, part_area = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!(f[i] > 0) || !std::isfinite(f[i])) throw ValidationError("tile_corrector: density values must be positive");
        mass += f[i] * parts[i].area();
        part_area += parts[i].area();
    }
    if (std::abs(part_area - whole.area()) > 1e-9 * whole.area())
        throw ValidationError("tile_corrector: part areas do not sum to the area of the tile");

    TileCorrector out;
    CorrectorReport& rep = out.report;
    rep.normalization = whole.area() / mass;
    std::vector<double> fn(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) fn[i] = rep.normalization * f[i];
    const double m = *std::min_element(fn.begin(), fn.end());
    const double M = *std::max_element(fn.begin(), fn.end());
    rep.min_f = m;
    if (M - m <= 1e-12 * m) {
        rep.identity = true;
        rep.f2_peak = rep.f3_peak = M;
        for (const char* s : {"psi1", "psi2", "psi3", "psi"}) rep.stages.push_back({s, true, 0, 0.0, 0.0, 0.0});
        return out;
    }

    WitnessOptions wopt = opt.witness;
    wopt.require_kernel = true;
    const WitnessPoint wp = find_witness_point(whole, parts, opt.r, wopt);
    rep.q = wp.q;
    rep.r = wp.r_used;
    const StarPolygon s_region = whole.with_center(wp.q);

    std::vector<StarPolygon> contracted;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (fn[i] > m) contracted.push_back(parts[i].contract(rep.r));
    auto admissible = [&](double ri) {
        const StarPolygon hole = s_region.contract(ri);
        for (const auto& c : contracted)
            if (!(polygon_separation(hole.vertices(), c.vertices()) > 0)) return false;
        return true;
    };
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 20; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (admissible(mid)) lo = mid;
        else hi = mid;
    }
    if (!(lo > 0)) throw GeometryError("tile_corrector: no inner ratio keeps the contracted parts off the inner hole");
    rep.r_in = opt.inner_fraction * lo;

    // ψ1: each part from its constant value to its hat.
    const PartwiseDensity f2 = build_f2(whole, parts, fn, rep.r);
    std::vector<std::shared_ptr<const RadialEqualizer>> eq;
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (fn[i] > m) eq.push_back(std::make_shared<RadialEqualizer>(parts[i], Profile::constant(fn[i]), f2.parts[i].profile));
    auto psi1 = std::make_shared<PartwiseLayer>(eq);
    rep.f2_peak = f2.max();

    // ψ2: the annulus flow from f2 to f3.
    const StarAnnulus annulus{s_region, rep.r_in};
    const ElevationDensity f3 = build_f3(whole, annulus, f2, rep.r);
    rep.f3_peak = f3.profile.max();
    auto psi2 = std::make_shared<AnnulusFlow>(annulus, [&](Point2 x) { return f2(x); }, [&](Point2 x) { return f3(x); },
                                              opt.flow);
    rep.flow = psi2->diagnostics();

    // ψ3: f3 to the constant 1 on S.
    auto psi3 = std::make_shared<RadialEqualizer>(s_region, f3.profile, Profile::constant(1.0));

    out.map.then(psi1).then(psi2).then(psi3);

    if (opt.check_samples > 0) {
        std::mt19937_64 rng(opt.seed);
        const double h = 1e-5 * whole.diameter();
        auto in_part = [&](Point2 x) {
            for (const auto& e : eq)
                if (elevation(e->domain(), x) < 1.0) return true;
            return false;
        };
        auto value_of = [&](Point2 x) {
            for (std::size_t i = 0; i < parts.size(); ++i)
                if (elevation(parts[i], x) <= 1.0) return fn[i];
            return m;
        };
        rep.stages.push_back(check_stage("psi1", PlaneMap(psi1), sample_inside(whole, opt.check_samples, rng, in_part), h,
                                         [&](Point2 x) { return value_of(x) / f2(psi1->apply(x)); }));
        rep.stages.push_back(check_stage("psi2", PlaneMap(psi2),
                                         sample_inside(whole, opt.check_samples, rng, [&](Point2 x) { return annulus.contains(x); }),
                                         h, [&](Point2 x) { return f2(x) / f3(psi2->apply(x)); }));
        rep.stages.push_back(check_stage("psi3", PlaneMap(psi3), sample_inside(whole, opt.check_samples, rng, {}), h,
                                         [&](Point2 x) { return f3(x); }));
        rep.stages.push_back(check_stage("psi", out.map, sample_inside(whole, opt.check_samples, rng, {}), h, value_of));
        double disp = 0.0;
        for (const auto& b : sample_boundary(whole.vertices(), 4 * opt.check_samples))
            disp = std::max(disp, distance(out.map(b), b));
        rep.stages.back().boundary_displacement = disp;

        std::ostringstream fail;
        const double tol[] = {opt.radial_tolerance, opt.flow_tolerance, opt.radial_tolerance};
        for (int k = 0; k < 3; ++k)
            if (rep.stages[static_cast<std::size_t>(k)].median > tol[k])
                fail << " " << rep.stages[static_cast<std::size_t>(k)].stage << " median residual "
                     << rep.stages[static_cast<std::size_t>(k)].median << " > " << tol[k] << ";";
        if (disp > 2.0 * psi2->grid_scale()) fail << " boundary displacement " << disp << ";";
        if (!fail.str().empty()) throw NumericError("tile_corrector:" + fail.str());
    }
    return out;
}

}  // namespace startile
