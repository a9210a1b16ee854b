#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/linalg.hpp"

namespace flowerbed {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// A point in one chart of a model. Periodic coordinates are kept normalized
// by canonical(); charts are small integer ids (0 unless the model has an
// atlas, like the sphere).
struct ChartPoint {
    int chart = 0;
    Vec x{0, 0, 0};
};

struct TangentVec {
    ChartPoint base;
    Vec v{0, 0, 0};
};

// One unbounded end of a model: points with radial coordinate beyond
// `convex_threshold` belong to the end; analytic level-set volumes are
// available for radii >= `slice_min`.
struct EndInfo {
    int id = 0;
    double convex_threshold = 0.0;
    double slice_min = 0.0;
};

// Base class of the model catalog. All models are analytic: metric,
// Christoffel symbols, volumes and end geometry are closed-form (or 1-D
// polynomial integrals), which keeps every downstream check exact.
//
// Values are immutable after construction; all member functions are pure and
// safe to call concurrently.
class Manifold {
public:
    virtual ~Manifold() = default;

    virtual std::string name() const = 0;
    virtual int dim() const = 0;
    virtual int chart_count() const { return 1; }

    virtual bool in_domain(const ChartPoint& p) const = 0;

    // Normalizes periodic coordinates; never changes the chart.
    virtual ChartPoint canonical(const ChartPoint& p) const = 0;

    // Chart the point is best represented in (handoff policy during
    // integration). Defaults to "stay where you are".
    virtual int preferred_chart(const ChartPoint& p) const { return p.chart; }

    virtual ChartPoint to_chart(const ChartPoint& p, int chart) const {
        if (chart == p.chart) return p;
        throw Error(name() + ": chart " + std::to_string(chart) + " does not exist");
    }
    virtual TangentVec transfer(const TangentVec& t, int chart) const {
        if (chart == t.base.chart) return t;
        throw Error(name() + ": chart " + std::to_string(chart) + " does not exist");
    }

    // Metric tensor g_ij at p. Symmetric positive definite on the domain.
    virtual Mat metric(const ChartPoint& p) const = 0;

    // Christoffel symbols Gamma^k_ij at p, symmetric in (i,j).
    virtual Chr christoffel(const ChartPoint& p) const = 0;

    virtual double total_volume() const = 0;

    // Scale below which two-point geodesic problems are well posed.
    virtual double convexity_radius() const = 0;

    // End id (>= 1) of the locally convex end containing p, or 0 for the
    // bounded core.
    virtual int end_of(const ChartPoint& p) const = 0;

    virtual std::vector<EndInfo> ends() const { return {}; }

    // (n-1)-volume of the level hypersurface at radial coordinate r in the
    // given end; r must be >= the end's slice_min.
    virtual double end_level_volume(int /*end_id*/, double /*r*/) const {
        throw DomainError(name() + " has no ends");
    }

    // Exact n-volume of the region swept between radii r0 <= r1 of an end.
    virtual double end_volume_between(int /*end_id*/, double /*r0*/, double /*r1*/) const {
        throw DomainError(name() + " has no ends");
    }

    // Exact n-volume of the whole tail beyond radius r (finite for every
    // model in the catalog).
    virtual double end_volume_beyond(int /*end_id*/, double /*r*/) const {
        throw DomainError(name() + " has no ends");
    }

    // Coordinate periods per chart axis (0 = non-periodic).
    virtual Vec periods(int /*chart*/) const { return {0, 0, 0}; }

    // Chart-coordinate displacement q - p, expressed in p's chart with
    // periodic components unwrapped to their centered representative.
    Vec chart_delta(const ChartPoint& p, const ChartPoint& q) const {
        ChartPoint qc = to_chart(q, p.chart);
        Vec d = canonical(qc).x - canonical(p).x;
        Vec per = periods(p.chart);
        for (int i = 0; i < dim(); ++i)
            if (per[i] > 0.0) d[i] = std::remainder(d[i], per[i]);
        return d;
    }

    // Initial velocity guess for the two-point shooting problem (unit-time
    // parameterization). Models with curved charts may override.
    virtual Vec shoot_guess(const ChartPoint& p, const ChartPoint& q) const {
        return chart_delta(p, q);
    }

    double metric_norm_at(const ChartPoint& p, const Vec& v) const {
        return metric_norm(metric(p), v, dim());
    }

    EndInfo end_info(int end_id) const {
        for (const auto& e : ends())
            if (e.id == end_id) return e;
        throw DomainError(name() + ": no end with id " + std::to_string(end_id));
    }
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

// ---------------------------------------------------------------------------
// Round sphere of radius r, covered by two polar charts.
//
// Chart 0 has its poles on the +-z axis, chart 1 on the +-x axis; both use
// (theta, phi) with metric diag(r^2, r^2 sin^2 theta). Integration hands off
// between them whenever sin(theta) drops below sin(pi/4), so Christoffel
// symbols stay bounded (cot theta <= 1 in the working zone).
// ---------------------------------------------------------------------------
class RoundSphere final : public Manifold {
public:
    explicit RoundSphere(double radius) : r_(radius) {
        if (!(radius > 0.0)) throw Error("sphere radius must be positive");
    }

    std::string name() const override { return "sphere(r=" + fmt(r_) + ")"; }
    int dim() const override { return 2; }
    int chart_count() const override { return 2; }
    double radius() const { return r_; }

    bool in_domain(const ChartPoint& p) const override {
        if (p.chart != 0 && p.chart != 1) return false;
        double th = p.x[0];
        return th > 1e-12 && th < kPi - 1e-12;
    }

    ChartPoint canonical(const ChartPoint& p) const override {
        ChartPoint q = p;
        double th = q.x[0], ph = q.x[1];
        // Fold theta into [0, pi] (crossing a pole flips phi by pi).
        th = std::remainder(th, kTwoPi);
        if (th < 0.0) { th = -th; ph += kPi; }
        if (th > kPi) { th = kTwoPi - th; ph += kPi; }
        q.x[0] = th;
        q.x[1] = wrap2pi(ph);
        return q;
    }

    int preferred_chart(const ChartPoint& p) const override {
        return std::sin(p.x[0]) < kSinQuarterPi ? 1 - p.chart : p.chart;
    }

    ChartPoint to_chart(const ChartPoint& p, int chart) const override {
        if (chart == p.chart) return p;
        return unembed_point(embed_point(p), chart);
    }

    TangentVec transfer(const TangentVec& t, int chart) const override {
        if (chart == t.base.chart) return t;
        Vec x = embed_point(t.base);
        Vec v = embed_vector(t);
        ChartPoint b = unembed_point(x, chart);
        return unembed_vector(b, v);
    }

    Mat metric(const ChartPoint& p) const override {
        require_domain(p);
        double s = std::sin(p.x[0]);
        Mat g = zero_mat();
        g[0][0] = r_ * r_;
        g[1][1] = r_ * r_ * s * s;
        return g;
    }

    Chr christoffel(const ChartPoint& p) const override {
        require_domain(p);
        double th = p.x[0], s = std::sin(th), c = std::cos(th);
        Chr gam = zero_chr();
        gam[0][1][1] = -s * c;
        gam[1][0][1] = gam[1][1][0] = c / s;
        return gam;
    }

    double total_volume() const override { return 4.0 * kPi * r_ * r_; }
    double convexity_radius() const override { return 0.5 * kPi * r_; }
    int end_of(const ChartPoint&) const override { return 0; }

    Vec periods(int) const override { return {0.0, kTwoPi, 0.0}; }

    Vec shoot_guess(const ChartPoint& p, const ChartPoint& q) const override {
        Vec xp = embed_point(p), xq = embed_point(q);
        double rr = r_ * r_;
        double cosang = std::clamp(dot(xp, xq) / rr, -1.0, 1.0);
        double ang = std::acos(cosang);
        if (ang < 1e-9 || ang > kPi - 1e-6) return chart_delta(p, q);
        // Tangential part of xq at xp, scaled to length r*ang.
        Vec t = xq - (dot(xp, xq) / rr) * xp;
        double tn = norm(t);
        if (tn < 1e-14) return chart_delta(p, q);
        Vec v = (r_ * ang / tn) * t;
        return unembed_vector(p, v).v;
    }

    // Embedding helpers (used by tests as well).
    Vec embed_point(const ChartPoint& p) const {
        double th = p.x[0], ph = p.x[1];
        double s = std::sin(th), c = std::cos(th);
        if (p.chart == 0) return {r_ * s * std::cos(ph), r_ * s * std::sin(ph), r_ * c};
        return {r_ * c, r_ * s * std::cos(ph), r_ * s * std::sin(ph)};
    }
    Vec embed_vector(const TangentVec& t) const {
        auto [eth, eph] = basis(t.base);
        return t.v[0] * eth + t.v[1] * eph;
    }
    ChartPoint unembed_point(const Vec& x, int chart) const {
        double th, ph;
        if (chart == 0) {
            th = std::acos(std::clamp(x[2] / r_, -1.0, 1.0));
            ph = std::atan2(x[1], x[0]);
        } else {
            th = std::acos(std::clamp(x[0] / r_, -1.0, 1.0));
            ph = std::atan2(x[2], x[1]);
        }
        return {chart, {th, wrap2pi(ph), 0.0}};
    }
    TangentVec unembed_vector(const ChartPoint& at, const Vec& v) const {
        auto [eth, eph] = basis(at);
        double s = std::sin(at.x[0]);
        double vth = dot(v, eth) / (r_ * r_);
        double vph = dot(v, eph) / (r_ * r_ * s * s);
        return {at, {vth, vph, 0.0}};
    }

private:
    static constexpr double kSinQuarterPi = 0.70710678118654752;

    std::pair<Vec, Vec> basis(const ChartPoint& p) const {
        double th = p.x[0], ph = p.x[1];
        double s = std::sin(th), c = std::cos(th);
        double cp = std::cos(ph), sp = std::sin(ph);
        if (p.chart == 0)
            return {Vec{r_ * c * cp, r_ * c * sp, -r_ * s},
                    Vec{-r_ * s * sp, r_ * s * cp, 0.0}};
        return {Vec{-r_ * s, r_ * c * cp, r_ * c * sp},
                Vec{0.0, -r_ * s * sp, r_ * s * cp}};
    }

    void require_domain(const ChartPoint& p) const {
        if (!in_domain(p))
            throw DomainError(name() + ": point outside chart domain");
    }

    static double wrap2pi(double a) {
        double w = std::fmod(a, kTwoPi);
        if (w < 0.0) w += kTwoPi;
        return w;
    }
    static std::string fmt(double v);

    double r_;
};

// ---------------------------------------------------------------------------
// Flat torus R^2 / (a Z x b Z), single chart [0,a) x [0,b).
// ---------------------------------------------------------------------------
class FlatTorus final : public Manifold {
public:
    FlatTorus(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0 && b > 0.0)) throw Error("torus side lengths must be positive");
    }

    std::string name() const override {
        return "torus(" + fmt(a_) + "x" + fmt(b_) + ")";
    }
    int dim() const override { return 2; }
    double side_x() const { return a_; }
    double side_y() const { return b_; }

    bool in_domain(const ChartPoint& p) const override { return p.chart == 0; }

    ChartPoint canonical(const ChartPoint& p) const override {
        ChartPoint q = p;
        q.x[0] = wrap(q.x[0], a_);
        q.x[1] = wrap(q.x[1], b_);
        return q;
    }

    Mat metric(const ChartPoint& p) const override {
        if (!in_domain(p)) throw DomainError(name() + ": bad chart");
        Mat g = zero_mat();
        g[0][0] = g[1][1] = 1.0;
        return g;
    }

    Chr christoffel(const ChartPoint& p) const override {
        if (!in_domain(p)) throw DomainError(name() + ": bad chart");
        return zero_chr();
    }

    double total_volume() const override { return a_ * b_; }
    double convexity_radius() const override { return 0.5 * std::min(a_, b_); }
    int end_of(const ChartPoint&) const override { return 0; }
    Vec periods(int) const override { return {a_, b_, 0.0}; }

private:
    static double wrap(double v, double period) {
        double w = std::fmod(v, period);
        if (w < 0.0) w += period;
        return w;
    }
    static std::string fmt(double v);

    double a_, b_;
};

namespace detail {

// Plain dense polynomial with real coefficients, p(u) = sum c_k u^k.
struct Poly {
    std::vector<double> c;

    double eval(double u) const {
        double s = 0.0;
        for (size_t k = c.size(); k-- > 0;) s = s * u + c[k];
        return s;
    }
    Poly derivative() const {
        Poly d;
        for (size_t k = 1; k < c.size(); ++k) d.c.push_back(c[k] * double(k));
        if (d.c.empty()) d.c.push_back(0.0);
        return d;
    }
    // Definite integral over [lo, hi].
    double integral(double lo, double hi) const {
        double shi = 0.0, slo = 0.0;
        for (size_t k = c.size(); k-- > 0;) {
            shi = shi * hi + c[k] / double(k + 1);
            slo = slo * lo + c[k] / double(k + 1);
        }
        return shi * hi - slo * lo;
    }
    Poly squared() const {
        Poly q;
        q.c.assign(2 * c.size() - 1, 0.0);
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = 0; j < c.size(); ++j) q.c[i + j] += c[i] * c[j];
        return q;
    }
};

inline double falling(int k, int m) {
    double f = 1.0;
    for (int i = 0; i < m; ++i) f *= double(k - i);
    return f;
}

// Odd polynomial cap u + sum_{j} c_{2j+1} u^{2j+1} (j = 1..5) matching value
// and four derivatives of exp(-rate * (u - u1)) at u = u1. Used to close the
// one-ended cusp smoothly: w(0) = 0, w'(0) = 1 closes the surface, and the
// C^4 junction keeps finite-difference checks of the metric clean.
inline Poly solve_cap_poly(double rate, double u1) {
    constexpr int kPowers[5] = {3, 5, 7, 9, 11};
    std::array<std::array<double, 5>, 5> A{};
    std::array<double, 5> b{};
    for (int m = 0; m < 5; ++m) {
        for (int j = 0; j < 5; ++j) {
            int k = kPowers[j];
            A[m][j] = falling(k, m) * std::pow(u1, k - m);
        }
        double base = (m == 0) ? u1 : (m == 1 ? 1.0 : 0.0);
        b[m] = std::pow(-rate, m) - base;
    }
    auto c = solve_dense<5>(A, b);
    Poly p;
    p.c.assign(12, 0.0);
    p.c[1] = 1.0;
    for (int j = 0; j < 5; ++j) p.c[kPowers[j]] = c[j];
    return p;
}

// Even polynomial core sum_j e_j t^{2j} (j = 0..4) matching value and four
// derivatives of exp(-rate * t) at t = 1; evenness gives the same match at
// t = -1.
inline Poly solve_core_poly(double rate) {
    std::array<std::array<double, 5>, 5> A{};
    std::array<double, 5> b{};
    for (int m = 0; m < 5; ++m) {
        for (int j = 0; j < 5; ++j) A[m][j] = falling(2 * j, m);
        b[m] = std::pow(-rate, m) * std::exp(-rate);
    }
    auto e = solve_dense<5>(A, b);
    Poly p;
    p.c.assign(9, 0.0);
    for (int j = 0; j < 5; ++j) p.c[2 * j] = e[j];
    return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Cusp surfaces: warped circle metric dt^2 + w(t)^2 dtheta^2.
//
// One-ended variant ("cusp"): w(t) = exp(-rate*t) for t >= 0, closed on the
// left by an odd polynomial cap on (t0, 0] with w(t0) = 0, w'(t0) = 1. The
// cap point itself is a chart boundary (like the pole of a polar chart); the
// level sets S_r are exact circles of length 2*pi*w(r) for every r >= 0, and
// the end beyond t = 1 is locally convex (w' < 0, level circles shrink
// outward).
//
// Two-ended variant ("cusp2"): w(t) = exp(-rate*|t|) for |t| >= 1 with an
// even polynomial core on [-1, 1]; complete and smooth everywhere.
// ---------------------------------------------------------------------------
class CuspSurface final : public Manifold {
public:
    static constexpr double kCapSpan = 2.0;  // u1 for the one-ended cap

    CuspSurface(double rate, bool two_ended)
        : rate_(rate), two_ended_(two_ended) {
        if (!(rate > 0.05 && rate <= 4.0))
            throw Error("cusp warp rate out of supported range (0.05, 4]");
        if (two_ended_) {
            core_ = detail::solve_core_poly(rate_);
            dcore_ = core_.derivative();
        } else {
            cap_ = detail::solve_cap_poly(rate_, kCapSpan);
            dcap_ = cap_.derivative();
        }
        check_positive();
    }

    std::string name() const override {
        return std::string(two_ended_ ? "cusp2" : "cusp") + "(rate=" + fmt(rate_) + ")";
    }
    int dim() const override { return 2; }
    double rate() const { return rate_; }
    bool two_ended() const { return two_ended_; }
    double t_min() const { return two_ended_ ? -1e300 : -kCapSpan; }

    // Warp profile and its derivative; exposed for tests and slicing.
    double warp(double t) const {
        if (two_ended_)
            return std::abs(t) >= 1.0 ? std::exp(-rate_ * std::abs(t)) : core_.eval(t);
        if (t >= 0.0) return std::exp(-rate_ * t);
        return cap_.eval(t + kCapSpan);
    }
    double dwarp(double t) const {
        if (two_ended_) {
            if (std::abs(t) >= 1.0) {
                double s = t >= 0.0 ? 1.0 : -1.0;
                return -s * rate_ * std::exp(-rate_ * std::abs(t));
            }
            return dcore_.eval(t);
        }
        if (t >= 0.0) return -rate_ * std::exp(-rate_ * t);
        return dcap_.eval(t + kCapSpan);
    }

    bool in_domain(const ChartPoint& p) const override {
        return p.chart == 0 && p.x[0] > t_min() + 1e-9;
    }

    ChartPoint canonical(const ChartPoint& p) const override {
        ChartPoint q = p;
        q.x[1] = std::fmod(q.x[1], kTwoPi);
        if (q.x[1] < 0.0) q.x[1] += kTwoPi;
        return q;
    }

    Mat metric(const ChartPoint& p) const override {
        require_domain(p);
        double w = warp(p.x[0]);
        Mat g = zero_mat();
        g[0][0] = 1.0;
        g[1][1] = w * w;
        return g;
    }

    Chr christoffel(const ChartPoint& p) const override {
        require_domain(p);
        double w = warp(p.x[0]), dw = dwarp(p.x[0]);
        Chr gam = zero_chr();
        gam[0][1][1] = -w * dw;
        gam[1][0][1] = gam[1][1][0] = dw / w;
        return gam;
    }

    double total_volume() const override {
        if (two_ended_)
            return kTwoPi * (core_.integral(-1.0, 1.0) +
                             2.0 * std::exp(-rate_) / rate_);
        return kTwoPi * (cap_.integral(0.0, kCapSpan) + 1.0 / rate_);
    }

    double convexity_radius() const override { return 0.25; }

    int end_of(const ChartPoint& p) const override {
        if (p.x[0] > 1.0) return 1;
        if (two_ended_ && p.x[0] < -1.0) return 2;
        return 0;
    }

    std::vector<EndInfo> ends() const override {
        if (two_ended_) return {{1, 1.0, 1.0}, {2, 1.0, 1.0}};
        return {{1, 1.0, 0.0}};
    }

    double end_level_volume(int end_id, double r) const override {
        const EndInfo& e = end_info(end_id);
        if (r < e.slice_min - 1e-12)
            throw DomainError(name() + ": slice radius inside core");
        return kTwoPi * std::exp(-rate_ * r);
    }

    double end_volume_between(int end_id, double r0, double r1) const override {
        const EndInfo& e = end_info(end_id);
        if (r0 < e.slice_min - 1e-12)
            throw DomainError(name() + ": slice radius inside core");
        if (r1 < r0) std::swap(r0, r1);
        return kTwoPi / rate_ * (std::exp(-rate_ * r0) - std::exp(-rate_ * r1));
    }

    double end_volume_beyond(int end_id, double r) const override {
        const EndInfo& e = end_info(end_id);
        if (r < e.slice_min - 1e-12)
            throw DomainError(name() + ": slice radius inside core");
        return kTwoPi / rate_ * std::exp(-rate_ * r);
    }

    Vec periods(int) const override { return {0.0, kTwoPi, 0.0}; }

private:
    void require_domain(const ChartPoint& p) const {
        if (!in_domain(p))
            throw DomainError(name() + ": point outside chart domain");
    }
    void check_positive() const {
        double lo = two_ended_ ? -1.0 : -kCapSpan + 1e-6;
        double hi = two_ended_ ? 1.0 : 0.0;
        for (int i = 0; i <= 2000; ++i) {
            double t = lo + (hi - lo) * i / 2000.0;
            if (!(warp(t) > 0.0))
                throw Error(name() + ": warp not positive on core (bad rate)");
        }
    }
    static std::string fmt(double v);

    double rate_;
    bool two_ended_;
    detail::Poly cap_, dcap_, core_, dcore_;
};

// ---------------------------------------------------------------------------
// Warped product R x S^2 with metric dt^2 + w(t)^2 (dtheta^2 + sin^2 dphi^2),
// two cusp-like ends (same even core + exp warp as cusp2). Provided for
// n = 3 so the dimension dependence of the length bounds can be exercised;
// flows run in the totally geodesic equatorial slice theta = pi/2.
// ---------------------------------------------------------------------------
class WarpedProduct3 final : public Manifold {
public:
    explicit WarpedProduct3(double rate) : rate_(rate) {
        if (!(rate > 0.05 && rate <= 4.0))
            throw Error("warp rate out of supported range (0.05, 4]");
        core_ = detail::solve_core_poly(rate_);
        dcore_ = core_.derivative();
    }

    std::string name() const override { return "warped3(rate=" + fmt(rate_) + ")"; }
    int dim() const override { return 3; }
    double rate() const { return rate_; }

    double warp(double t) const {
        return std::abs(t) >= 1.0 ? std::exp(-rate_ * std::abs(t)) : core_.eval(t);
    }
    double dwarp(double t) const {
        if (std::abs(t) >= 1.0) {
            double s = t >= 0.0 ? 1.0 : -1.0;
            return -s * rate_ * std::exp(-rate_ * std::abs(t));
        }
        return dcore_.eval(t);
    }

    bool in_domain(const ChartPoint& p) const override {
        double th = p.x[1];
        return p.chart == 0 && th > 1e-9 && th < kPi - 1e-9;
    }

    ChartPoint canonical(const ChartPoint& p) const override {
        ChartPoint q = p;
        q.x[2] = std::fmod(q.x[2], kTwoPi);
        if (q.x[2] < 0.0) q.x[2] += kTwoPi;
        return q;
    }

    Mat metric(const ChartPoint& p) const override {
        require_domain(p);
        double w = warp(p.x[0]), s = std::sin(p.x[1]);
        Mat g = zero_mat();
        g[0][0] = 1.0;
        g[1][1] = w * w;
        g[2][2] = w * w * s * s;
        return g;
    }

    Chr christoffel(const ChartPoint& p) const override {
        require_domain(p);
        double w = warp(p.x[0]), dw = dwarp(p.x[0]);
        double s = std::sin(p.x[1]), c = std::cos(p.x[1]);
        Chr gam = zero_chr();
        gam[0][1][1] = -w * dw;
        gam[0][2][2] = -w * dw * s * s;
        gam[1][0][1] = gam[1][1][0] = dw / w;
        gam[1][2][2] = -s * c;
        gam[2][0][2] = gam[2][2][0] = dw / w;
        gam[2][1][2] = gam[2][2][1] = c / s;
        return gam;
    }

    double total_volume() const override {
        return 4.0 * kPi * (core_.squared().integral(-1.0, 1.0) +
                            std::exp(-2.0 * rate_) / rate_);
    }

    double convexity_radius() const override { return 0.25; }

    int end_of(const ChartPoint& p) const override {
        if (p.x[0] > 1.0) return 1;
        if (p.x[0] < -1.0) return 2;
        return 0;
    }

    std::vector<EndInfo> ends() const override { return {{1, 1.0, 1.0}, {2, 1.0, 1.0}}; }

    double end_level_volume(int end_id, double r) const override {
        const EndInfo& e = end_info(end_id);
        if (r < e.slice_min - 1e-12)
            throw DomainError(name() + ": slice radius inside core");
        double w = std::exp(-rate_ * r);
        return 4.0 * kPi * w * w;
    }

    double end_volume_between(int end_id, double r0, double r1) const override {
        const EndInfo& e = end_info(end_id);
        if (r0 < e.slice_min - 1e-12)
            throw DomainError(name() + ": slice radius inside core");
        if (r1 < r0) std::swap(r0, r1);
        return 4.0 * kPi / (2.0 * rate_) *
               (std::exp(-2.0 * rate_ * r0) - std::exp(-2.0 * rate_ * r1));
    }

    double end_volume_beyond(int end_id, double r) const override {
        const EndInfo& e = end_info(end_id);
        if (r < e.slice_min - 1e-12)
            throw DomainError(name() + ": slice radius inside core");
        return 4.0 * kPi / (2.0 * rate_) * std::exp(-2.0 * rate_ * r);
    }

    Vec periods(int) const override { return {0.0, 0.0, kTwoPi}; }

    // The equatorial slice theta = pi/2 is totally geodesic; seed generators
    // place flowers there.
    ChartPoint slice_point(double t, double phi) const {
        return canonical({0, {t, 0.5 * kPi, phi}});
    }

private:
    void require_domain(const ChartPoint& p) const {
        if (!in_domain(p))
            throw DomainError(name() + ": point outside chart domain");
    }
    static std::string fmt(double v);

    double rate_;
    detail::Poly core_, dcore_;
};

namespace detail {
inline std::string fmt_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}
}  // namespace detail

inline std::string RoundSphere::fmt(double v) { return detail::fmt_param(v); }
inline std::string FlatTorus::fmt(double v) { return detail::fmt_param(v); }
inline std::string CuspSurface::fmt(double v) { return detail::fmt_param(v); }
inline std::string WarpedProduct3::fmt(double v) { return detail::fmt_param(v); }

// ---------------------------------------------------------------------------
// Catalog access by name + parameters (CLI-facing).
// ---------------------------------------------------------------------------
inline ManifoldPtr make_manifold(const std::string& kind,
                                 const std::map<std::string, double>& params = {}) {
    auto get = [&](const std::string& key, double dflt) {
        auto it = params.find(key);
        return it == params.end() ? dflt : it->second;
    };
    if (kind == "sphere") return std::make_shared<RoundSphere>(get("radius", 1.0));
    if (kind == "torus")
        return std::make_shared<FlatTorus>(get("lx", 1.0), get("ly", 1.0));
    if (kind == "cusp") return std::make_shared<CuspSurface>(get("rate", 1.0), false);
    if (kind == "cusp2") return std::make_shared<CuspSurface>(get("rate", 1.0), true);
    if (kind == "warped3") return std::make_shared<WarpedProduct3>(get("rate", 1.0));
    throw Error("unknown model kind: " + kind +
                " (expected sphere|torus|cusp|cusp2|warped3)");
}

// Default instance of every catalog model (used by sweep-style tests).
inline std::vector<ManifoldPtr> default_catalog() {
    return {make_manifold("sphere"), make_manifold("torus"), make_manifold("cusp"),
            make_manifold("cusp2"), make_manifold("warped3")};
}

}  // namespace flowerbed
