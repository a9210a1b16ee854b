#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/linalg.hpp"
#include "flowerbed/manifold.hpp"

namespace flowerbed {

// Geodesic segment with unit-time parameterization: the curve is
// exp_p(s * v0) for s in [0, 1], so length == |v0|_g(p).
struct GeodesicPath {
    std::vector<ChartPoint> samples;
    TangentVec initial_velocity;
    TangentVec final_velocity;
    double length = 0.0;

    const ChartPoint& start() const { return samples.front(); }
    const ChartPoint& end() const { return samples.back(); }
};

namespace detail {

struct GeoState {
    int chart;
    Vec x;
    Vec v;
};

inline std::pair<Vec, Vec> geo_rhs(const Manifold& m, const GeoState& s) {
    Chr gam = m.christoffel({s.chart, s.x});
    Vec a{0, 0, 0};
    int n = m.dim();
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) acc += gam[k][i][j] * s.v[i] * s.v[j];
        a[k] = -acc;
    }
    return {s.v, a};
}

inline int steps_for(const Manifold& m, double path_length) {
    double h = m.convexity_radius() / 64.0;
    double raw = std::ceil(path_length / h);
    if (raw > 4e5)
        throw IntegrationError(m.name() + ": geodesic length " +
                               std::to_string(path_length) + " exceeds step budget");
    return std::max(24, int(raw));
}

}  // namespace detail

// Integrates the geodesic equation x'' = -Gamma(x)(x', x') by classical RK4
// from the given initial tangent over s in [0, time]. Hands off between
// charts whenever the model prefers a different one, so single-chart step
// error stays uniform.
inline GeodesicPath integrate_geodesic(const Manifold& m, const TangentVec& v0,
                                       double time, int steps = 0) {
    ChartPoint p0 = m.canonical(v0.base);
    if (!m.in_domain(p0))
        throw IntegrationError(m.name() + ": integration start outside domain");

    double speed = m.metric_norm_at(p0, v0.v);
    double plen = speed * std::abs(time);

    GeodesicPath path;
    path.initial_velocity = {p0, v0.v};
    path.length = plen;
    if (time == 0.0 || speed == 0.0) {
        path.samples = {p0, p0};
        path.final_velocity = {p0, v0.v};
        return path;
    }

    if (steps <= 0) steps = detail::steps_for(m, plen);
    double dt = time / steps;

    detail::GeoState s{p0.chart, p0.x, v0.v};
    path.samples.reserve(size_t(steps) + 1);
    path.samples.push_back(p0);

    try {
        for (int it = 0; it < steps; ++it) {
            auto [k1x, k1v] = detail::geo_rhs(m, s);
            detail::GeoState s2{s.chart, s.x + (0.5 * dt) * k1x, s.v + (0.5 * dt) * k1v};
            auto [k2x, k2v] = detail::geo_rhs(m, s2);
            detail::GeoState s3{s.chart, s.x + (0.5 * dt) * k2x, s.v + (0.5 * dt) * k2v};
            auto [k3x, k3v] = detail::geo_rhs(m, s3);
            detail::GeoState s4{s.chart, s.x + dt * k3x, s.v + dt * k3v};
            auto [k4x, k4v] = detail::geo_rhs(m, s4);

            s.x = s.x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            s.v = s.v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

            ChartPoint cur = m.canonical({s.chart, s.x});
            int want = m.preferred_chart(cur);
            if (want != cur.chart) {
                TangentVec moved = m.transfer({cur, s.v}, want);
                cur = moved.base;
                s.v = moved.v;
            }
            s.chart = cur.chart;
            s.x = cur.x;
            if (!m.in_domain(cur))
                throw IntegrationError(m.name() + ": geodesic left the chart domain");
            path.samples.push_back(cur);
        }
    } catch (const DomainError& e) {
        throw IntegrationError(std::string("geodesic integration failed: ") + e.what());
    }

    path.final_velocity = {path.samples.back(), s.v};
    return path;
}

// Solves the two-point problem exp_p(v) = q by damped Newton iteration on
// the chart-coordinate endpoint mismatch, with a forward-difference
// Jacobian. `hint` (when given) seeds the iteration; callers tracing a
// deforming curve pass the previous solution so the solver tracks the
// continuous branch of minimizers instead of jumping between them.
inline GeodesicPath minimizing_geodesic(const Manifold& m, const ChartPoint& p_in,
                                        const ChartPoint& q_in,
                                        const Vec* hint = nullptr) {
    ChartPoint p = m.canonical(p_in);
    ChartPoint q = m.canonical(q_in);
    int n = m.dim();

    Vec v = hint ? *hint : m.shoot_guess(p, q);
    {
        // Coincident endpoints: trivial segment.
        Vec d0 = m.chart_delta(p, q);
        if (metric_norm(m.metric(p), d0, n) < 1e-14 && m.metric_norm_at(p, v) < 1e-12) {
            GeodesicPath path;
            path.samples = {p, p};
            path.initial_velocity = {p, Vec{0, 0, 0}};
            path.final_velocity = path.initial_velocity;
            path.length = 0.0;
            return path;
        }
    }

    Mat gq = m.metric(q);
    auto mismatch = [&](const Vec& vel, int steps) -> Vec {
        GeodesicPath trial = integrate_geodesic(m, {p, vel}, 1.0, steps);
        return m.chart_delta(q, trial.end());  // in q's chart
    };

    double span = metric_norm(gq, m.chart_delta(q, p), n);
    double tol = 1e-11 + 1e-12 * std::max(1.0, span);

    double err_norm = 0.0;
    Vec err{0, 0, 0};
    int steps = 0;
    auto refresh = [&]() {
        steps = detail::steps_for(m, std::max(m.metric_norm_at(p, v), 1e-6));
        err = mismatch(v, steps);
        err_norm = metric_norm(gq, err, n);
    };
    refresh();

    for (int iter = 0; iter < 100 && err_norm > tol; ++iter) {
        // Forward-difference Jacobian d(mismatch)/d(v).
        Mat J = zero_mat();
        double fd = 1e-7 * std::max(1.0, norm(v));
        for (int j = 0; j < n; ++j) {
            Vec vp = v;
            vp[j] += fd;
            Vec ep = mismatch(vp, steps);
            for (int i = 0; i < n; ++i) J[i][j] = (ep[i] - err[i]) / fd;
        }
        Vec dv;
        try {
            dv = solve_linear(J, err, n);
        } catch (const Error&) {
            throw NoConvergenceError(m.name() + ": singular shooting Jacobian",
                                     err_norm);
        }

        bool accepted = false;
        double t = 1.0;
        for (int half = 0; half < 10; ++half, t *= 0.5) {
            Vec vc = v;
            for (int i = 0; i < n; ++i) vc[i] -= t * dv[i];
            int st;
            Vec ec;
            try {
                st = detail::steps_for(m, std::max(m.metric_norm_at(p, vc), 1e-6));
                ec = mismatch(vc, st);
            } catch (const IntegrationError&) {
                continue;  // trial left the domain; shrink the step
            }
            double en = metric_norm(gq, ec, n);
            if (en < err_norm) {
                v = vc;
                err = ec;
                err_norm = en;
                steps = st;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw NoConvergenceError(
                m.name() + ": shooting stalled at mismatch " + std::to_string(err_norm),
                err_norm);
    }
    if (err_norm > tol)
        throw NoConvergenceError(
            m.name() + ": shooting failed to reach tolerance (mismatch " +
                std::to_string(err_norm) + ")",
            err_norm);

    return integrate_geodesic(m, {p, v}, 1.0);
}

// Unit tangent at one endpoint, pointing along the path away from that
// endpoint (for the stationarity test: these are the "outward" directions a
// balanced vertex must cancel).
inline TangentVec endpoint_unit_tangent(const Manifold& m, const GeodesicPath& path,
                                        bool at_start) {
    const TangentVec& tv = at_start ? path.initial_velocity : path.final_velocity;
    double nn = m.metric_norm_at(tv.base, tv.v);
    if (nn < 1e-14)
        throw DegenerateEdgeError("unit tangent of a zero-length geodesic");
    double sgn = at_start ? 1.0 : -1.0;
    return {tv.base, (sgn / nn) * tv.v};
}

}  // namespace flowerbed
