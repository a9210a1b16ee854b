#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/geodesics.hpp"
#include "flowerbed/manifold.hpp"
#include "flowerbed/nets.hpp"

namespace flowerbed {

// Seed construction for experiments and the property suites. Everything here
// is deterministic given the RNG seed; the catalog metrics are all diagonal,
// which the tangent sampling below relies on to draw metrically-bounded
// directions cheaply.

namespace seeds {

// Uniform point in the model's bounded core, away from chart edges.
inline ChartPoint sample_core(const Manifold& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (auto* s = dynamic_cast<const RoundSphere*>(&m)) {
        (void)s;
        double th = kPi / 2.0 + (u01(rng) - 0.5) * 1.2;
        double ph = u01(rng) * kTwoPi;
        return m.canonical({0, {th, ph, 0}});
    }
    if (auto* t = dynamic_cast<const FlatTorus*>(&m)) {
        return {0, {u01(rng) * t->side_x(), u01(rng) * t->side_y(), 0}};
    }
    if (auto* c = dynamic_cast<const CuspSurface*>(&m)) {
        double lo = c->two_ended() ? -0.8 : -1.2;
        double t0 = lo + u01(rng) * (0.8 - lo);
        return m.canonical({0, {t0, u01(rng) * kTwoPi, 0}});
    }
    if (auto* w = dynamic_cast<const WarpedProduct3*>(&m)) {
        (void)w;
        double t0 = -0.8 + u01(rng) * 1.6;
        return m.canonical({0, {t0, kPi / 2.0, u01(rng) * kTwoPi}});
    }
    throw Error("sample_core: unknown model " + m.name());
}

// Random chart tangent of metric norm <= rho at p. Uses the diagonal metric
// to rescale per-axis draws; on the 3-D warped product the polar axis is
// left untouched so seeds stay on the totally geodesic equator.
inline Vec sample_tangent(const Manifold& m, const ChartPoint& p, double rho,
                          std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool equator_only = dynamic_cast<const WarpedProduct3*>(&m) != nullptr;
    Mat g = m.metric(p);
    int n = m.dim();
    Vec v{0, 0, 0};
    for (int tries = 0; tries < 64; ++tries) {
        double r2 = 0.0;
        Vec raw{0, 0, 0};
        for (int i = 0; i < n; ++i) {
            if (equator_only && i == 1) continue;
            raw[i] = u(rng);
            r2 += raw[i] * raw[i];
        }
        if (r2 > 1.0 || r2 < 1e-8) continue;
        for (int i = 0; i < n; ++i) v[i] = rho * raw[i] / std::sqrt(g[i][i]);
        return v;
    }
    // Fall back to an axis direction (vanishingly unlikely).
    v[0] = rho / std::sqrt(g[0][0]);
    return v;
}

// Loop through the given waypoints and back to the vertex, each hop split
// into enough pieces to respect the spacing invariant.
inline PolyCurve loop_through(const Manifold& m, const ChartPoint& vertex,
                              const std::vector<ChartPoint>& waypoints) {
    double hint = m.convexity_radius();
    std::vector<ChartPoint> stations;
    stations.push_back(vertex);
    stations.insert(stations.end(), waypoints.begin(), waypoints.end());
    stations.push_back(vertex);

    PolyCurve loop;
    loop.points.push_back(m.canonical(vertex));
    for (size_t i = 0; i + 1 < stations.size(); ++i) {
        GeodesicPath g = minimizing_geodesic(m, stations[i], stations[i + 1]);
        int pieces = std::max(2, int(std::ceil(g.length / (0.45 * hint))));
        PolyCurve part = polyline_between(m, stations[i], stations[i + 1], pieces);
        loop.points.insert(loop.points.end(), part.points.begin() + 1,
                           part.points.end());
        loop.seg_lengths.insert(loop.seg_lengths.end(), part.seg_lengths.begin(),
                                part.seg_lengths.end());
    }
    return loop;
}

// --- Named deterministic seeds ---------------------------------------------

// Latitude circle theta = theta0 on a sphere, as a one-loop flower based at
// phi = 0.
inline Flower latitude_circle(const RoundSphere& m, double theta0, int npts = 24) {
    Flower f;
    f.vertex = m.canonical({0, {theta0, 0.0, 0}});
    PolyCurve loop;
    for (int j = 0; j <= npts; ++j)
        loop.points.push_back(m.canonical({0, {theta0, kTwoPi * j / npts, 0}}));
    loop.points.back() = f.vertex;
    f.edges.push_back(loop);
    return f;
}

// Great circle through the vertex with a small smooth polar wiggle that
// vanishes at the vertex.
inline Flower wavy_great_circle(const RoundSphere& m, double eps, int npts = 24) {
    Flower f;
    f.vertex = m.canonical({0, {kPi / 2.0, 0.0, 0}});
    PolyCurve loop;
    for (int j = 0; j <= npts; ++j) {
        double s = double(j) / npts;
        double th = kPi / 2.0 + eps * std::sin(3.0 * kTwoPi * s) * std::sin(kPi * s);
        loop.points.push_back(m.canonical({0, {th, kTwoPi * s, 0}}));
    }
    loop.points.front() = f.vertex;
    loop.points.back() = f.vertex;
    f.edges.push_back(loop);
    return f;
}

// Wedge of the two primitive closed loops of a flat torus, with uniform
// coordinate noise on the interior points.
inline Flower torus_wedge(const FlatTorus& m, double noise, uint64_t seed,
                          int npts = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-noise, noise);
    Flower f;
    f.vertex = {0, {0.5 * m.side_x(), 0.5 * m.side_y(), 0}};
    for (int axis = 0; axis < 2; ++axis) {
        PolyCurve loop;
        for (int j = 0; j <= npts; ++j) {
            Vec x = f.vertex.x;
            x[axis] += (axis == 0 ? m.side_x() : m.side_y()) * j / npts;
            if (j != 0 && j != npts && noise > 0.0) {
                x[0] += u(rng);
                x[1] += u(rng);
            }
            loop.points.push_back(m.canonical({0, x}));
        }
        loop.points.back() = f.vertex;
        f.edges.push_back(loop);
    }
    return f;
}

// Meridian circle of a warped model at radial coordinate t0 (one loop in the
// rotational direction), optionally with a radial wiggle of amplitude amp.
inline Flower neck_circle(const Manifold& m, double t0, int npts = 16,
                          double amp = 0.0) {
    bool warped3 = dynamic_cast<const WarpedProduct3*>(&m) != nullptr;
    Flower f;
    auto at = [&](double t, double ang) -> ChartPoint {
        if (warped3) return m.canonical({0, {t, kPi / 2.0, ang}});
        return m.canonical({0, {t, ang, 0}});
    };
    f.vertex = at(t0, 0.0);
    PolyCurve loop;
    for (int j = 0; j <= npts; ++j) {
        double s = double(j) / npts;
        double t = t0 + amp * std::sin(2.0 * kTwoPi * s) * std::sin(kPi * s);
        loop.points.push_back(at(t, kTwoPi * s));
    }
    loop.points.front() = f.vertex;
    loop.points.back() = f.vertex;
    f.edges.push_back(loop);
    return f;
}

// Flower of `loops` small petals around a given vertex, all inside the ball
// of radius rho.
inline Flower small_flower_at(const Manifold& m, const ChartPoint& vertex,
                              double rho, int loops, uint64_t seed) {
    std::mt19937_64 rng(seed);
    Flower f;
    f.vertex = m.canonical(vertex);
    for (int e = 0; e < loops; ++e) {
        std::vector<ChartPoint> way;
        for (int wp = 0; wp < 2; ++wp) {
            Vec v = sample_tangent(m, f.vertex, rho * (0.35 + 0.55 * (wp + e) /
                                                           double(loops + 2)),
                                   rng);
            way.push_back(integrate_geodesic(m, {f.vertex, v}, 1.0).end());
        }
        f.edges.push_back(loop_through(m, f.vertex, way));
    }
    return f;
}

// Random flower for the property suites: random core vertex, 1-3 loops
// through nearby waypoints.
inline Flower random_flower(const Manifold& m, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nloops(1, 3);
    ChartPoint vertex = sample_core(m, rng);
    double rho = 0.55 * m.convexity_radius();
    Flower f;
    f.vertex = vertex;
    int e_count = nloops(rng);
    for (int e = 0; e < e_count; ++e) {
        std::uniform_int_distribution<int> nway(2, 3);
        int wn = nway(rng);
        std::vector<ChartPoint> way;
        for (int wp = 0; wp < wn; ++wp) {
            Vec v = sample_tangent(m, vertex, rho, rng);
            way.push_back(integrate_geodesic(m, {vertex, v}, 1.0).end());
        }
        f.edges.push_back(loop_through(m, vertex, way));
    }
    return f;
}

// Random i-cage with all vertices inside a small ball around a random core
// point. Edges are evenly sampled minimizing geodesics.
inline Cage random_cage(const Manifold& m, int simplex_dim, uint64_t seed) {
    std::mt19937_64 rng(seed);
    ChartPoint center = sample_core(m, rng);
    double rho = 0.3 * m.convexity_radius();
    Cage c;
    c.simplex_dim = simplex_dim;
    for (int i = 0; i <= simplex_dim; ++i) {
        Vec v = sample_tangent(m, center, rho, rng);
        c.vertices.push_back(integrate_geodesic(m, {center, v}, 1.0).end());
    }
    for (int a = 0; a <= simplex_dim; ++a)
        for (int b = a + 1; b <= simplex_dim; ++b)
            c.edges[{a, b}] = polyline_between(m, c.vertices[a], c.vertices[b], 4);
    return c;
}

}  // namespace seeds
}  // namespace flowerbed
