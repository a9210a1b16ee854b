#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "flowerbed/geodesics.hpp"
#include "flowerbed/seeds.hpp"
#include "oracles.hpp"

using namespace flowerbed;

namespace {

// Independent great-circle solution in the embedding:
// x(t) = x0 cos(wt) + (v0/w) sin(wt), w = |v0|/r.
Vec great_circle_at(const Vec& x0, const Vec& v0, double r, double t) {
    double speed = std::sqrt(v0[0] * v0[0] + v0[1] * v0[1] + v0[2] * v0[2]);
    double w = speed / r;
    Vec out{};
    for (int i = 0; i < 3; ++i)
        out[i] = x0[i] * std::cos(w * t) + v0[i] / w * std::sin(w * t);
    return out;
}

}  // namespace

TEST_CASE("torus geodesics are straight lines") {
    FlatTorus t(1.0, 2.0);
    TangentVec v0{{0, {0.2, 0.3, 0}}, {0.6, -0.4, 0}};
    GeodesicPath path = integrate_geodesic(t, v0, 1.5);
    double speed = std::hypot(0.6, -0.4);
    REQUIRE(path.length == Catch::Approx(1.5 * speed).epsilon(1e-12));
    ChartPoint want = t.canonical({0, {0.2 + 1.5 * 0.6, 0.3 - 1.5 * 0.4, 0}});
    REQUIRE(t.metric_norm_at(want, t.chart_delta(want, path.end())) < 1e-12);
    // Velocity is carried unchanged.
    REQUIRE(path.final_velocity.v[0] == Catch::Approx(0.6).margin(1e-12));
    REQUIRE(path.final_velocity.v[1] == Catch::Approx(-0.4).margin(1e-12));
}

TEST_CASE("sphere geodesics follow great circles through chart handoffs") {
    RoundSphere s(1.0);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 25; ++it) {
        ChartPoint p{0, {0.4 + u(rng) * 2.2, u(rng) * kTwoPi, 0}};
        p = s.canonical(p);
        Vec v = seeds::sample_tangent(s, p, 1.0, rng);
        double speed = s.metric_norm_at(p, v);
        Vec x0 = s.embed_point(p);
        Vec e0 = s.embed_vector({p, v});
        double time = 2.5 / speed;  // long enough to cross a pole sometimes
        Vec want = great_circle_at(x0, e0, 1.0, time);
        auto endpoint_err = [&](int steps) {
            GeodesicPath path = integrate_geodesic(s, {p, v}, time, steps);
            REQUIRE(path.length == Catch::Approx(2.5).epsilon(1e-9));
            Vec got = s.embed_point(path.end());
            return std::sqrt((want[0] - got[0]) * (want[0] - got[0]) +
                             (want[1] - got[1]) * (want[1] - got[1]) +
                             (want[2] - got[2]) * (want[2] - got[2]));
        };
        REQUIRE(endpoint_err(0) < 5e-6);    // default step density
        REQUIRE(endpoint_err(400) < 1e-8);  // fourth order: finer steps crush it
    }
}

TEST_CASE("geodesic flow conserves the metric speed") {
    std::mt19937_64 rng(22);
    for (const auto& m : default_catalog()) {
        for (int it = 0; it < 10; ++it) {
            ChartPoint p = seeds::sample_core(*m, rng);
            Vec v = seeds::sample_tangent(*m, p, 0.7, rng);
            double s0 = m->metric_norm_at(p, v);
            GeodesicPath path = integrate_geodesic(*m, {p, v}, 0.8);
            double s1 = m->metric_norm_at(path.final_velocity.base, path.final_velocity.v);
            INFO(m->name());
            REQUIRE(s1 == Catch::Approx(s0).epsilon(1e-7));
            REQUIRE(path.length == Catch::Approx(0.8 * s0).epsilon(1e-8));
        }
    }
}

TEST_CASE("degenerate integrations return a stationary path") {
    FlatTorus t(1.0, 1.0);
    GeodesicPath path = integrate_geodesic(t, {{0, {0.5, 0.5, 0}}, {0, 0, 0}}, 1.0);
    REQUIRE(path.length == 0.0);
    REQUIRE(path.samples.size() == 2);
}

TEST_CASE("two point solver matches the torus lattice oracle") {
    FlatTorus t(1.3, 0.7);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 100; ++it) {
        ChartPoint p{0, {u(rng) * 1.3, u(rng) * 0.7, 0}};
        ChartPoint q{0, {u(rng) * 1.3, u(rng) * 0.7, 0}};
        double want =
            oracles::torus_distance(1.3, 0.7, {p.x[0], p.x[1]}, {q.x[0], q.x[1]});
        if (want < 1e-3) continue;  // solver treats near-coincident specially
        GeodesicPath path = minimizing_geodesic(t, p, q);
        REQUIRE(path.length == Catch::Approx(want).margin(1e-9));
    }
}

TEST_CASE("two point solver matches the sphere arc oracle") {
    RoundSphere s(1.0);
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int tested = 0;
    for (int it = 0; it < 300 && tested < 100; ++it) {
        ChartPoint p = s.canonical({0, {0.3 + u(rng) * 2.5, u(rng) * kTwoPi, 0}});
        ChartPoint q = s.canonical({0, {0.3 + u(rng) * 2.5, u(rng) * kTwoPi, 0}});
        double want = oracles::sphere_distance(1.0, {p.x[0], p.x[1]}, {q.x[0], q.x[1]});
        if (want < 1e-3 || want > 2.5) continue;  // skip the cut locus region
        GeodesicPath path = minimizing_geodesic(s, p, q);
        REQUIRE(path.length == Catch::Approx(want).margin(1e-8));
        ++tested;
    }
    REQUIRE(tested == 100);
}

TEST_CASE("velocity hints steer the solver to the intended branch") {
    FlatTorus t(1.0, 1.0);
    ChartPoint p{0, {0.1, 0.5, 0}};
    ChartPoint q{0, {0.9, 0.5, 0}};
    // Shortest route wraps; the hint asks for the long interior segment.
    GeodesicPath direct = minimizing_geodesic(t, p, q);
    REQUIRE(direct.length == Catch::Approx(0.2).margin(1e-9));
    Vec hint{0.8, 0.0, 0};
    GeodesicPath forced = minimizing_geodesic(t, p, q, &hint);
    REQUIRE(forced.length == Catch::Approx(0.8).margin(1e-9));
}

TEST_CASE("endpoint tangents are unit length and oriented outward") {
    RoundSphere s(1.0);
    ChartPoint p = s.canonical({0, {1.2, 0.4, 0}});
    ChartPoint q = s.canonical({0, {1.7, 1.9, 0}});
    GeodesicPath path = minimizing_geodesic(s, p, q);
    TangentVec a = endpoint_unit_tangent(s, path, true);
    TangentVec b = endpoint_unit_tangent(s, path, false);
    REQUIRE(s.metric_norm_at(a.base, a.v) == Catch::Approx(1.0).epsilon(1e-10));
    REQUIRE(s.metric_norm_at(b.base, b.v) == Catch::Approx(1.0).epsilon(1e-10));
    // Outward at the start means along the path; at the end, back along it.
    double d0 = metric_dot(s.metric(a.base), a.v, path.initial_velocity.v, 2);
    REQUIRE(d0 > 0.0);
    double d1 = metric_dot(s.metric(b.base), b.v, path.final_velocity.v, 2);
    REQUIRE(d1 < 0.0);

    GeodesicPath still = integrate_geodesic(s, {p, {0, 0, 0}}, 1.0);
    REQUIRE_THROWS_AS(endpoint_unit_tangent(s, still, true), DegenerateEdgeError);
}

TEST_CASE("cusp radial geodesics advance in t only") {
    CuspSurface c(1.0, false);
    TangentVec v0{{0, {0.0, 1.0, 0}}, {1.0, 0.0, 0}};
    GeodesicPath path = integrate_geodesic(c, v0, 2.0);
    REQUIRE(path.end().x[0] == Catch::Approx(2.0).margin(1e-10));
    REQUIRE(path.end().x[1] == Catch::Approx(1.0).margin(1e-10));
    REQUIRE(path.length == Catch::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("warped product keeps the equator plane invariant") {
    WarpedProduct3 w(1.0);
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 10; ++it) {
        ChartPoint p{0, {u(rng) * 0.7, kPi / 2, u(rng) + 1.5}};
        Vec v{u(rng), 0.0, u(rng)};
        if (w.metric_norm_at(p, v) < 0.1) continue;
        GeodesicPath path = integrate_geodesic(w, {p, v}, 1.2);
        for (const auto& s : path.samples) {
            REQUIRE(std::abs(s.x[1] - kPi / 2) < 1e-9);
        }
    }
}

TEST_CASE("requested resolution grows with path length") {
    FlatTorus t(4.0, 4.0);
    GeodesicPath shorter = integrate_geodesic(t, {{0, {1, 1, 0}}, {0.1, 0, 0}}, 1.0);
    GeodesicPath longer = integrate_geodesic(t, {{0, {1, 1, 0}}, {1.9, 0, 0}}, 1.0);
    REQUIRE(longer.samples.size() > shorter.samples.size());
}
