#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "flowerbed/bounds.hpp"
#include "flowerbed/seeds.hpp"

using namespace flowerbed;

namespace {

long long binom(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double fact(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

FlowTrace fake_geodesic_trace(double length, int loops, double defect) {
    FlowTrace t;
    t.outcome = FlowOutcome::GeodesicFlower;
    t.final_flower.vertex = {0, {0.5, 0.5, 0}};
    for (int i = 0; i < loops; ++i) {
        PolyCurve c;
        c.points = {{0, {0.5, 0.5, 0}}, {0, {0.6, 0.5, 0}}, {0, {0.5, 0.5, 0}}};
        c.seg_lengths = {length / (2 * loops), length / (2 * loops)};
        t.final_flower.edges.push_back(c);
    }
    t.final_certificate.total_length = length;
    t.final_certificate.defect_norm = defect;
    t.final_certificate.max_edge_residual = 0.0;
    return t;
}

}  // namespace

TEST_CASE("combinatorial constants match binomial coefficients") {
    for (int n = 1; n <= 8; ++n) {
        REQUIRE(edge_budget(n) == binom(n + 2, 2));
        REQUIRE(cage_edge_count(n) == binom(n + 1, 2));
    }
    REQUIRE(edge_budget(2) == 6);
    REQUIRE(edge_budget(3) == 10);
    REQUIRE_THROWS_AS(edge_budget(0), DomainError);
    REQUIRE_THROWS_AS(cage_edge_count(0), DomainError);
}

TEST_CASE("the headline bound takes its exact unit volume values") {
    REQUIRE(main_length_bound(2, 1.0) == 12.0);
    REQUIRE(main_length_bound(3, 1.0) == 30.0);
    REQUIRE(main_length_bound(2, 4.0) == Catch::Approx(24.0).epsilon(1e-14));
    REQUIRE(main_length_bound(3, 8.0) == Catch::Approx(60.0).epsilon(1e-14));
    REQUIRE_THROWS_AS(main_length_bound(2, 0.0), DomainError);
    REQUIRE_THROWS_AS(main_length_bound(0, 1.0), DomainError);
}

TEST_CASE("the bound grows with volume and with dimension at unit volume") {
    for (int n = 1; n <= 6; ++n)
        REQUIRE(main_length_bound(n + 1, 1.0) > main_length_bound(n, 1.0));
    for (double v : {0.5, 1.0, 2.0, 7.0})
        REQUIRE(main_length_bound(2, v * 2) > main_length_bound(2, v));
}

TEST_CASE("filling constants match their closed forms") {
    REQUIRE(fillrad_rhs(2, 4.0) == Catch::Approx(2.0).epsilon(1e-14));
    REQUIRE(fillrad_rhs(3, 1.0) == Catch::Approx(1.5).epsilon(1e-14));
    REQUIRE(fillvol_rhs(2, 1.0) ==
            Catch::Approx(fact(2) * std::sqrt(fact(3))).epsilon(1e-14));
    REQUIRE(fillvol_rhs(3, 2.0) ==
            Catch::Approx(fact(3) * std::sqrt(fact(4)) * std::pow(2.0, 4.0 / 3.0))
                .epsilon(1e-14));
}

TEST_CASE("per edge slack reassembles to the total bound exactly") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> uv(0.05, 50.0);
    std::uniform_real_distribution<double> ud(0.0, 5.0);
    std::uniform_int_distribution<int> un(1, 4);
    for (int it = 0; it < 100; ++it) {
        int n = un(rng);
        double vol = uv(rng);
        double delta = ud(rng);
        BoundReport r = delta_bookkeeping(n, vol, delta);
        REQUIRE(r.identity_gap <= 1e-12 * std::max(1.0, r.total_bound));
        REQUIRE(r.total_bound == r.main_bound + delta);
        REQUIRE(r.delta1 == Catch::Approx(delta / ((n + 2.0) * (n + 1.0))));
        REQUIRE(r.edges == edge_budget(n));
    }
    REQUIRE_THROWS_AS(delta_bookkeeping(2, 1.0, -0.1), DomainError);
}

TEST_CASE("a real flow on the torus wedge certifies") {
    FlatTorus t(1.0, 1.0);
    Flower f = seeds::torus_wedge(t, 0.0, 1);
    FlowConfig cfg;
    cfg.max_iters = 10;
    FlowTrace trace = flow(t, f, cfg);
    CertifiedResult res = certify(t, trace, 1e-3);
    REQUIRE(res.measured_length == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(res.edge_count == 2);
    REQUIRE(res.nontrivial_edges == 2);
    REQUIRE(res.report.total_bound == Catch::Approx(12.001));
    REQUIRE(res.measured_length <= res.report.total_bound);
}

TEST_CASE("certification refuses contracted and unconverged flows") {
    FlatTorus t(1.0, 1.0);
    Flower f = seeds::small_flower_at(t, {0, {0.5, 0.5, 0}}, 0.04, 1, 3);
    FlowConfig cfg;
    cfg.max_iters = 40;
    FlowTrace trace = flow(t, f, cfg);
    REQUIRE(trace.outcome == FlowOutcome::ContractedToPoint);
    REQUIRE_THROWS_WITH(certify(t, trace, 1e-3),
                        Catch::Matchers::ContainsSubstring("ContractedToPoint"));
}

TEST_CASE("certification checks each clause of the theorem") {
    FlatTorus t(1.0, 1.0);

    FlowTrace sloppy = fake_geodesic_trace(2.0, 2, 0.5);
    REQUIRE_THROWS_WITH(certify(t, sloppy, 1e-3),
                        Catch::Matchers::ContainsSubstring("stationarity"));

    FlowTrace trivial = fake_geodesic_trace(0.0, 2, 0.0);
    for (auto& e : trivial.final_flower.edges) e.seg_lengths = {0.0, 0.0};
    REQUIRE_THROWS_WITH(certify(t, trivial, 1e-3),
                        Catch::Matchers::ContainsSubstring("trivial"));

    FlowTrace crowded = fake_geodesic_trace(2.0, 7, 0.0);  // budget for n=2 is 6
    REQUIRE_THROWS_WITH(certify(t, crowded, 1e-3),
                        Catch::Matchers::ContainsSubstring("budget"));

    FlowTrace heavy = fake_geodesic_trace(100.0, 2, 0.0);  // bound is 12 + delta
    REQUIRE_THROWS_WITH(certify(t, heavy, 1e-3),
                        Catch::Matchers::ContainsSubstring("exceeds"));

    FlowTrace fine = fake_geodesic_trace(2.0, 2, 0.0);
    REQUIRE_NOTHROW(certify(t, fine, 1e-3));
}
