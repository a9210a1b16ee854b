#pragma once

#include <cmath>
#include <string>

#include "flowerbed/errors.hpp"
#include "flowerbed/manifold.hpp"
#include "flowerbed/shortening.hpp"

namespace flowerbed {

// Dimension-dependent constants of the length bound. All are elementary and
// exact; tests re-derive them through an independent oracle.

// Maximum number of loops a flower produced by collapsing a cage can have.
inline int edge_budget(int n) {
    if (n < 1) throw DomainError("edge_budget: dimension must be >= 1");
    return (n + 2) * (n + 1) / 2;
}

// Number of edges of the 1-skeleton of a k-simplex.
inline int cage_edge_count(int k) {
    if (k < 1) throw DomainError("cage_edge_count: simplex dim must be >= 1");
    return (k + 1) * k / 2;
}

// Headline bound: an n-manifold with locally convex ends and volume V
// carries a nontrivial geodesic flower of total length at most this.
inline double main_length_bound(int n, double volume) {
    if (n < 1) throw DomainError("main_length_bound: dimension must be >= 1");
    if (!(volume > 0.0)) throw DomainError("main_length_bound: volume must be positive");
    return double(n + 2) * double(n + 1) * (0.5 * n) * std::pow(volume, 1.0 / n);
}

// Filling radius / filling volume upper bounds for a closed m-manifold of
// volume V, used by the intermediate sweep-out argument.
inline double fillrad_rhs(int m, double volume) {
    if (m < 1) throw DomainError("fillrad_rhs: dimension must be >= 1");
    if (!(volume > 0.0)) throw DomainError("fillrad_rhs: volume must be positive");
    return 0.5 * m * std::pow(volume, 1.0 / m);
}

inline double fillvol_rhs(int m, double volume) {
    if (m < 1) throw DomainError("fillvol_rhs: dimension must be >= 1");
    if (!(volume > 0.0)) throw DomainError("fillvol_rhs: volume must be positive");
    double fact = 1.0, fact1 = 1.0;
    for (int i = 2; i <= m; ++i) fact *= i;
    for (int i = 2; i <= m + 1; ++i) fact1 *= i;
    return fact * std::sqrt(fact1) * std::pow(volume, double(m + 1) / m);
}

// The slack budget of the proof, split per edge and reassembled. The exact
// identity edge_budget * per_edge_bound == main_bound + delta is what makes
// the bookkeeping tight; `identity_gap` records the floating-point residue.
struct BoundReport {
    int n = 0;
    double volume = 0.0;
    double delta = 0.0;
    double delta1 = 0.0;             // delta / ((n+2)(n+1))
    int edges = 0;                   // edge_budget(n)
    double main_bound = 0.0;         // main_length_bound(n, volume)
    double edge_length_bound = 0.0;  // 2*delta1 + n*volume^(1/n)
    double total_bound = 0.0;        // main_bound + delta
    double identity_gap = 0.0;
};

inline BoundReport delta_bookkeeping(int n, double volume, double delta) {
    if (!(delta >= 0.0)) throw DomainError("delta_bookkeeping: delta must be >= 0");
    BoundReport r;
    r.n = n;
    r.volume = volume;
    r.delta = delta;
    r.edges = edge_budget(n);
    r.delta1 = delta / (double(n + 2) * double(n + 1));
    r.main_bound = main_length_bound(n, volume);
    r.edge_length_bound = 2.0 * r.delta1 + n * std::pow(volume, 1.0 / n);
    r.total_bound = r.main_bound + delta;
    r.identity_gap = std::abs(r.edges * r.edge_length_bound - r.total_bound);
    return r;
}

// Outcome of checking one flow result against the theorem's bounds.
struct CertifiedResult {
    BoundReport report;
    double measured_length = 0.0;
    double defect = 0.0;
    double residual = 0.0;
    int edge_count = 0;
    int nontrivial_edges = 0;
};

// Accepts a finished flow as a certified flower: the flow must have ended in
// a genuine geodesic flower (nontrivial), its edge count must fit the cage
// budget, and its total length must fit the theorem bound with slack delta.
// Throws NotCertifiedError naming the first failed condition.
inline CertifiedResult certify(const Manifold& m, const FlowTrace& trace,
                               double delta, double tol_v = 1e-4,
                               double tol_e = 1e-4) {
    if (trace.outcome != FlowOutcome::GeodesicFlower)
        throw NotCertifiedError(std::string("flow outcome is ") +
                                to_string(trace.outcome) +
                                ", not a geodesic flower");

    CertifiedResult res;
    res.report = delta_bookkeeping(m.dim(), m.total_volume(), delta);

    const StationarityCertificate& cert = trace.final_certificate;
    res.measured_length = cert.total_length;
    res.defect = cert.defect_norm;
    res.residual = cert.max_edge_residual;
    res.edge_count = int(trace.final_flower.edges.size());
    for (const auto& e : trace.final_flower.edges)
        if (e.cached_length() > 1e-8) ++res.nontrivial_edges;

    if (!cert.stationary(tol_v, tol_e))
        throw NotCertifiedError("stationarity tolerances not met (defect " +
                                std::to_string(cert.defect_norm) + ", residual " +
                                std::to_string(cert.max_edge_residual) + ")");
    if (res.nontrivial_edges == 0)
        throw NotCertifiedError("flower is trivial (all loops collapsed)");
    if (res.edge_count > res.report.edges)
        throw NotCertifiedError("flower has " + std::to_string(res.edge_count) +
                                " loops, budget is " +
                                std::to_string(res.report.edges));
    if (res.measured_length > res.report.total_bound)
        throw NotCertifiedError("length " + std::to_string(res.measured_length) +
                                " exceeds bound " +
                                std::to_string(res.report.total_bound));
    return res;
}

}  // namespace flowerbed
