#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/geodesics.hpp"
#include "flowerbed/manifold.hpp"
#include "flowerbed/nets.hpp"

namespace flowerbed {

enum class FlowOutcome { ContractedToPoint, GeodesicFlower, IterationLimit };

inline const char* to_string(FlowOutcome o) {
    switch (o) {
        case FlowOutcome::ContractedToPoint: return "ContractedToPoint";
        case FlowOutcome::GeodesicFlower: return "GeodesicFlower";
        case FlowOutcome::IterationLimit: return "IterationLimit";
    }
    return "?";
}

struct FlowConfig {
    int k_subdiv = 0;            // points per loop in the resampling step; 0 = auto
    double vertex_step0 = 0.0;   // first trial distance for the vertex move; 0 = auto
    double backtrack_factor = 0.5;
    int max_iters = 200;
    double tol_v = 1e-4;         // vertex defect tolerance
    double tol_e = 1e-4;         // interior corner tolerance (radians)
    double contraction_radius = 0.0;  // small-flower collapse trigger; 0 = auto

    double step0(const Manifold& m) const {
        return vertex_step0 > 0.0 ? vertex_step0 : radius(m) / 16.0;
    }
    double radius(const Manifold& m) const {
        return contraction_radius > 0.0 ? contraction_radius
                                        : 0.5 * m.convexity_radius();
    }
    void check() const {
        if (k_subdiv != 0 && k_subdiv < 2)
            throw Error("k_subdiv must be >= 2 (or 0 for automatic)");
        if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
            throw Error("backtrack_factor must lie in (0,1)");
        if (max_iters < 1) throw Error("max_iters must be >= 1");
        if (!(tol_v > 0.0) || !(tol_e > 0.0))
            throw Error("tolerances must be positive");
        if (vertex_step0 < 0.0 || contraction_radius < 0.0)
            throw Error("step and radius overrides must be positive (or 0 for auto)");
    }
};

struct FlowRecord {
    int iter = 0;
    double length = 0.0;
    double defect = 0.0;
    double residual = 0.0;
    ChartPoint vertex;
};

struct FlowTrace {
    std::vector<FlowRecord> records;
    FlowOutcome outcome = FlowOutcome::IterationLimit;
    Flower final_flower;
    StationarityCertificate final_certificate;
};

using FlowObserver =
    std::function<void(int iter, const Flower&, const StationarityCertificate&)>;

namespace detail {

// Cached working form of one loop: points plus the solved segments between
// them. `length` below is always the measured (solver-reported) length, so
// the accept guards in the steps compare real quantities.
struct WorkingEdge {
    std::vector<ChartPoint> pts;
    std::vector<GeodesicPath> segs;

    double length() const {
        double s = 0.0;
        for (const auto& g : segs) s += g.length;
        return s;
    }
};

inline WorkingEdge make_working(const Manifold& m, const PolyCurve& c) {
    WorkingEdge w;
    w.pts.reserve(c.points.size());
    for (const auto& p : c.points) w.pts.push_back(m.canonical(p));
    w.segs = solve_segments(m, {w.pts, {}});
    return w;
}

inline PolyCurve to_curve(const WorkingEdge& w) {
    PolyCurve c;
    c.points = w.pts;
    c.seg_lengths.reserve(w.segs.size());
    for (const auto& g : w.segs) c.seg_lengths.push_back(g.length);
    return c;
}

inline Flower to_flower(const ChartPoint& vertex,
                        const std::vector<WorkingEdge>& edges) {
    Flower f;
    f.vertex = vertex;
    f.edges.reserve(edges.size());
    for (const auto& e : edges) f.edges.push_back(to_curve(e));
    return f;
}

// Segment count for one loop of the given length. k_subdiv counts points
// (spacing = length / (k_subdiv - 1)); 0 means automatic, which keeps the
// spacing near a quarter of the convexity radius as the loop shrinks.
inline int segments_for(const Manifold& m, double len, int k_subdiv) {
    if (k_subdiv >= 2) return k_subdiv - 1;
    double spacing = m.convexity_radius();
    int k = int(std::ceil(4.0 * len / spacing)) + 1;
    if (k < 5) k = 5;
    if (k > 401) k = 401;
    return k;
}

// Point at arclength s along the cached curve, taken from the integrator's
// own dense samples (each segment is sampled uniformly in parameter, and a
// geodesic has constant speed).
inline ChartPoint point_at_arclength(const WorkingEdge& w, double s) {
    double acc = 0.0;
    for (const auto& seg : w.segs) {
        if (seg.length < 1e-300) continue;
        if (s <= acc + seg.length) {
            double f = (s - acc) / seg.length;
            int hi = int(seg.samples.size()) - 1;
            int idx = int(std::lround(f * hi));
            return seg.samples[size_t(std::clamp(idx, 0, hi))];
        }
        acc += seg.length;
    }
    return w.pts.back();
}

// One chord pass: sample the loop at the given interior arclengths (ends
// stay pinned), reconnect consecutive samples with minimizing geodesics, and
// keep the result only if its measured length does not exceed the old one.
// Candidate points lie on the old curve, so a harmless rejection can only
// come from integrator-level noise.
inline void chord_pass(const Manifold& m, WorkingEdge& w,
                       const std::vector<double>& arcs) {
    double oldL = w.length();
    std::vector<ChartPoint> np;
    np.reserve(arcs.size() + 2);
    np.push_back(w.pts.front());
    for (double s : arcs) np.push_back(point_at_arclength(w, s));
    np.push_back(w.pts.back());

    std::vector<GeodesicPath> nsegs;
    nsegs.reserve(np.size() - 1);
    double newL = 0.0;
    try {
        for (size_t j = 0; j + 1 < np.size(); ++j) {
            nsegs.push_back(minimizing_geodesic(m, np[j], np[j + 1]));
            newL += nsegs.back().length;
        }
    } catch (const Error&) {
        return;  // keep the old curve; a rejected pass never lengthens
    }
    if (newL <= oldL) {
        w.pts = std::move(np);
        w.segs = std::move(nsegs);
    }
}

// One Birkhoff round on one loop, in two chord passes. The first pass
// samples the midpoints of the k equal-arclength gaps (plus the pinned
// ends), the second re-equalizes at k gaps, so the round ends with exactly
// k + 1 points. The half-offset pass matters: any polyline with k equal
// segments reproduces itself under plain equal-arclength resampling (every
// sample lands on a corner), so a single aligned pass stalls on a zigzag
// instead of straightening it. Sampling the gap midpoints first cuts every
// corner each round and restores the geometric convergence the aligned pass
// alone lacks; it also straddles out-and-back folds, which aligned samples
// can hit exactly and preserve.
inline void birkhoff_round(const Manifold& m, WorkingEdge& w, int k) {
    double oldL = w.length();
    if (oldL < 1e-13) {
        ChartPoint v = w.pts.front();
        w.pts = {v, v};
        w.segs = {minimizing_geodesic(m, v, v)};
        return;
    }

    std::vector<double> arcs;
    arcs.reserve(size_t(k));
    for (int j = 0; j < k; ++j) arcs.push_back(oldL * (2 * j + 1) / (2.0 * k));
    chord_pass(m, w, arcs);

    double midL = w.length();
    if (midL < 1e-13) {
        ChartPoint v = w.pts.front();
        w.pts = {v, v};
        w.segs = {minimizing_geodesic(m, v, v)};
        return;
    }
    arcs.clear();
    for (int j = 1; j < k; ++j) arcs.push_back(midL * j / k);
    chord_pass(m, w, arcs);
}

// Walks a loop's cached segments for its two outward unit tangents at the
// vertex; returns how many it contributed (0 for a collapsed loop).
inline int vertex_tangents(const Manifold& m, const WorkingEdge& w, int vertex_chart,
                           Vec& sum) {
    if (w.length() < 1e-12) return 0;
    int got = 0;
    for (const auto& s : w.segs)
        if (s.length > 1e-13) {
            TangentVec u = m.transfer(endpoint_unit_tangent(m, s, true), vertex_chart);
            sum += u.v;
            ++got;
            break;
        }
    for (auto it = w.segs.rbegin(); it != w.segs.rend(); ++it)
        if (it->length > 1e-13) {
            TangentVec u = m.transfer(endpoint_unit_tangent(m, *it, false), vertex_chart);
            sum += u.v;
            ++got;
            break;
        }
    return got;
}

inline StationarityCertificate cert_from_state(const Manifold& m,
                                               const ChartPoint& vertex,
                                               const std::vector<WorkingEdge>& edges) {
    StationarityCertificate cert;
    Vec sum{0, 0, 0};
    for (const auto& w : edges) {
        cert.total_length += w.length();
        vertex_tangents(m, w, vertex.chart, sum);
        for (size_t j = 0; j + 1 < w.segs.size(); ++j) {
            if (w.segs[j].length < 1e-13 || w.segs[j + 1].length < 1e-13) continue;
            const TangentVec& in = w.segs[j].final_velocity;
            TangentVec out = m.transfer(w.segs[j + 1].initial_velocity, in.base.chart);
            double ang = angle_between(m, in.base, in.v, out.v);
            cert.max_edge_residual = std::max(cert.max_edge_residual, ang);
        }
    }
    cert.defect_norm = metric_norm(m.metric(vertex), sum, m.dim());
    return cert;
}

// Vertex move: trial step along the summed outward tangents (the descent
// direction for total length), re-solving only the first and last segment of
// every loop; accepted on measured non-increase, halved otherwise.
inline bool balance_round(const Manifold& m, ChartPoint& vertex,
                          std::vector<WorkingEdge>& edges, const FlowConfig& cfg) {
    Vec sum{0, 0, 0};
    for (const auto& w : edges) vertex_tangents(m, w, vertex.chart, sum);
    double defect = metric_norm(m.metric(vertex), sum, m.dim());
    if (defect <= cfg.tol_v) return false;  // already balanced to tolerance
    Vec dir = (1.0 / defect) * sum;

    double oldL = 0.0;
    for (const auto& w : edges) oldL += w.length();

    double t = cfg.step0(m);
    for (int half = 0; half < 60; ++half, t *= cfg.backtrack_factor) {
        ChartPoint vt;
        std::vector<std::pair<GeodesicPath, GeodesicPath>> caps(edges.size());
        double newL = 0.0;
        try {
            vt = integrate_geodesic(m, {vertex, t * dir}, 1.0).end();
            if (!m.in_domain(vt)) continue;
            for (size_t e = 0; e < edges.size(); ++e) {
                WorkingEdge& w = edges[e];
                if (w.pts.size() < 3 || w.length() < 1e-13) continue;  // collapsed
                const Vec* h0 = &w.segs.front().initial_velocity.v;
                const Vec* h1 = &w.segs.back().initial_velocity.v;
                if (w.segs.front().start().chart != vt.chart) h0 = nullptr;
                caps[e].first = minimizing_geodesic(m, vt, w.pts[1], h0);
                caps[e].second =
                    minimizing_geodesic(m, w.pts[w.pts.size() - 2], vt, h1);
                double mid = w.length() - w.segs.front().length - w.segs.back().length;
                newL += mid + caps[e].first.length + caps[e].second.length;
            }
        } catch (const Error&) {
            continue;
        }
        if (newL <= oldL) {
            vertex = vt;
            for (size_t e = 0; e < edges.size(); ++e) {
                WorkingEdge& w = edges[e];
                if (w.pts.size() < 3 || w.length() < 1e-13) {
                    ChartPoint v2 = vt;
                    w.pts = {v2, v2};
                    w.segs = {minimizing_geodesic(m, v2, v2)};
                    continue;
                }
                w.pts.front() = vt;
                w.pts.back() = vt;
                w.segs.front() = caps[e].first;
                w.segs.back() = caps[e].second;
            }
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Public, stateless forms of the two flow steps (the flow itself runs on a
// cached working state; these re-solve from the raw curves).
inline PolyCurve birkhoff_edge_step(const Manifold& m, const PolyCurve& loop,
                                    const FlowConfig& cfg = {}) {
    cfg.check();
    detail::WorkingEdge w = detail::make_working(m, loop);
    detail::birkhoff_round(m, w, detail::segments_for(m, w.length(), cfg.k_subdiv));
    return detail::to_curve(w);
}

inline Flower vertex_balance_step(const Manifold& m, const Flower& f,
                                  const FlowConfig& cfg = {}) {
    cfg.check();
    ChartPoint vertex = m.canonical(f.vertex);
    std::vector<detail::WorkingEdge> edges;
    edges.reserve(f.edges.size());
    for (const auto& e : f.edges) edges.push_back(detail::make_working(m, e));
    detail::balance_round(m, vertex, edges, cfg);
    return detail::to_flower(vertex, edges);
}

// Collapses a flower that already lies in a small convex ball around its
// vertex, keeping the vertex fixed; terminates once the measured total drops
// to 1e-8. Three segments per loop maximize the per-round fold contraction
// (factor 2/3), and the ball guarantees there is nothing stationary to get
// stuck on. The returned trace records every round.
inline FlowTrace contract_small_flower(const Manifold& m, const Flower& f,
                                       const FlowConfig& cfg = {}) {
    cfg.check();
    ChartPoint vertex = m.canonical(f.vertex);
    double reach = 0.0;
    for (const auto& e : f.edges)
        for (const auto& p : e.points)
            reach = std::max(reach,
                             m.metric_norm_at(vertex, m.chart_delta(vertex, p)));
    if (reach > cfg.radius(m) + 1e-12)
        throw InvalidCageError(
            "contract_small_flower: flower is not inside the contraction ball");

    std::vector<detail::WorkingEdge> edges;
    edges.reserve(f.edges.size());
    for (const auto& e : f.edges) edges.push_back(detail::make_working(m, e));

    FlowTrace trace;
    for (int round = 0; round < 4000; ++round) {
        StationarityCertificate c = detail::cert_from_state(m, vertex, edges);
        trace.records.push_back(
            {round, c.total_length, c.defect_norm, c.max_edge_residual, vertex});
        double total = c.total_length;
        if (total <= 1e-8) {
            trace.outcome = FlowOutcome::ContractedToPoint;
            trace.final_flower = detail::to_flower(vertex, edges);
            trace.final_certificate = detail::cert_from_state(m, vertex, edges);
            return trace;
        }
        for (auto& w : edges) detail::birkhoff_round(m, w, 3);
    }
    throw NoConvergenceError(m.name() + ": small flower failed to contract", 0.0);
}

// The net-shortening flow: alternate a Birkhoff round over every loop with a
// vertex balance move, record the measured state each iteration, and stop on
// one of three outcomes:
//   ContractedToPoint  the whole flower fits in the contraction ball and is
//                      collapsed to its vertex;
//   GeodesicFlower     the stationarity certificate meets both tolerances;
//   IterationLimit     the iteration budget ran out (after one rescue pass
//                      with a doubled subdivision count).
// Both step kinds only ever accept measured non-increases, so the recorded
// length sequence is non-increasing by construction.
inline FlowTrace flow(const Manifold& m, const Flower& start, const FlowConfig& cfg = {},
                      const FlowObserver& observer = nullptr) {
    cfg.check();
    validate(m, start);
    ChartPoint vertex = m.canonical(start.vertex);
    std::vector<detail::WorkingEdge> edges;
    edges.reserve(start.edges.size());
    for (const auto& e : start.edges) edges.push_back(detail::make_working(m, e));

    FlowTrace trace;
    int k_scale = 1;
    int stall = 0;
    double prevL = -1.0;

    auto record = [&](int iter) {
        StationarityCertificate c = detail::cert_from_state(m, vertex, edges);
        trace.records.push_back(
            {iter, c.total_length, c.defect_norm, c.max_edge_residual, vertex});
        if (observer) observer(iter, detail::to_flower(vertex, edges), c);
        return c;
    };

    StationarityCertificate cert = record(0);
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        for (auto& w : edges) {
            int segs = detail::segments_for(m, k_scale * w.length(), cfg.k_subdiv);
            if (cfg.k_subdiv >= 2) segs *= k_scale;
            detail::birkhoff_round(m, w, segs);
        }
        detail::balance_round(m, vertex, edges, cfg);
        cert = record(iter);

        double reach = 0.0;
        for (const auto& w : edges)
            for (const auto& p : w.pts)
                reach = std::max(reach,
                                 m.metric_norm_at(vertex, m.chart_delta(vertex, p)));
        if (reach <= cfg.radius(m)) {
            FlowTrace tail = contract_small_flower(m, detail::to_flower(vertex, edges), cfg);
            for (const auto& r : tail.records) {
                FlowRecord shifted = r;
                shifted.iter = iter + 1 + r.iter;
                trace.records.push_back(shifted);
            }
            if (observer)
                observer(trace.records.back().iter, tail.final_flower,
                         tail.final_certificate);
            trace.outcome = FlowOutcome::ContractedToPoint;
            trace.final_flower = tail.final_flower;
            trace.final_certificate = tail.final_certificate;
            return trace;
        }
        if (cert.stationary(cfg.tol_v, cfg.tol_e)) {
            trace.outcome = FlowOutcome::GeodesicFlower;
            trace.final_flower = detail::to_flower(vertex, edges);
            trace.final_certificate = cert;
            return trace;
        }
        if (prevL >= 0.0 && std::abs(prevL - cert.total_length) <
                                1e-12 * std::max(1.0, cert.total_length)) {
            if (++stall >= 3) {
                if (k_scale == 1) {
                    k_scale = 2;
                    stall = 0;
                } else {
                    break;  // genuinely stuck; report the limit outcome
                }
            }
        } else {
            stall = 0;
        }
        prevL = cert.total_length;
    }

    trace.outcome = FlowOutcome::IterationLimit;
    trace.final_flower = detail::to_flower(vertex, edges);
    trace.final_certificate = cert;
    return trace;
}

}  // namespace flowerbed
