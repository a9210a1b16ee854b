#pragma once

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/geodesics.hpp"
#include "flowerbed/manifold.hpp"

namespace flowerbed {

// Piecewise-geodesic curve: consecutive points are joined by minimizing
// geodesics. Invariant: consecutive points lie within the model's convexity
// radius of each other, so those minimizers are unique and the curve is well
// defined by its points alone. `seg_lengths` caches the segment lengths the
// builder measured (empty means "not measured yet").
struct PolyCurve {
    std::vector<ChartPoint> points;
    std::vector<double> seg_lengths;

    int segment_count() const { return int(points.size()) - 1; }

    double cached_length() const {
        double s = 0.0;
        for (double l : seg_lengths) s += l;
        return s;
    }

    PolyCurve reversed() const {
        PolyCurve r;
        r.points.assign(points.rbegin(), points.rend());
        r.seg_lengths.assign(seg_lengths.rbegin(), seg_lengths.rend());
        return r;
    }
};

// A geodesic flower candidate: every edge is a loop based at the vertex
// (points.front() and points.back() both equal the vertex).
struct Flower {
    ChartPoint vertex;
    std::vector<PolyCurve> edges;
};

// 1-skeleton of a mapped i-simplex: vertices v_0..v_i and one curve per
// unordered pair. Key is (a, b) with a < b.
struct Cage {
    int simplex_dim = 0;
    std::vector<ChartPoint> vertices;
    std::map<std::pair<int, int>, PolyCurve> edges;
};

// Certificate produced by the stationarity test. The flower is accepted as a
// geodesic flower when the vertex defect and the worst interior corner both
// fall below their tolerances.
struct StationarityCertificate {
    double defect_norm = 0.0;
    double max_edge_residual = 0.0;
    double total_length = 0.0;

    bool stationary(double tol_v, double tol_e) const {
        return defect_norm <= tol_v && max_edge_residual <= tol_e;
    }
};

// Solves all consecutive two-point problems along a curve.
inline std::vector<GeodesicPath> solve_segments(const Manifold& m,
                                                const PolyCurve& c) {
    std::vector<GeodesicPath> segs;
    segs.reserve(std::max(0, c.segment_count()));
    for (int i = 0; i + 1 < int(c.points.size()); ++i)
        segs.push_back(minimizing_geodesic(m, c.points[i], c.points[i + 1]));
    return segs;
}

inline double total_length(const Manifold& m, const PolyCurve& c) {
    double s = 0.0;
    for (const auto& seg : solve_segments(m, c)) s += seg.length;
    return s;
}

inline double total_length(const Manifold& m, const Flower& f) {
    double s = 0.0;
    for (const auto& e : f.edges) s += total_length(m, e);
    return s;
}

inline double total_length(const Manifold& m, const Cage& c) {
    double s = 0.0;
    for (const auto& [key, e] : c.edges) s += total_length(m, e);
    return s;
}

namespace detail {

inline double angle_between(const Manifold& m, const ChartPoint& at, const Vec& a,
                            const Vec& b) {
    Mat g = m.metric(at);
    int n = m.dim();
    double na = metric_norm(g, a, n), nb = metric_norm(g, b, n);
    if (na < 1e-14 || nb < 1e-14) return 0.0;
    double c = metric_dot(g, a, b, n) / (na * nb);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace detail

// Measures how far a flower is from being a geodesic flower.
//
//   defect_norm       |sum of outward unit tangents| at the vertex, in the
//                     vertex metric; every loop contributes two tangents
//                     (its two ends), and a stationary net has zero sum.
//   max_edge_residual worst turning angle at an interior point of any edge
//                     (radians); zero means each loop is a smooth geodesic.
//
// Fully collapsed loops (zero length) carry no direction and are skipped.
inline StationarityCertificate stationarity_defect(const Manifold& m,
                                                   const Flower& f) {
    StationarityCertificate cert;
    Vec tangent_sum{0, 0, 0};
    ChartPoint vtx = f.vertex;
    for (const auto& edge : f.edges) {
        auto segs = solve_segments(m, edge);
        double edge_len = 0.0;
        for (const auto& s : segs) edge_len += s.length;
        cert.total_length += edge_len;
        if (edge_len < 1e-12) continue;

        // Outward tangents at the vertex from both ends of the loop. A
        // zero-length terminal segment can occur transiently; walk inward to
        // the first segment that carries direction.
        for (int dir = 0; dir < 2; ++dir) {
            const bool from_start = dir == 0;
            TangentVec u{};
            bool found = false;
            if (from_start) {
                for (const auto& s : segs)
                    if (s.length > 1e-13) {
                        u = endpoint_unit_tangent(m, s, true);
                        found = true;
                        break;
                    }
            } else {
                for (auto it = segs.rbegin(); it != segs.rend(); ++it)
                    if (it->length > 1e-13) {
                        u = endpoint_unit_tangent(m, *it, false);
                        found = true;
                        break;
                    }
            }
            if (!found) continue;
            TangentVec at_vtx = m.transfer(u, vtx.chart);
            tangent_sum += at_vtx.v;
        }

        // Interior corners.
        for (size_t j = 0; j + 1 < segs.size(); ++j) {
            if (segs[j].length < 1e-13 || segs[j + 1].length < 1e-13) continue;
            TangentVec in = segs[j].final_velocity;
            TangentVec out = segs[j + 1].initial_velocity;
            TangentVec out_here = m.transfer(out, in.base.chart);
            double ang = detail::angle_between(m, in.base, in.v, out_here.v);
            cert.max_edge_residual = std::max(cert.max_edge_residual, ang);
        }
    }
    cert.defect_norm = metric_norm(m.metric(vtx), tangent_sum, m.dim());
    return cert;
}

// Structural checks. Throws InvalidCageError with a specific message rather
// than returning bool, so callers surface the reason directly.
inline void validate(const Manifold& m, const PolyCurve& c,
                     double spacing_slack = 1.05) {
    if (c.points.size() < 2) throw InvalidCageError("curve has fewer than 2 points");
    double bound = spacing_slack * m.convexity_radius();
    for (size_t i = 0; i < c.points.size(); ++i) {
        if (!m.in_domain(c.points[i]))
            throw InvalidCageError("curve point " + std::to_string(i) +
                                   " outside the model domain");
        if (i + 1 < c.points.size()) {
            double d = m.metric_norm_at(c.points[i],
                                        m.chart_delta(c.points[i], c.points[i + 1]));
            if (d > bound)
                throw InvalidCageError("curve points " + std::to_string(i) + "," +
                                       std::to_string(i + 1) +
                                       " farther apart than the convexity radius");
        }
    }
    if (!c.seg_lengths.empty() && c.seg_lengths.size() + 1 != c.points.size())
        throw InvalidCageError("segment length cache size mismatch");
}

inline void validate(const Manifold& m, const Flower& f) {
    if (f.edges.empty()) throw InvalidCageError("flower has no edges");
    if (!m.in_domain(f.vertex)) throw InvalidCageError("flower vertex outside domain");
    for (size_t e = 0; e < f.edges.size(); ++e) {
        validate(m, f.edges[e]);
        for (bool front : {true, false}) {
            const ChartPoint& tip =
                front ? f.edges[e].points.front() : f.edges[e].points.back();
            double d = m.metric_norm_at(f.vertex, m.chart_delta(f.vertex, tip));
            if (d > 1e-9)
                throw InvalidCageError("edge " + std::to_string(e) +
                                       " is not a loop at the vertex");
        }
    }
}

inline void validate(const Manifold& m, const Cage& c) {
    if (c.simplex_dim < 1) throw InvalidCageError("cage simplex dimension must be >= 1");
    if (int(c.vertices.size()) != c.simplex_dim + 1)
        throw InvalidCageError("cage must have simplex_dim + 1 vertices");
    for (const auto& v : c.vertices)
        if (!m.in_domain(v)) throw InvalidCageError("cage vertex outside domain");
    int expected = (c.simplex_dim + 1) * c.simplex_dim / 2;
    if (int(c.edges.size()) != expected)
        throw InvalidCageError("cage must have one edge per vertex pair");
    for (const auto& [key, curve] : c.edges) {
        auto [a, b] = key;
        if (a < 0 || b <= a || b > c.simplex_dim)
            throw InvalidCageError("cage edge key out of range");
        validate(m, curve);
        double da = m.metric_norm_at(c.vertices[a],
                                     m.chart_delta(c.vertices[a], curve.points.front()));
        double db = m.metric_norm_at(c.vertices[b],
                                     m.chart_delta(c.vertices[b], curve.points.back()));
        if (da > 1e-9 || db > 1e-9)
            throw InvalidCageError("cage edge (" + std::to_string(a) + "," +
                                   std::to_string(b) + ") endpoints do not match");
    }
}

namespace detail {

inline PolyCurve concat_curves(const PolyCurve& a, const PolyCurve& b) {
    PolyCurve out = a;
    out.points.insert(out.points.end(), b.points.begin() + 1, b.points.end());
    if (!a.seg_lengths.empty() && !b.seg_lengths.empty())
        out.seg_lengths.insert(out.seg_lengths.end(), b.seg_lengths.begin(),
                               b.seg_lengths.end());
    else
        out.seg_lengths.clear();
    return out;
}

}  // namespace detail

// Collapses a cage to a flower based at vertex 0: the edge between a and b
// becomes the loop (0 -> a) . (a -> b) . (b -> 0), walking existing cage
// curves only, so the image of the flower equals the image of the cage and
// the total length at most triples. Edges already touching vertex 0 become
// out-and-back loops.
inline Flower cage_to_flower(const Manifold& m, const Cage& c) {
    validate(m, c);
    auto curve_between = [&](int a, int b) -> PolyCurve {
        // Stored key is (min, max); reverse when walking high-to-low.
        if (a < b) return c.edges.at({a, b});
        return c.edges.at({b, a}).reversed();
    };
    Flower f;
    f.vertex = c.vertices[0];
    for (const auto& [key, curve] : c.edges) {
        auto [a, b] = key;
        PolyCurve loop;
        if (a == 0) {
            loop = detail::concat_curves(curve, curve.reversed());
        } else {
            loop = detail::concat_curves(
                detail::concat_curves(curve_between(0, a), curve),
                curve_between(b, 0));
        }
        f.edges.push_back(std::move(loop));
    }
    validate(m, f);
    return f;
}

// Evenly spaced polyline along the minimizing geodesic from p to q (pieces
// segments). Piece count must keep the spacing under the convexity radius.
inline PolyCurve polyline_between(const Manifold& m, const ChartPoint& p,
                                  const ChartPoint& q, int pieces) {
    if (pieces < 1) throw Error("polyline_between: pieces must be >= 1");
    GeodesicPath path = minimizing_geodesic(m, p, q);
    // Re-integrate with a step count divisible by pieces so the even split
    // lands exactly on integration samples (a geodesic has constant speed,
    // so equal parameter gaps are equal arclength gaps).
    int steps0 = int(path.samples.size()) - 1;
    int per = std::max(1, (steps0 + pieces - 1) / pieces);
    if (path.length > 1e-13)
        path = integrate_geodesic(m, path.initial_velocity, 1.0, per * pieces);
    PolyCurve out;
    out.points.reserve(size_t(pieces) + 1);
    int steps = int(path.samples.size()) - 1;
    for (int j = 0; j <= pieces; ++j) {
        int idx = j * (steps / pieces);
        out.points.push_back(path.samples[size_t(idx)]);
    }
    out.points.front() = m.canonical(p);
    out.points.back() = m.canonical(q);
    out.seg_lengths.assign(size_t(pieces), path.length / pieces);
    return out;
}

}  // namespace flowerbed
