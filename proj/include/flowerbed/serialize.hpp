#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flowerbed/bounds.hpp"
#include "flowerbed/errors.hpp"
#include "flowerbed/manifold.hpp"
#include "flowerbed/nets.hpp"
#include "flowerbed/shortening.hpp"
#include "flowerbed/slicing.hpp"

namespace flowerbed {

using ojson = nlohmann::ordered_json;

// All emitted files use fixed key / column orders and shortest-round-trip
// float formatting, so identical inputs produce byte-identical outputs.

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline ojson point_json(const Manifold& m, const ChartPoint& p) {
    ojson j;
    j["chart"] = p.chart;
    std::vector<double> x(p.x.begin(), p.x.begin() + m.dim());
    j["x"] = x;
    return j;
}

inline ChartPoint point_from_json(const ojson& j) {
    ChartPoint p;
    p.chart = j.at("chart").get<int>();
    auto x = j.at("x").get<std::vector<double>>();
    if (x.empty() || x.size() > size_t(kMaxDim))
        throw Error("point: coordinate array size out of range");
    for (size_t i = 0; i < x.size(); ++i) p.x[i] = x[i];
    return p;
}

inline ojson curve_json(const Manifold& m, const PolyCurve& c) {
    ojson j;
    ojson pts = ojson::array();
    for (const auto& p : c.points) pts.push_back(point_json(m, p));
    j["points"] = std::move(pts);
    j["seg_lengths"] = c.seg_lengths;
    return j;
}

inline PolyCurve curve_from_json(const ojson& j) {
    PolyCurve c;
    for (const auto& pj : j.at("points")) c.points.push_back(point_from_json(pj));
    if (j.contains("seg_lengths"))
        c.seg_lengths = j.at("seg_lengths").get<std::vector<double>>();
    return c;
}

}  // namespace detail

// --- Flower JSON -----------------------------------------------------------
// { "type": "flower", "model": <name>, "dim": n,
//   "vertex": {"chart": c, "x": [...]},
//   "edges": [ {"points": [...], "seg_lengths": [...]}, ... ],
//   "total_length": <sum of cached lengths> }

inline ojson flower_to_json(const Manifold& m, const Flower& f) {
    ojson j;
    j["type"] = "flower";
    j["model"] = m.name();
    j["dim"] = m.dim();
    j["vertex"] = detail::point_json(m, f.vertex);
    ojson edges = ojson::array();
    double total = 0.0;
    for (const auto& e : f.edges) {
        edges.push_back(detail::curve_json(m, e));
        total += e.cached_length();
    }
    j["edges"] = std::move(edges);
    j["total_length"] = total;
    return j;
}

inline Flower flower_from_json(const ojson& j) {
    if (j.value("type", "") != "flower") throw Error("not a flower document");
    Flower f;
    f.vertex = detail::point_from_json(j.at("vertex"));
    for (const auto& ej : j.at("edges")) f.edges.push_back(detail::curve_from_json(ej));
    return f;
}

// --- Cage JSON --------------------------------------------------------------
// { "type": "cage", "model": ..., "dim": n, "simplex_dim": i,
//   "vertices": [...], "edges": [ {"a":0,"b":1,"points":[...],...}, ... ] }

inline ojson cage_to_json(const Manifold& m, const Cage& c) {
    ojson j;
    j["type"] = "cage";
    j["model"] = m.name();
    j["dim"] = m.dim();
    j["simplex_dim"] = c.simplex_dim;
    ojson verts = ojson::array();
    for (const auto& v : c.vertices) verts.push_back(detail::point_json(m, v));
    j["vertices"] = std::move(verts);
    ojson edges = ojson::array();
    for (const auto& [key, curve] : c.edges) {
        ojson e = detail::curve_json(m, curve);
        ojson tagged;
        tagged["a"] = key.first;
        tagged["b"] = key.second;
        for (auto& [k, v] : e.items()) tagged[k] = std::move(v);
        edges.push_back(std::move(tagged));
    }
    j["edges"] = std::move(edges);
    return j;
}

inline Cage cage_from_json(const ojson& j) {
    if (j.value("type", "") != "cage") throw Error("not a cage document");
    Cage c;
    c.simplex_dim = j.at("simplex_dim").get<int>();
    for (const auto& vj : j.at("vertices"))
        c.vertices.push_back(detail::point_from_json(vj));
    for (const auto& ej : j.at("edges")) {
        int a = ej.at("a").get<int>();
        int b = ej.at("b").get<int>();
        c.edges[{a, b}] = detail::curve_from_json(ej);
    }
    return c;
}

// --- FlowTrace CSV -----------------------------------------------------------
// Columns: iter,length,defect,vertex_chart,vx0..vx{n-1}. Fixed order, header
// row first, one row per recorded iteration.

inline std::string trace_to_csv(const Manifold& m, const FlowTrace& t) {
    std::string out = "iter,length,defect,vertex_chart";
    for (int i = 0; i < m.dim(); ++i) out += ",vx" + std::to_string(i);
    out += "\n";
    for (const auto& r : t.records) {
        out += std::to_string(r.iter) + "," + fmt_g17(r.length) + "," +
               fmt_g17(r.defect) + "," + std::to_string(r.vertex.chart);
        for (int i = 0; i < m.dim(); ++i) out += "," + fmt_g17(r.vertex.x[i]);
        out += "\n";
    }
    return out;
}

// --- EndSlice CSV -------------------------------------------------------------
// One row for the slice radius: the level volume of every end at that radius
// and their total. Columns: r,end_<id>...,total.

inline std::string slice_to_csv(const Manifold& m, const EndSlice& s) {
    auto ends = m.ends();
    std::string out = "r";
    for (const auto& e : ends) out += ",end_" + std::to_string(e.id);
    out += ",total\n" + fmt_g17(s.r);
    double total = 0.0;
    std::string cells;
    for (const auto& e : ends) {
        double lv = m.end_level_volume(e.id, std::max(s.r, e.slice_min));
        total += lv;
        cells += "," + fmt_g17(lv);
    }
    out += cells + "," + fmt_g17(total) + "\n";
    return out;
}

// --- BoundReport ---------------------------------------------------------------

inline ojson bound_report_to_json(const BoundReport& r) {
    ojson j;
    j["n"] = r.n;
    j["volume"] = r.volume;
    j["delta"] = r.delta;
    j["delta1"] = r.delta1;
    j["edge_budget"] = r.edges;
    j["main_bound"] = r.main_bound;
    j["edge_length_bound"] = r.edge_length_bound;
    j["total_bound"] = r.total_bound;
    j["identity_gap"] = r.identity_gap;
    return j;
}

inline std::string bound_report_table(const BoundReport& r) {
    auto g = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    std::string out;
    out += "n                  " + std::to_string(r.n) + "\n";
    out += "volume             " + g(r.volume) + "\n";
    out += "main_bound         " + g(r.main_bound) + "\n";
    out += "edge_budget        " + std::to_string(r.edges) + "\n";
    out += "delta              " + g(r.delta) + "\n";
    out += "delta1             " + g(r.delta1) + "\n";
    out += "edge_length_bound  " + g(r.edge_length_bound) + "\n";
    out += "total_bound        " + g(r.total_bound) + "\n";
    out += "identity_gap       " + g(r.identity_gap) + "\n";
    return out;
}

}  // namespace flowerbed
