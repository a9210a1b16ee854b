#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "flowerbed/errors.hpp"
#include "flowerbed/manifold.hpp"
#include "flowerbed/nets.hpp"

namespace flowerbed {

// Static figure emitter: draws a flower's chart-coordinate polylines over a
// light grid, with the locally convex end regions shaded. 2-D models only
// (the 3-D warped product is reported through CSV/JSON instead).

namespace detail {

struct SvgBox {
    double x0, x1, y0, y1;  // world window (chart coords)
};

inline std::string svg_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace detail

inline std::string flower_to_svg(const Manifold& m, const Flower& f) {
    if (m.dim() != 2)
        throw Error("flower_to_svg: only 2-D models are rendered");

    const bool is_sphere = dynamic_cast<const RoundSphere*>(&m) != nullptr;
    const auto* cusp = dynamic_cast<const CuspSurface*>(&m);
    const auto* torus = dynamic_cast<const FlatTorus*>(&m);

    // Gather all points in chart 0 coordinates.
    std::vector<std::vector<Vec>> polys;
    double tmin = 1e300, tmax = -1e300;
    for (const auto& e : f.edges) {
        std::vector<Vec> poly;
        for (const auto& p : e.points) {
            ChartPoint c0 = m.to_chart(p, 0);
            poly.push_back(c0.x);
            tmin = std::min(tmin, c0.x[0]);
            tmax = std::max(tmax, c0.x[0]);
        }
        polys.push_back(std::move(poly));
    }
    Vec vtx = m.to_chart(f.vertex, 0).x;

    detail::SvgBox box{};
    Vec per = m.periods(0);
    if (is_sphere) {
        box = {0.0, kPi, 0.0, kTwoPi};  // x = theta, y = phi
    } else if (torus) {
        box = {0.0, torus->side_x(), 0.0, torus->side_y()};
    } else if (cusp) {
        double lo = std::min(tmin - 0.3, -1.5);
        double hi = std::max(tmax + 0.3, 1.5);
        if (!cusp->two_ended()) lo = std::max(lo, cusp->t_min());
        box = {lo, hi, 0.0, kTwoPi};  // x = t, y = theta
    } else {
        throw Error("flower_to_svg: unsupported model " + m.name());
    }

    const double W = 800, H = 500, margin = 40;
    auto X = [&](double wx) {
        return margin + (wx - box.x0) / (box.x1 - box.x0) * (W - 2 * margin);
    };
    auto Y = [&](double wy) {
        return H - margin - (wy - box.y0) / (box.y1 - box.y0) * (H - 2 * margin);
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         detail::svg_num(W) + "\" height=\"" + detail::svg_num(H) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    // Shade locally convex end regions (cusp models: |t| beyond threshold).
    if (cusp) {
        for (const auto& e : m.ends()) {
            double a, b;
            if (e.id == 1) {
                a = e.convex_threshold;
                b = box.x1;
            } else {
                a = box.x0;
                b = -e.convex_threshold;
            }
            if (b <= a) continue;
            s += "<rect x=\"" + detail::svg_num(X(a)) + "\" y=\"" +
                 detail::svg_num(Y(box.y1)) + "\" width=\"" +
                 detail::svg_num(X(b) - X(a)) + "\" height=\"" +
                 detail::svg_num(Y(box.y0) - Y(box.y1)) +
                 "\" fill=\"#fdf2d0\"/>\n";
        }
    }

    // Chart grid.
    for (int i = 0; i <= 10; ++i) {
        double gx = box.x0 + (box.x1 - box.x0) * i / 10.0;
        double gy = box.y0 + (box.y1 - box.y0) * i / 10.0;
        s += "<line x1=\"" + detail::svg_num(X(gx)) + "\" y1=\"" +
             detail::svg_num(Y(box.y0)) + "\" x2=\"" + detail::svg_num(X(gx)) +
             "\" y2=\"" + detail::svg_num(Y(box.y1)) +
             "\" stroke=\"#e3e3e3\" stroke-width=\"1\"/>\n";
        s += "<line x1=\"" + detail::svg_num(X(box.x0)) + "\" y1=\"" +
             detail::svg_num(Y(gy)) + "\" x2=\"" + detail::svg_num(X(box.x1)) +
             "\" y2=\"" + detail::svg_num(Y(gy)) +
             "\" stroke=\"#e3e3e3\" stroke-width=\"1\"/>\n";
    }

    // Edge polylines, split where a periodic coordinate wraps around.
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                            "#ff7f0e", "#8c564b"};
    auto wrapped_jump = [&](const Vec& a, const Vec& b) {
        for (int i = 0; i < 2; ++i) {
            double p = (i == 0) ? per[0] : per[1];
            if (is_sphere && i == 1) p = kTwoPi;
            if (p > 0.0 && std::abs(b[i] - a[i]) > 0.5 * p) return true;
        }
        return false;
    };
    for (size_t e = 0; e < polys.size(); ++e) {
        const auto& poly = polys[e];
        std::string pts;
        auto flush = [&]() {
            if (!pts.empty()) {
                s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
                     colors[e % 6] + "\" stroke-width=\"1.6\"/>\n";
                pts.clear();
            }
        };
        for (size_t i = 0; i < poly.size(); ++i) {
            if (i > 0 && wrapped_jump(poly[i - 1], poly[i])) flush();
            double px = poly[i][0];
            double py = poly[i][1];
            if (!pts.empty()) pts += " ";
            pts += detail::svg_num(X(px)) + "," + detail::svg_num(Y(py));
        }
        flush();
    }

    // Vertex marker and caption.
    s += "<circle cx=\"" + detail::svg_num(X(vtx[0])) + "\" cy=\"" +
         detail::svg_num(Y(vtx[1])) + "\" r=\"4\" fill=\"#000000\"/>\n";
    double total = 0.0;
    for (const auto& e : f.edges) total += e.cached_length();
    char cap[160];
    std::snprintf(cap, sizeof(cap), "%s   loops=%zu   length=%.6g",
                  m.name().c_str(), f.edges.size(), total);
    s += "<text x=\"" + detail::svg_num(margin) + "\" y=\"" +
         detail::svg_num(24.0) +
         "\" font-family=\"monospace\" font-size=\"14\">" + cap + "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace flowerbed
