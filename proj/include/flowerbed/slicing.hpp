#pragma once

#include <cmath>
#include <limits>

#include "flowerbed/errors.hpp"
#include "flowerbed/manifold.hpp"

namespace flowerbed {

// A level hypersurface S_r inside one end, together with its measured size
// and the exact volume of the tail beyond it.
struct EndSlice {
    int end_id = 0;
    double r = 0.0;
    double level_volume = 0.0;
    double volume_beyond = 0.0;
};

// Finds the innermost slice whose (n-1)-volume is exactly eps, scanning all
// ends and returning the one reached at the smallest radius (ties go to the
// lower end id). The co-area bound vol(S_r) <= eps then holds for every
// radius beyond the returned one, since level volumes decay outward.
//
// If an end is already below eps at its innermost admissible radius, that
// radius is returned for it directly.
inline EndSlice find_small_slice(const Manifold& m, double eps) {
    if (!(eps > 0.0)) throw DomainError("find_small_slice: eps must be positive");
    auto ends = m.ends();
    if (ends.empty()) throw DomainError(m.name() + " has no ends to slice");

    bool found = false;
    EndSlice best;
    for (const auto& e : ends) {
        double lo = e.slice_min;
        double r;
        if (m.end_level_volume(e.id, lo) <= eps) {
            r = lo;
        } else {
            double hi = std::max(lo + 1.0, 2.0 * lo);
            int grow = 0;
            while (m.end_level_volume(e.id, hi) > eps) {
                lo = hi;
                hi = 2.0 * hi + 1.0;
                if (++grow > 200)
                    throw NoConvergenceError(
                        m.name() + ": level volumes never drop below eps", eps);
            }
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + hi);
                if (m.end_level_volume(e.id, mid) > eps)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
            }
            r = hi;  // the side where the level volume is already <= eps
        }
        if (!found || r < best.r) {
            best = {e.id, r, m.end_level_volume(e.id, r), m.end_volume_beyond(e.id, r)};
            found = true;
        }
    }
    return best;
}

// Verifies the co-area identity on [r0, r1] of one end: integrates the level
// volume function numerically (composite Simpson) and returns the absolute
// difference against the model's exact swept volume. This is a pure
// consistency check between two independently coded quantities.
inline double coarea_check(const Manifold& m, int end_id, double r0, double r1,
                           int intervals = 4000) {
    if (r1 < r0) std::swap(r0, r1);
    if (intervals < 2) intervals = 2;
    if (intervals % 2) ++intervals;
    double h = (r1 - r0) / intervals;
    double acc = m.end_level_volume(end_id, r0) + m.end_level_volume(end_id, r1);
    for (int i = 1; i < intervals; ++i)
        acc += (i % 2 ? 4.0 : 2.0) * m.end_level_volume(end_id, r0 + i * h);
    double numeric = acc * h / 3.0;
    double exact = m.end_volume_between(end_id, r0, r1);
    return std::abs(numeric - exact);
}

}  // namespace flowerbed
