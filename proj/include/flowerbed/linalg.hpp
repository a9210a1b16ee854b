#pragma once

#include <array>
#include <cmath>
#include <cstdlib>

#include "flowerbed/errors.hpp"

namespace flowerbed {

// Small fixed-capacity types used everywhere. Models have dimension 2 or 3;
// unused slots are kept at zero so full-width vector arithmetic is safe.
inline constexpr int kMaxDim = 3;

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<Vec, kMaxDim>;
using Chr = std::array<Mat, kMaxDim>;  // Chr[k][i][j] = Gamma^k_ij

inline Vec vec2(double a, double b) { return {a, b, 0.0}; }
inline Vec vec3(double a, double b, double c) { return {a, b, c}; }

inline Vec operator+(const Vec& a, const Vec& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) {
    return {s * a[0], s * a[1], s * a[2]};
}
inline Vec& operator+=(Vec& a, const Vec& b) {
    a[0] += b[0]; a[1] += b[1]; a[2] += b[2];
    return a;
}

inline double dot(const Vec& a, const Vec& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Mat zero_mat() {
    Mat m{};
    return m;
}
inline Chr zero_chr() {
    Chr c{};
    return c;
}

// g-inner product over the first n components.
inline double metric_dot(const Mat& g, const Vec& u, const Vec& v, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += g[i][j] * u[i] * v[j];
    return s;
}
inline double metric_norm(const Mat& g, const Vec& u, int n) {
    double q = metric_dot(g, u, u, n);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

// Solves A x = b for n <= kMaxDim by Gaussian elimination with partial
// pivoting. Throws on (numerically) singular A.
inline Vec solve_linear(Mat a, Vec b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300)
            throw Error("solve_linear: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    Vec x{0, 0, 0};
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

// Cholesky test for symmetric positive definiteness (n <= kMaxDim).
inline bool is_spd(const Mat& g, int n) {
    Mat l{};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = g[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return true;
}

namespace detail {

// Dense Gaussian elimination for the small warp-polynomial systems
// (order <= 8), separate from the kMaxDim-bounded solver above.
template <int N>
inline std::array<double, N> solve_dense(std::array<std::array<double, N>, N> a,
                                         std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300)
            throw Error("solve_dense: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < N; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < N; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace detail
}  // namespace flowerbed
