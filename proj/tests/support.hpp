#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hjbfem/mesh.hpp"
#include "hjbfem/problems.hpp"
#include "hjbfem/sparse.hpp"

namespace hjb::testing {

// Regular hexagon of side s around the origin; vertex 0 is the only interior node
// and vertex k (k = 1..6) sits at angle (k - 1) * 60 degrees.
inline Mesh hexagon_patch(double s) {
    std::vector<Point2> v{{0.0, 0.0}};
    for (int k = 0; k < 6; ++k) {
        const double a = k * std::numbers::pi / 3.0;
        v.push_back({s * std::cos(a), s * std::sin(a)});
    }
    std::vector<Triangle> t;
    for (int k = 0; k < 6; ++k) t.push_back({0, 1 + k, 1 + (k + 1) % 6});
    return Mesh(std::move(v), std::move(t));
}

// Unit square split into n x n squares, each cut along a diagonal (right triangles).
inline Mesh unit_square_mesh(int n) {
    std::vector<Point2> v;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) v.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
    std::vector<Triangle> t;
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return Mesh(std::move(v), std::move(t));
}

inline std::vector<double> dense(const SparseMatrix& a) {
    std::vector<double> out(a.n_rows() * a.n_cols(), 0.0);
    for (std::size_t r = 0; r < a.n_rows(); ++r) {
        for (std::size_t k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k) {
            out[r * a.n_cols() + static_cast<std::size_t>(a.col_indices()[k])] += a.values()[k];
        }
    }
    return out;
}

// Strong-form residual of a benchmark's exact solution at (p, t) by central
// differences with step `step`: v_t and grad v from the exact value, the
// Laplacian from the exact gradient (second differences of the value lose
// about eps / step^2 to rounding). The supremum over directions is taken in
// closed form, |b| |grad v|, using the first control's |b|.
inline double exact_pde_residual(const Benchmark& bench, Point2 p, double t, double step) {
    const auto& v = bench.exact->value;
    const auto& g = bench.exact->gradient;
    const Point2 ex{step, 0.0}, ey{0.0, step};
    const double vt = (v(p, t + step) - v(p, t - step)) / (2.0 * step);
    const Point2 grad{(v(p + ex, t) - v(p - ex, t)) / (2.0 * step), (v(p + ey, t) - v(p - ey, t)) / (2.0 * step)};
    const double lap = (g(p + ex, t).x - g(p - ex, t).x + g(p + ey, t).y - g(p - ey, t).y) / (2.0 * step);
    const Coefficients k = bench.problem.coeff(bench.problem.controls[0], p, t);
    return -vt - k.a * lap + norm(k.b) * norm(grad) + k.c * v(p, t) - k.d;
}

// Max-norm gap between the exact gradient and central differences of the exact value.
inline double exact_gradient_gap(const Benchmark& bench, Point2 p, double t, double step) {
    const auto& v = bench.exact->value;
    const Point2 ex{step, 0.0}, ey{0.0, step};
    const Point2 fd{(v(p + ex, t) - v(p - ex, t)) / (2.0 * step), (v(p + ey, t) - v(p - ey, t)) / (2.0 * step)};
    const Point2 g = bench.exact->gradient(p, t);
    return std::max(std::abs(fd.x - g.x), std::abs(fd.y - g.y));
}

// Uniform random points of the benchmark triangle with |x| >= min_radius.
inline std::vector<Point2> triangle_samples(std::mt19937_64& rng, int count, double min_radius) {
    const Point2 a{0.0, -1.0}, b{std::sqrt(3.0) / 2.0, 0.5}, c{-std::sqrt(3.0) / 2.0, 0.5};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point2> out;
    while (static_cast<int>(out.size()) < count) {
        const double l0 = u(rng), l1 = u(rng);
        if (l0 + l1 >= 1.0) continue;
        const Point2 p = a + l0 * (b - a) + l1 * (c - a);
        if (norm(p) >= min_radius) out.push_back(p);
    }
    return out;
}
// Smallest nu, by bisection, with nu K_lm + B_lm <= 0 for all m != l.
inline double bisect_min_nu(const std::vector<double>& k, const std::vector<double>& b) {
    auto feasible = [&](double nu) {
        for (std::size_t m = 1; m < k.size(); ++m) {
            if (nu * k[m] + b[m] > 1e-15) return false;
        }
        return true;
    };
    if (feasible(0.0)) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (!feasible(hi)) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace hjb::testing
