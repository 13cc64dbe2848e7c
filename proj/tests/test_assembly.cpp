#include <doctest.h>

#include <cmath>
#include <random>

#include "hjbfem/assembly.hpp"
#include "hjbfem/errors.hpp"
#include "support.hpp"

using namespace hjb;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("edge-midpoint rule is exact for quadratics only") {
    const auto rule = QuadratureRule::edge_midpoint();
    CHECK(rule.degree == 2);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
    // Integral of l1^a l2^b l3^c over a triangle of area A is 2A a! b! c! / (a+b+c+2)!.
    auto exact = [](int a, int b, int c) { return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2); };
    auto apply = [&](int a, int b, int c) {
        double s = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const auto& p = rule.points[q];
            s += rule.weights[q] * std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], c);
        }
        return s;
    };
    for (int a = 0; a <= 2; ++a) {
        for (int b = 0; a + b <= 2; ++b) {
            for (int c = 0; a + b + c <= 2; ++c) CHECK(apply(a, b, c) == doctest::Approx(exact(a, b, c)).epsilon(1e-14));
        }
    }
    CHECK(std::abs(apply(3, 0, 0) - exact(3, 0, 0)) > 1e-3);
    const auto one = QuadratureRule::centroid();
    CHECK(one.degree == 1);
    CHECK(one.points.size() == 1);
}

TEST_CASE("stiffness on the equilateral patch") {
    const double s = 0.25;
    const Mesh m = testing::hexagon_patch(s);
    const auto g = p1_geometry(m);
    const auto k = assemble_stiffness(m, g);
    CHECK(k.n_rows() == 1);
    CHECK(k.n_cols() == 7);
    CHECK(k.diagonal(0) == doctest::Approx(4.0 / (s * s)));
    for (int c = 1; c <= 6; ++c) CHECK(k.coeff(0, c) == doctest::Approx(-2.0 / (3.0 * s * s)));
}

TEST_CASE("advection row on the unit equilateral patch") {
    const Mesh m = testing::hexagon_patch(1.0);
    const auto g = p1_geometry(m);
    const auto b = assemble_advection_reaction(
        m, g, [](Point2, double) { return Point2{1.0, 0.0}; }, [](Point2, double) { return 0.0; }, 0.0);
    const double expected[6] = {1.0 / 3.0, 1.0 / 6.0, -1.0 / 6.0, -1.0 / 3.0, -1.0 / 6.0, 1.0 / 6.0};
    CHECK(std::abs(b.coeff(0, 0)) < 1e-15);
    for (int k = 0; k < 6; ++k) CHECK(b.coeff(0, k + 1) == doctest::Approx(expected[k]).epsilon(1e-13));

    const auto k = assemble_stiffness(m, g);
    const auto nu = min_monotone_diffusion(k, b);
    CHECK(nu[0] == doctest::Approx(0.5));
}

TEST_CASE("reaction row sums to c and sources are normalized averages") {
    const Mesh m = testing::hexagon_patch(0.5);
    const auto g = p1_geometry(m);
    const auto r = assemble_advection_reaction(
        m, g, [](Point2, double) { return Point2{}; }, [](Point2, double) { return 3.0; }, 0.0);
    double sum = 0.0;
    for (double v : r.values()) sum += v;
    CHECK(sum == doctest::Approx(3.0));
    // Mass-matrix row of the centre: 1/2 on the diagonal, 1/12 per neighbour.
    CHECK(r.coeff(0, 0) == doctest::Approx(1.5));
    CHECK(r.coeff(0, 2) == doctest::Approx(0.25));

    CHECK(assemble_source(m, g, [](Point2, double) { return 1.0; }, 0.0)[0] == doctest::Approx(1.0));
    CHECK(std::abs(assemble_source(m, g, [](Point2 p, double) { return p.x + 2.0 * p.y; }, 0.0)[0]) < 1e-14);
    const auto t = assemble_source(m, g, [](Point2, double t) { return t; }, 0.7);
    CHECK(t[0] == doctest::Approx(0.7));
}

TEST_CASE("non-finite coefficients are rejected") {
    const Mesh m = testing::hexagon_patch(0.5);
    const auto g = p1_geometry(m);
    CHECK_THROWS_AS(assemble_advection_reaction(
                        m, g, [](Point2, double) { return Point2{std::nan(""), 0.0}; },
                        [](Point2, double) { return 0.0; }, 0.0),
                    InputError);
}

TEST_CASE("minimal diffusion equals the bisection minimum on random rows") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uk(-3.0, -0.01), ub(-2.0, 2.0), coin(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 8;
        std::vector<double> k(n), b(n);
        k[0] = 5.0;
        b[0] = ub(rng);
        for (std::size_t j = 1; j < n; ++j) {
            k[j] = uk(rng);
            b[j] = ub(rng);
            if (coin(rng) < 0.2) {
                k[j] = 0.0;
                b[j] = -std::abs(b[j]);
            }
        }
        const auto km = SparseMatrix::from_dense(1, n, k, {0});
        const auto bm = SparseMatrix::from_dense(1, n, b, {0});
        const double nu = min_monotone_diffusion(km, bm)[0];
        CHECK(std::abs(nu - testing::bisect_min_nu(k, b)) <= 1e-12);
    }
}

TEST_CASE("rows that diffusion cannot fix are reported") {
    const std::vector<double> k{2.0, -1.0, 0.0};
    const std::vector<double> b{0.0, 0.5, 0.3};
    const auto km = SparseMatrix::from_dense(1, 3, k, {0});
    const auto bm = SparseMatrix::from_dense(1, 3, b, {0});
    try {
        min_monotone_diffusion(km, bm);
        FAIL("expected UnfixableRowError");
    } catch (const UnfixableRowError& e) {
        CHECK(e.row() == 0);
        CHECK(e.column() == 2);
    }
    // Entries within rounding noise of zero are not fatal.
    const std::vector<double> tiny{0.0, 0.5, 1e-14};
    CHECK(min_monotone_diffusion(km, SparseMatrix::from_dense(1, 3, tiny, {0}))[0] == doctest::Approx(0.5));
}

TEST_CASE("stabilized operator has non-positive off-diagonals") {
    const Mesh m = uniform_refine(testing::hexagon_patch(1.0), 2);
    const auto g = p1_geometry(m);
    const auto k = assemble_stiffness(m, g);
    const auto b = assemble_advection_reaction(
        m, g, [](Point2 p, double) { return Point2{std::cos(3.0 * p.y), std::sin(2.0 * p.x)}; },
        [](Point2, double) { return 0.0; }, 0.0);
    const auto nu = min_monotone_diffusion(k, b);
    std::vector<double> a(k.n_rows(), 0.01);
    const auto op = stabilized_operator(k, b, a, nu);
    const auto& pat = op.matrix.pattern();
    for (std::size_t r = 0; r < op.matrix.n_rows(); ++r) {
        for (std::size_t s = pat.row_offsets[r]; s < pat.row_offsets[r + 1]; ++s) {
            if (pat.col_indices[s] != pat.row_node[r]) CHECK(op.matrix.values()[s] <= 1e-13);
        }
        CHECK(op.profile.a_eff[r] == doctest::Approx(std::max(0.01, nu[r])));
        CHECK(op.profile.activated(r) == (nu[r] > 0.01 + 1e-14));
    }
    std::vector<double> neg(k.n_rows(), -1.0);
    CHECK_THROWS_AS(stabilized_operator(k, b, neg, nu), InputError);
}
