#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "hjbfem/errors.hpp"
#include "hjbfem/mesh.hpp"
#include "support.hpp"

using namespace hjb;

TEST_CASE("mesh2 text parses with comments") {
    const Mesh m = load_mesh("# unit triangle\nmesh2 3 1\n0 0\n1 0 # right corner\n0 1\n\n0 1 2\n");
    CHECK(m.n_vertices() == 3);
    CHECK(m.n_triangles() == 1);
    CHECK(m.n_interior() == 0);
    CHECK(m.total_area() == doctest::Approx(0.5));
}

TEST_CASE("parse errors carry line and column") {
    try {
        load_mesh("mesh2 3 1\n0 0\n1 x\n0 1\n0 1 2\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
    CHECK_THROWS_AS(load_mesh(""), ParseError);
    CHECK_THROWS_AS(load_mesh("mesh3 3 1\n0 0\n1 0\n0 1\n0 1 2\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("mesh2 3 1\n0 0\n1 0\n0 1\n0 1 3\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("mesh2 3 1\n0 0\n1 0\n0 1\n0 1 2\n5 5\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("mesh2 3 1\n0 0\n1 0\n0 1\n0 1 2 7\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("mesh2 3 1\n0 0\n1 0\n0 1\n"), ParseError);
}

TEST_CASE("invalid triangulations are rejected") {
    CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), MeshError);
    CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1}}), MeshError);
    CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, 1}, {5, 5}}, {{0, 1, 2}}), MeshError);
    CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}, {0, 1, 2}}), MeshError);
    CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}}, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}), MeshError);
    CHECK_THROWS_AS(Mesh({{0, 0}, {1, 0}, {0, std::nan("")}}, {{0, 1, 2}}), MeshError);
}

TEST_CASE("clockwise input is reoriented") {
    const Mesh m({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}});
    CHECK(m.signed_area(0) == doctest::Approx(0.5));
}

TEST_CASE("boundary and interior nodes") {
    const Mesh m = testing::hexagon_patch(1.0);
    CHECK(m.interior_nodes() == std::vector<int>{0});
    CHECK(m.boundary_nodes().size() == 6);
    CHECK(m.interior_index(0) == 0);
    CHECK(m.is_boundary(3));
    const auto edges = m.boundary_edges();
    CHECK(edges.size() == 6);
    for (const auto& e : edges) {
        // Domain on the left: the centre lies left of every boundary edge.
        const Point2 a = m.vertices()[static_cast<std::size_t>(e[0])];
        const Point2 b = m.vertices()[static_cast<std::size_t>(e[1])];
        CHECK(cross(b - a, Point2{} - a) > 0.0);
    }
}

TEST_CASE("round trip through text is exact") {
    const Mesh m = uniform_refine(testing::hexagon_patch(0.3), 1);
    const Mesh again = load_mesh(format_mesh(m));
    CHECK(again.vertices() == m.vertices());
    CHECK(again.triangles() == m.triangles());
}

TEST_CASE("acuteness check") {
    const auto eq = check_acute(testing::hexagon_patch(1.0));
    CHECK(eq.is_strictly_acute);
    CHECK(eq.max_angle == doctest::Approx(std::numbers::pi / 3.0));
    const auto right = check_acute(testing::unit_square_mesh(2));
    CHECK_FALSE(right.is_strictly_acute);
    CHECK(right.max_angle == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(right.n_triangles == 8);
    CHECK(right.n_interior == 1);
}

TEST_CASE("red refinement") {
    const Mesh m = testing::hexagon_patch(1.0);
    const Mesh f = uniform_refine(m);
    CHECK(f.n_triangles() == 24);
    CHECK(f.n_vertices() == 7 + 12);
    CHECK(f.total_area() == doctest::Approx(m.total_area()).epsilon(1e-14));
    CHECK(check_acute(f).is_strictly_acute);
    CHECK(check_acute(f).min_angle == doctest::Approx(std::numbers::pi / 3.0));
    const Mesh f2 = uniform_refine(m, 2);
    CHECK(f2.n_triangles() == 96);
    CHECK(p1_geometry(f2).dx == doctest::Approx(0.25));
    CHECK(uniform_refine(m, 0).n_triangles() == 6);
}

TEST_CASE("P1 geometry on the equilateral patch") {
    const double s = 0.2;
    const Mesh m = testing::hexagon_patch(s);
    const auto g = p1_geometry(m);
    CHECK(g.dx == doctest::Approx(s));
    // Hat function: 6 pyramids of base area sqrt(3) s^2 / 4 and height 1.
    CHECK(g.hat_mass[0] == doctest::Approx(std::sqrt(3.0) * s * s / 2.0));
    for (std::size_t t = 0; t < m.n_triangles(); ++t) {
        Point2 sum{};
        for (int k = 0; k < 3; ++k) sum = sum + g.elem_grad[t][k];
        CHECK(norm(sum) < 1e-12);
        // The gradient of the centre hat has magnitude 1 / height.
        CHECK(norm(g.elem_grad[t][0]) == doctest::Approx(2.0 / (std::sqrt(3.0) * s)));
    }
}
