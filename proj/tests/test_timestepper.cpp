#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hjbfem/errors.hpp"
#include "hjbfem/problems.hpp"
#include "hjbfem/timestepper.hpp"
#include "support.hpp"

using namespace hjb;

TEST_CASE("time grids") {
    const auto lin = make_time_grid(1.0, 0.5, 0.1, StepLaw::linear);
    CHECK(lin.n_steps == 20);
    CHECK(lin.step == doctest::Approx(0.05));

    const auto quad = make_time_grid(1.0, 0.5, 0.4, StepLaw::quadratic);
    CHECK(quad.n_steps == 10);
    CHECK(quad.step == doctest::Approx(0.1));

    const auto short_run = make_time_grid(0.009, 0.25, 0.1, StepLaw::quadratic);
    CHECK(short_run.n_steps >= 1);
    CHECK(short_run.step <= 0.1 * 0.25 * 0.25);
    CHECK(std::abs(short_run.n_steps * short_run.step - 0.009) <= 1e-12 * 0.009);
    CHECK(short_run.time(short_run.n_steps) == 0.009);
    CHECK(short_run.time(0) == 0.0);

    const auto fit = time_grid_for_step(1.0, 0.3);
    CHECK(fit.n_steps == 4);
    CHECK(fit.step == doctest::Approx(0.25));

    CHECK_THROWS_AS(make_time_grid(1.0, 0.5, 0.0, StepLaw::linear), InputError);
}

TEST_CASE("CFL bound from the explicit diagonal") {
    const auto e = SparseMatrix::from_dense(2, 2, std::vector<double>{100.0, -1.0, -1.0, 40.0});
    const auto zero = SparseMatrix::from_dense(2, 2, std::vector<double>(4, 0.0));
    const auto ops = SplitOperators::from_matrices({e}, {zero}, {{0.0, 0.0}});
    CHECK(cfl_max_step(ops) == doctest::Approx(0.01));

    const auto implicit_only = SplitOperators::from_matrices({zero}, {zero}, {{0.0, 0.0}});
    CHECK(cfl_max_step(implicit_only) == std::numeric_limits<double>::infinity());

    const auto report = check_monotonicity(ops, 0.01);
    CHECK(report.explicit_min_entry >= -1e-13);
    CHECK(check_monotonicity(ops, 0.02).explicit_min_entry < 0.0);
}

TEST_CASE("CFL bound scales with the mesh size for the eikonal problem") {
    Mesh mesh = uniform_refine(equilateral_triangle_mesh(3), 1);
    double previous = 0.0;
    for (int level = 0; level < 3; ++level) {
        const auto geom = p1_geometry(mesh);
        const auto problem = eikonal_problem(mesh, 16);
        const double h_max = cfl_max_step(build_split_operators(problem, mesh, geom, 0.0, 0.0));
        if (level > 0) {
            const double ratio = h_max / previous;
            CHECK(ratio >= 0.4);
            CHECK(ratio <= 0.6);
        }
        previous = h_max;
        mesh = uniform_refine(mesh);
    }
}

TEST_CASE("one explicit Euler step by hand") {
    const auto e = SparseMatrix::from_dense(1, 1, std::vector<double>{2.0});
    const auto zero = SparseMatrix::from_dense(1, 1, std::vector<double>{0.0});
    const auto ops = SplitOperators::from_matrices({e}, {zero}, {{0.0}});
    const std::vector<double> v_next{1.0};
    std::vector<double> v(1);
    newton_solve(v_next, v, ops, 0.1);
    CHECK(v[0] == doctest::Approx(0.8).epsilon(1e-14));
}

namespace {

HJBProblem constant_problem(double d, double final_value) {
    HJBProblem p{unit_circle_controls(4), {}, {}, {}, 0.2, false};
    p.coeff = [d](const Control& c, Point2, double) { return Coefficients{0.01, c.direction, 0.0, d}; };
    p.boundary = [](Point2, double) { return 0.0; };
    p.final_value = [final_value](Point2) { return final_value; };
    return p;
}

}  // namespace

TEST_CASE("zero data gives the zero solution") {
    const auto mesh = uniform_refine(testing::hexagon_patch(1.0), 2);
    const auto geom = p1_geometry(mesh);
    const auto problem = constant_problem(0.0, 0.0);
    const double h = 0.5 * auto_time_step(problem, mesh, geom);
    int steps = 0;
    SolveOptions opts;
    opts.on_step = [&](const StepInfo& info) {
        ++steps;
        for (double x : info.values) CHECK(x == 0.0);
    };
    const auto grid = time_grid_for_step(problem.horizon, h);
    const auto res = backward_solve(problem, mesh, geom, grid, opts);
    CHECK(steps == grid.n_steps);
    for (double x : res.initial.values) CHECK(x == 0.0);
}

TEST_CASE("larger final data never lowers the solution") {
    const auto mesh = uniform_refine(testing::hexagon_patch(1.0), 2);
    const auto geom = p1_geometry(mesh);
    const auto low = constant_problem(1.0, 0.0);
    const auto high = constant_problem(1.0, 0.05);
    const auto grid = time_grid_for_step(0.2, auto_time_step(low, mesh, geom));
    const auto a = backward_solve(low, mesh, geom, grid);
    const auto b = backward_solve(high, mesh, geom, grid);
    for (std::size_t i = 0; i < mesh.n_vertices(); ++i) CHECK(b.initial.values[i] >= a.initial.values[i] - 1e-12);
}

TEST_CASE("eikonal snapshots respect the discrete maximum principle") {
    const auto mesh = uniform_refine(lattice_domain(10), 1);
    const auto geom = p1_geometry(mesh);
    const auto problem = eikonal_problem(mesh, 16);
    const double bound = polygon_max_distance(PolygonOracle::from_mesh(mesh));
    const auto grid = time_grid_for_step(problem.horizon, auto_time_step(problem, mesh, geom));
    double lo = 0.0, hi = 0.0;
    SolveOptions opts;
    opts.on_step = [&](const StepInfo& info) {
        for (double x : info.values) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    };
    backward_solve(problem, mesh, geom, grid, opts);
    CHECK(lo >= 0.0);
    CHECK(hi <= bound + 1e-10);
    CHECK(hi > 0.5 * bound);
}

TEST_CASE("steps beyond the CFL bound are rejected") {
    const auto mesh = uniform_refine(testing::hexagon_patch(1.0), 2);
    const auto geom = p1_geometry(mesh);
    const auto problem = constant_problem(1.0, 0.0);
    const double h_max = auto_time_step(problem, mesh, geom, {}, 1.0);
    CHECK_THROWS_AS(backward_solve(problem, mesh, geom, time_grid_for_step(0.2, 0.2)), CflError);
    CHECK(std::isfinite(h_max));
}

TEST_CASE("snapshot writers") {
    const auto mesh = testing::hexagon_patch(1.0);
    Snapshot snap{0.0, std::vector<double>(7, 0.0)};
    snap.values[0] = 0.125;

    std::ostringstream csv;
    write_snapshot_csv(csv, mesh, snap);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "node,x,y,value");
    std::getline(lines, line);
    CHECK(line == "0,0,0,0.125");
    int rows = 1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 7);

    std::ostringstream vtk;
    write_vtk(vtk, mesh, snap);
    const std::string text = vtk.str();
    CHECK(text.rfind("# vtk DataFile Version 3.0", 0) == 0);
    CHECK(text.find("ASCII") != std::string::npos);
    CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(text.find("POINTS 7") != std::string::npos);
    CHECK(text.find("CELLS 6 24") != std::string::npos);
    CHECK(text.find("POINT_DATA 7") != std::string::npos);
    CHECK(text.find("SCALARS v") != std::string::npos);
}
