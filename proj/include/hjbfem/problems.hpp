#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hjbfem/control.hpp"
#include "hjbfem/mesh.hpp"
#include "hjbfem/timestepper.hpp"

namespace hjb {

struct ExactSolution {
    std::function<double(Point2, double)> value;
    std::function<Point2(Point2, double)> gradient;
};

struct Benchmark {
    std::string name;
    HJBProblem problem;
    /// Base mesh; study levels are uniform refinements of it.
    Mesh mesh;
    std::optional<ExactSolution> exact;
};

/// Equilateral triangle (0,-1), (sqrt(3)/2, 1/2), (-sqrt(3)/2, 1/2) split into
/// divisions^2 congruent triangles.
Mesh equilateral_triangle_mesh(int divisions);

/// v(x, y, t) = exp(-r) + r with r = |x| / sqrt(T - t + 1).
ExactSolution triangle_exact_solution(double horizon);

/// Degenerate-diffusion benchmark on the equilateral triangle, T = 1 by default, with
/// a = r / 2, b = beta / (2 sqrt(T - t + 1)), c = 0,
/// d = -|x| / (2 (T - t + 1)^{3/2}); boundary and final data from the exact
/// solution. Base mesh: 3 divisions per side, so the centroid is a node.
Benchmark triangle_problem(int n_beta = 32, double horizon = 1.0);

/// Non-convex union of equilateral lattice triangles of height 1 (lattice side
/// 2 / (sqrt(3) side_rows)): a trapezoid over the lower half carrying a
/// slanted arm up to y = 1, with a reflex corner where the two meet. The
/// largest inscribed circle sits in the trapezoid, away from the reflex
/// corner. Requires side_rows >= 4.
Mesh lattice_domain(int side_rows);

/// -v_t + |grad v| = 1 with homogeneous data. Default horizon: twice the
/// largest distance to the boundary.
HJBProblem eikonal_problem(const Mesh& mesh, int n_beta = 32, std::optional<double> horizon = std::nullopt);

inline constexpr double kAlpha0 = 0.045;
inline constexpr double kAlpha1 = 0.09;

/// 529 (sin g + sin(2g) / 2 + 0.4 sin(8g))^2 with g = pi^2 (x - 0.63)(y - 0.26) / 0.07.
double fully_nonlinear_source(Point2 p);

/// -v_t + sup_{alpha, beta} (-alpha Lap v + beta . grad v) = f, homogeneous
/// data, T = 0.009. Diffusion levels {a0, a1} followed by `extra_levels`.
HJBProblem fully_nonlinear_problem(const Mesh& mesh, int n_beta = 32, std::vector<double> extra_levels = {});

/// Boundary of a polygonal domain as oriented segments (domain on the left).
struct PolygonOracle {
    std::vector<std::array<Point2, 2>> segments;

    static PolygonOracle from_mesh(const Mesh& mesh);
    bool contains(Point2 p) const;
};

double polygon_distance(const PolygonOracle& oracle, Point2 p);

/// Largest distance to the boundary over the domain, by Lipschitz branch and
/// bound; the result is attained at a point and is within `tol` of the supremum.
double polygon_max_distance(const PolygonOracle& oracle, double tol = 1e-7);

/// Number of reflex corners along the boundary loops.
int reflex_vertex_count(const PolygonOracle& oracle);

struct ErrorReport {
    int level = 0;
    std::size_t n_interior = 0;
    double dx = 0.0;
    double h = 0.0;
    double err_l2 = 0.0;
    double err_linf = 0.0;
    double err_h1 = 0.0;
};

/// Nodal max error; L2 and H1 errors with the edge-midpoint rule per element.
ErrorReport error_norms(const Snapshot& v_h, const ExactSolution& exact, const Mesh& mesh, const P1Geometry& geom);

/// Least-squares slope of log(err) against log(dx); empty for fewer than two
/// points or non-positive data.
std::optional<double> fit_rate(const std::vector<double>& dx, const std::vector<double>& err);

struct StudyResult {
    std::vector<ErrorReport> reports;
    /// L2, Linf, H1.
    std::optional<std::array<double, 3>> rates;
    double ratio = 0.0;
};

struct StudyOptions {
    StepLaw law = StepLaw::quadratic;
    /// Constant h / dx^p; chosen as 0.9 of the tightest CFL bound over all levels when empty.
    std::optional<double> ratio;
    /// Refinements of the base mesh used for the first level.
    int first_refine = 1;
    SolveOptions solve;
    std::function<void(int level, const Mesh&, const SolveResult&)> on_level;
};

/// Runs the benchmark on successively refined meshes and compares v(0, .)
/// with the exact solution.
StudyResult convergence_study(const Benchmark& bench, int levels, const StudyOptions& options = {});

/// Ratio h / dx^p at 0.9 of the CFL bound, minimized over the given meshes.
double study_ratio(const HJBProblem& problem, const std::vector<Mesh>& meshes, StepLaw law,
                   const SplittingPolicy& splitting = {});

struct EikonalLevel {
    int level = 0;
    std::size_t n_interior = 0;
    double avg_nu = 0.0;
    double max_nu = 0.0;
    double linf_solution = 0.0;
    double oracle_max_distance = 0.0;
    double min_solution = 0.0;
};

struct EikonalStudyOptions {
    int n_beta = 32;
    /// Fixed h / dx; automatic (0.9 CFL per level) when empty.
    std::optional<double> ratio;
    SolveOptions solve;
    std::function<void(int level, const Mesh&, const SolveResult&)> on_level;
};

/// Level i solves on `coarse` refined i times.
std::vector<EikonalLevel> eikonal_study(const Mesh& coarse, int levels, const EikonalStudyOptions& options = {});

struct NewtonLevel {
    int level = 0;
    std::size_t n_systems = 0;
    int steps = 0;
    double avg_iters = 0.0;
    double std_iters = 0.0;
};

struct NewtonStudyOptions {
    int n_beta = 32;
    std::vector<double> extra_levels;
    std::optional<double> ratio;
    SolveOptions solve;
    std::function<void(int level, const Mesh&, const SolveResult&)> on_level;
};

std::vector<NewtonLevel> newton_study(const Mesh& coarse, int levels, const NewtonStudyOptions& options = {});

/// `level,n_interior,dx,h,err_l2,err_linf,err_h1`
void write_errors_csv(std::ostream& out, const std::vector<ErrorReport>& reports);
/// `level,n_interior,avg_nu,max_nu,linf_solution,oracle_max_distance`
void write_eikonal_csv(std::ostream& out, const std::vector<EikonalLevel>& levels);
/// `level,n_systems,steps,avg_iters,std_iters`
void write_newton_csv(std::ostream& out, const std::vector<NewtonLevel>& levels);
/// `node,x,y,alpha_index`, one row per interior node.
void write_policy_csv(std::ostream& out, const Mesh& mesh, const HJBProblem& problem, const std::vector<int>& policy);

}  // namespace hjb
