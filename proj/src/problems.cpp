#include "hjbfem/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <queue>
#include <utility>

#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"

namespace hjb {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

}  // namespace

Mesh equilateral_triangle_mesh(int divisions) {
    if (divisions < 1) throw InputError("need at least one division per side");
    const Point2 a{0.0, -1.0};
    const Point2 b{kSqrt3 / 2.0, 0.5};
    const Point2 c{-kSqrt3 / 2.0, 0.5};
    const int n = divisions;
    std::vector<Point2> vertices;
    std::map<std::pair<int, int>, int> index;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i + j <= n; ++i) {
            index[{i, j}] = static_cast<int>(vertices.size());
            const double si = static_cast<double>(i) / n;
            const double sj = static_cast<double>(j) / n;
            vertices.push_back(a + si * (b - a) + sj * (c - a));
        }
    }
    std::vector<Triangle> triangles;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + j < n; ++i) {
            triangles.push_back({index[{i, j}], index[{i + 1, j}], index[{i, j + 1}]});
            if (i + j + 2 <= n) triangles.push_back({index[{i + 1, j}], index[{i + 1, j + 1}], index[{i, j + 1}]});
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

ExactSolution triangle_exact_solution(double horizon) {
    ExactSolution ex;
    ex.value = [horizon](Point2 p, double t) {
        const double r = norm(p) / std::sqrt(horizon - t + 1.0);
        return std::exp(-r) + r;
    };
    ex.gradient = [horizon](Point2 p, double t) {
        const double rho = norm(p);
        if (rho == 0.0) return Point2{};
        const double s = std::sqrt(horizon - t + 1.0);
        const double r = rho / s;
        const double f = (1.0 - std::exp(-r)) / (rho * s);
        return f * p;
    };
    return ex;
}

Benchmark triangle_problem(int n_beta, double horizon) {
    if (!(horizon > 0.0)) throw InputError("horizon must be positive");
    auto exact = triangle_exact_solution(horizon);
    HJBProblem prob{unit_circle_controls(n_beta), {}, {}, {}, horizon, true};
    prob.coeff = [horizon](const Control& ctl, Point2 p, double t) {
        const double tau = horizon - t + 1.0;
        const double rho = norm(p);
        Coefficients k;
        k.a = 0.5 * std::sqrt(rho * rho / tau);
        k.b = (0.5 / std::sqrt(tau)) * ctl.direction;
        k.c = 0.0;
        k.d = -0.5 * rho / std::pow(tau, 1.5);
        return k;
    };
    prob.boundary = exact.value;
    prob.final_value = [value = exact.value, horizon](Point2 p) { return value(p, horizon); };
    return {"triangle", std::move(prob), equilateral_triangle_mesh(3), std::move(exact)};
}

Mesh lattice_domain(int side_rows) {
    if (side_rows < 4) throw InputError("lattice domain needs side_rows >= 4");
    const int rows = side_rows;
    const double s = 2.0 / (kSqrt3 * rows);
    const int lower = rows / 2;
    const int base = std::max(lower + 1, 7 * lower / 5);
    const int arm = std::max(1, rows / 5);
    std::map<std::pair<int, int>, int> index;
    std::vector<Point2> vertices;
    auto vertex = [&](int i, int j) {
        auto [it, inserted] = index.try_emplace({i, j}, static_cast<int>(vertices.size()));
        if (inserted) vertices.push_back({s * (i + 0.5 * j), static_cast<double>(j) / rows});
        return it->second;
    };
    std::vector<Triangle> triangles;
    for (int j = 0; j < rows; ++j) {
        // Trapezoid rows shrink by one cell; arm rows form a slanted parallelogram.
        const int width = j < lower ? base - j : arm;
        for (int i = 0; i < width; ++i) {
            triangles.push_back({vertex(i, j), vertex(i + 1, j), vertex(i, j + 1)});
            if (j >= lower || i + 1 < width) {
                triangles.push_back({vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)});
            }
        }
    }
    return Mesh(std::move(vertices), std::move(triangles));
}

HJBProblem eikonal_problem(const Mesh& mesh, int n_beta, std::optional<double> horizon) {
    const double T = horizon ? *horizon : 2.0 * polygon_max_distance(PolygonOracle::from_mesh(mesh));
    if (!(T > 0.0)) throw InputError("eikonal horizon must be positive");
    HJBProblem prob{unit_circle_controls(n_beta), {}, {}, {}, T, false};
    prob.coeff = [](const Control& ctl, Point2, double) {
        return Coefficients{0.0, ctl.direction, 0.0, 1.0};
    };
    prob.boundary = [](Point2, double) { return 0.0; };
    prob.final_value = [](Point2) { return 0.0; };
    return prob;
}

double fully_nonlinear_source(Point2 p) {
    const double g = std::numbers::pi * std::numbers::pi * (p.x - 0.63) * (p.y - 0.26) / 0.07;
    const double s = std::sin(g) + 0.5 * std::sin(2.0 * g) + 0.4 * std::sin(8.0 * g);
    return 529.0 * s * s;
}

HJBProblem fully_nonlinear_problem(const Mesh& mesh, int n_beta, std::vector<double> extra_levels) {
    (void)mesh;
    std::vector<double> levels{kAlpha0, kAlpha1};
    for (double a : extra_levels) {
        if (!(a > kAlpha0 && a < kAlpha1)) throw InputError("extra diffusion levels must lie strictly inside (a0, a1)");
        levels.push_back(a);
    }
    HJBProblem prob{product_controls(diffusion_controls(levels), unit_circle_controls(n_beta)), {}, {}, {}, 0.009,
                    false};
    prob.coeff = [](const Control& ctl, Point2 p, double) {
        return Coefficients{ctl.diffusion, ctl.direction, 0.0, fully_nonlinear_source(p)};
    };
    prob.boundary = [](Point2, double) { return 0.0; };
    prob.final_value = [](Point2) { return 0.0; };
    return prob;
}

PolygonOracle PolygonOracle::from_mesh(const Mesh& mesh) {
    PolygonOracle oracle;
    const auto edges = mesh.boundary_edges();
    std::map<int, int> out_degree;
    std::map<int, int> in_degree;
    for (const auto& e : edges) {
        oracle.segments.push_back({mesh.vertices()[static_cast<std::size_t>(e[0])],
                                   mesh.vertices()[static_cast<std::size_t>(e[1])]});
        ++out_degree[e[0]];
        ++in_degree[e[1]];
    }
    for (const auto& [v, d] : out_degree) {
        if (d != 1 || in_degree[v] != 1) throw MeshError("mesh boundary is not a union of simple closed loops");
    }
    return oracle;
}

bool PolygonOracle::contains(Point2 p) const {
    bool inside = false;
    for (const auto& [a, b] : segments) {
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

double polygon_distance(const PolygonOracle& oracle, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : oracle.segments) {
        const Point2 e = b - a;
        const double len2 = dot(e, e);
        const double s = len2 > 0.0 ? std::clamp(dot(p - a, e) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(p - (a + s * e)));
    }
    return best;
}

double polygon_max_distance(const PolygonOracle& oracle, double tol) {
    if (oracle.segments.empty()) throw InputError("empty polygon");
    Point2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point2 hi{-lo.x, -lo.y};
    for (const auto& seg : oracle.segments) {
        for (const auto& p : seg) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
    }
    struct Box {
        Point2 c;
        double half;
        double upper;
        bool operator<(const Box& o) const { return upper < o.upper; }
    };
    double best = 0.0;
    // Any inside point x of a box satisfies d(x) <= d(c) + |x - c| when c is
    // inside, and d(x) <= |x - c| - d(c) when c is outside (the segment from c
    // to x crosses the boundary).
    auto make = [&](Point2 c, double half) {
        const double d = polygon_distance(oracle, c);
        const bool inside = oracle.contains(c);
        if (inside) best = std::max(best, d);
        const double reach = half * std::numbers::sqrt2;
        return Box{c, half, inside ? d + reach : reach - d};
    };
    std::priority_queue<Box> queue;
    queue.push(make(0.5 * (lo + hi), 0.5 * std::max(hi.x - lo.x, hi.y - lo.y)));
    while (!queue.empty()) {
        const Box top = queue.top();
        queue.pop();
        if (top.upper <= best + tol) break;
        const double h = 0.5 * top.half;
        for (const Point2 off : {Point2{-h, -h}, Point2{h, -h}, Point2{-h, h}, Point2{h, h}}) {
            const Box child = make(top.c + off, h);
            if (child.upper > best + tol) queue.push(child);
        }
    }
    return best;
}

int reflex_vertex_count(const PolygonOracle& oracle) {
    std::map<std::pair<double, double>, std::size_t> starting_at;
    for (std::size_t i = 0; i < oracle.segments.size(); ++i) {
        starting_at[{oracle.segments[i][0].x, oracle.segments[i][0].y}] = i;
    }
    int count = 0;
    for (const auto& [a, b] : oracle.segments) {
        const auto it = starting_at.find({b.x, b.y});
        if (it == starting_at.end()) throw MeshError("polygon boundary is not closed");
        const auto& next = oracle.segments[it->second];
        const Point2 e0 = b - a;
        const Point2 e1 = next[1] - next[0];
        if (cross(e0, e1) < -1e-12 * norm(e0) * norm(e1)) ++count;
    }
    return count;
}

ErrorReport error_norms(const Snapshot& v_h, const ExactSolution& exact, const Mesh& mesh, const P1Geometry& geom) {
    if (v_h.values.size() != mesh.n_vertices()) throw InputError("snapshot size does not match the mesh");
    ErrorReport rep;
    rep.n_interior = mesh.n_interior();
    rep.dx = geom.dx;
    const auto& verts = mesh.vertices();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        rep.err_linf = std::max(rep.err_linf, std::abs(v_h.values[i] - exact.value(verts[i], v_h.t)));
    }
    const auto quad = QuadratureRule::edge_midpoint();
    double l2 = 0.0;
    double semi = 0.0;
    for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles()[t];
        Point2 grad_h{};
        for (int k = 0; k < 3; ++k) grad_h = grad_h + v_h.values[static_cast<std::size_t>(tri[k])] * geom.elem_grad[t][k];
        for (std::size_t q = 0; q < quad.points.size(); ++q) {
            const auto& lam = quad.points[q];
            Point2 x{};
            double vq = 0.0;
            for (int k = 0; k < 3; ++k) {
                x = x + lam[k] * verts[static_cast<std::size_t>(tri[k])];
                vq += lam[k] * v_h.values[static_cast<std::size_t>(tri[k])];
            }
            const double e = vq - exact.value(x, v_h.t);
            const Point2 ge = grad_h - exact.gradient(x, v_h.t);
            l2 += geom.elem_area[t] * quad.weights[q] * e * e;
            semi += geom.elem_area[t] * quad.weights[q] * dot(ge, ge);
        }
    }
    rep.err_l2 = std::sqrt(l2);
    rep.err_h1 = std::sqrt(l2 + semi);
    return rep;
}

std::optional<double> fit_rate(const std::vector<double>& dx, const std::vector<double>& err) {
    if (dx.size() != err.size() || dx.size() < 2) return std::nullopt;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!(dx[i] > 0.0) || !(err[i] > 0.0)) return std::nullopt;
        x.push_back(std::log(dx[i]));
        y.push_back(std::log(err[i]));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

double study_ratio(const HJBProblem& problem, const std::vector<Mesh>& meshes, StepLaw law,
                   const SplittingPolicy& splitting) {
    double ratio = std::numeric_limits<double>::infinity();
    for (const auto& mesh : meshes) {
        const auto geom = p1_geometry(mesh);
        const double h = auto_time_step(problem, mesh, geom, splitting, 0.9);
        const double scale = law == StepLaw::linear ? geom.dx : geom.dx * geom.dx;
        ratio = std::min(ratio, h / scale);
    }
    return ratio;
}

StudyResult convergence_study(const Benchmark& bench, int levels, const StudyOptions& options) {
    if (!bench.exact) throw InputError("convergence study needs an exact solution");
    if (levels < 1) throw InputError("need at least one level");
    std::vector<Mesh> meshes;
    meshes.push_back(uniform_refine(bench.mesh, options.first_refine));
    for (int i = 1; i < levels; ++i) meshes.push_back(uniform_refine(meshes.back()));

    StudyResult out;
    out.ratio = options.ratio ? *options.ratio
                              : study_ratio(bench.problem, meshes, options.law, options.solve.splitting);
    std::vector<double> dx, l2, linf, h1;
    for (int i = 0; i < levels; ++i) {
        const Mesh& mesh = meshes[static_cast<std::size_t>(i)];
        const auto geom = p1_geometry(mesh);
        const auto grid = make_time_grid(bench.problem.horizon, geom.dx, out.ratio, options.law);
        const auto res = backward_solve(bench.problem, mesh, geom, grid, options.solve);
        if (options.on_level) options.on_level(i, mesh, res);
        ErrorReport rep = error_norms(res.initial, *bench.exact, mesh, geom);
        rep.level = i;
        rep.h = grid.step;
        out.reports.push_back(rep);
        dx.push_back(rep.dx);
        l2.push_back(rep.err_l2);
        linf.push_back(rep.err_linf);
        h1.push_back(rep.err_h1);
    }
    const auto r0 = fit_rate(dx, l2);
    const auto r1 = fit_rate(dx, linf);
    const auto r2 = fit_rate(dx, h1);
    if (r0 && r1 && r2) out.rates = std::array<double, 3>{*r0, *r1, *r2};
    return out;
}

std::vector<EikonalLevel> eikonal_study(const Mesh& coarse, int levels, const EikonalStudyOptions& options) {
    if (levels < 1) throw InputError("need at least one level");
    const auto oracle = PolygonOracle::from_mesh(coarse);
    const double max_distance = polygon_max_distance(oracle);
    std::vector<EikonalLevel> out;
    Mesh mesh = coarse;
    for (int i = 0; i < levels; ++i) {
        if (i > 0) mesh = uniform_refine(mesh);
        const auto geom = p1_geometry(mesh);
        const auto problem = eikonal_problem(mesh, options.n_beta, 2.0 * max_distance);
        const double h = options.ratio ? *options.ratio * geom.dx
                                       : auto_time_step(problem, mesh, geom, options.solve.splitting);
        const auto grid = time_grid_for_step(problem.horizon, h);
        const auto res = backward_solve(problem, mesh, geom, grid, options.solve);
        if (options.on_level) options.on_level(i, mesh, res);
        EikonalLevel lvl;
        lvl.level = i;
        lvl.n_interior = mesh.n_interior();
        const auto& prof = res.profiles.front();
        for (double nu : prof.nu) {
            lvl.avg_nu += nu / static_cast<double>(prof.nu.size());
            lvl.max_nu = std::max(lvl.max_nu, nu);
        }
        lvl.min_solution = std::numeric_limits<double>::infinity();
        for (double v : res.initial.values) {
            lvl.linf_solution = std::max(lvl.linf_solution, std::abs(v));
            lvl.min_solution = std::min(lvl.min_solution, v);
        }
        lvl.oracle_max_distance = max_distance;
        out.push_back(lvl);
    }
    return out;
}

std::vector<NewtonLevel> newton_study(const Mesh& coarse, int levels, const NewtonStudyOptions& options) {
    if (levels < 1) throw InputError("need at least one level");
    std::vector<NewtonLevel> out;
    Mesh mesh = coarse;
    for (int i = 0; i < levels; ++i) {
        if (i > 0) mesh = uniform_refine(mesh);
        const auto geom = p1_geometry(mesh);
        const auto problem = fully_nonlinear_problem(mesh, options.n_beta, options.extra_levels);
        const double h = options.ratio ? *options.ratio * geom.dx
                                       : auto_time_step(problem, mesh, geom, options.solve.splitting);
        const auto grid = time_grid_for_step(problem.horizon, h);
        const auto res = backward_solve(problem, mesh, geom, grid, options.solve);
        if (options.on_level) options.on_level(i, mesh, res);
        out.push_back({i, res.newton.n_systems, grid.n_steps, res.newton.mean, res.newton.std});
    }
    return out;
}

void write_errors_csv(std::ostream& out, const std::vector<ErrorReport>& reports) {
    out << "level,n_interior,dx,h,err_l2,err_linf,err_h1\n";
    for (const auto& r : reports) {
        out << r.level << ',' << r.n_interior << ',' << format_double(r.dx) << ',' << format_double(r.h) << ','
            << format_double(r.err_l2) << ',' << format_double(r.err_linf) << ',' << format_double(r.err_h1) << '\n';
    }
}

void write_eikonal_csv(std::ostream& out, const std::vector<EikonalLevel>& levels) {
    out << "level,n_interior,avg_nu,max_nu,linf_solution,oracle_max_distance\n";
    for (const auto& l : levels) {
        out << l.level << ',' << l.n_interior << ',' << format_double(l.avg_nu) << ',' << format_double(l.max_nu)
            << ',' << format_double(l.linf_solution) << ',' << format_double(l.oracle_max_distance) << '\n';
    }
}

void write_newton_csv(std::ostream& out, const std::vector<NewtonLevel>& levels) {
    out << "level,n_systems,steps,avg_iters,std_iters\n";
    for (const auto& l : levels) {
        out << l.level << ',' << l.n_systems << ',' << l.steps << ',' << format_double(l.avg_iters) << ','
            << format_double(l.std_iters) << '\n';
    }
}

void write_policy_csv(std::ostream& out, const Mesh& mesh, const HJBProblem& problem, const std::vector<int>& policy) {
    out << "node,x,y,alpha_index\n";
    for (std::size_t r = 0; r < policy.size(); ++r) {
        const int node = mesh.interior_nodes()[r];
        const Point2 p = mesh.vertices()[static_cast<std::size_t>(node)];
        const auto& ctl = problem.controls[static_cast<std::size_t>(policy[r])];
        out << node << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << ctl.diffusion_index << '\n';
    }
}

}  // namespace hjb
