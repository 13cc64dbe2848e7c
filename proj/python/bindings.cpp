#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "hjbfem/assembly.hpp"
#include "hjbfem/cli.hpp"
#include "hjbfem/errors.hpp"
#include "hjbfem/mesh.hpp"
#include "hjbfem/parallel.hpp"
#include "hjbfem/problems.hpp"
#include "hjbfem/timestepper.hpp"

namespace py = pybind11;
using namespace hjb;

namespace {

py::array_t<double> points_array(const std::vector<Point2>& pts) {
    py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{2}});
    auto a = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        a(i, 0) = pts[i].x;
        a(i, 1) = pts[i].y;
    }
    return out;
}

Mesh make_mesh(py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
               py::array_t<int, py::array::c_style | py::array::forcecast> triangles) {
    if (vertices.ndim() != 2 || vertices.shape(1) != 2) throw InputError("vertices must have shape (n, 2)");
    if (triangles.ndim() != 2 || triangles.shape(1) != 3) throw InputError("triangles must have shape (m, 3)");
    auto v = vertices.unchecked<2>();
    auto t = triangles.unchecked<2>();
    std::vector<Point2> pts;
    for (py::ssize_t i = 0; i < v.shape(0); ++i) pts.push_back({v(i, 0), v(i, 1)});
    std::vector<Triangle> tris;
    for (py::ssize_t i = 0; i < t.shape(0); ++i) tris.push_back({t(i, 0), t(i, 1), t(i, 2)});
    return Mesh(std::move(pts), std::move(tris));
}

Mesh default_mesh(const std::string& problem, int side_rows) {
    if (problem == "triangle") return triangle_problem(3).mesh;
    if (problem == "eikonal" || problem == "fullynl") return lattice_domain(side_rows);
    throw InputError("unknown problem '" + problem + "'");
}

py::dict solve(const std::string& problem, std::optional<Mesh> mesh, int refine, int n_beta,
               std::optional<double> dt_ratio, const std::string& dt_law, bool global_diffusion, int alpha_samples,
               int side_rows, unsigned threads) {
    set_thread_count(threads);
    const Mesh fine = uniform_refine(mesh ? *mesh : default_mesh(problem, side_rows), refine);
    const auto geom = p1_geometry(fine);
    std::optional<ExactSolution> exact;
    HJBProblem prob = [&] {
        if (problem == "triangle") {
            auto bench = triangle_problem(n_beta);
            exact = bench.exact;
            return std::move(bench.problem);
        }
        if (problem == "eikonal") return eikonal_problem(fine, n_beta);
        std::vector<double> extra;
        for (int i = 1; i <= alpha_samples; ++i) extra.push_back(kAlpha0 + (kAlpha1 - kAlpha0) * i / (alpha_samples + 1));
        return fully_nonlinear_problem(fine, n_beta, extra);
    }();
    SolveOptions opts;
    opts.splitting.explicit_mode = global_diffusion ? DiffusionMode::global : DiffusionMode::local;
    const StepLaw law = dt_law == "linear" ? StepLaw::linear : StepLaw::quadratic;
    const TimeGrid grid = dt_ratio ? make_time_grid(prob.horizon, geom.dx, *dt_ratio, law)
                                   : time_grid_for_step(prob.horizon, auto_time_step(prob, fine, geom, opts.splitting));
    SolveResult res;
    {
        py::gil_scoped_release release;
        res = backward_solve(prob, fine, geom, grid, opts);
    }
    py::dict out;
    out["points"] = points_array(fine.vertices());
    out["values"] = py::array_t<double>(static_cast<py::ssize_t>(res.initial.values.size()), res.initial.values.data());
    out["interior_nodes"] = fine.interior_nodes();
    out["h"] = grid.step;
    out["n_steps"] = grid.n_steps;
    out["dx"] = geom.dx;
    out["newton_iterations"] = res.newton.iters_per_step;
    out["newton_mean"] = res.newton.mean;
    out["newton_std"] = res.newton.std;
    std::vector<int> alpha_index;
    for (int p : res.final_policy) alpha_index.push_back(prob.controls[static_cast<std::size_t>(p)].diffusion_index);
    out["alpha_index"] = alpha_index;
    if (!res.profiles.empty()) {
        out["nu"] = res.profiles.front().nu;
        out["a_physical"] = res.profiles.front().a_physical;
        out["a_eff"] = res.profiles.front().a_eff;
    }
    if (exact) {
        const auto rep = error_norms(res.initial, *exact, fine, geom);
        out["err_l2"] = rep.err_l2;
        out["err_linf"] = rep.err_linf;
        out["err_h1"] = rep.err_h1;
    }
    return out;
}

py::dict report_dict(const ErrorReport& r) {
    py::dict d;
    d["level"] = r.level;
    d["n_interior"] = r.n_interior;
    d["dx"] = r.dx;
    d["h"] = r.h;
    d["err_l2"] = r.err_l2;
    d["err_linf"] = r.err_linf;
    d["err_h1"] = r.err_h1;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hjbfem, m) {
    m.doc() = "Monotone P1 finite elements for Hamilton-Jacobi-Bellman equations";

    // Translators run newest first, so the base class goes in first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
    py::register_exception<CflError>(m, "CflError", PyExc_RuntimeError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<Mesh>(m, "Mesh")
        .def(py::init(&make_mesh), py::arg("vertices"), py::arg("triangles"))
        .def_property_readonly("vertices", [](const Mesh& mesh) { return points_array(mesh.vertices()); })
        .def_property_readonly("triangles",
                               [](const Mesh& mesh) {
                                   py::array_t<int> out({static_cast<py::ssize_t>(mesh.n_triangles()), py::ssize_t{3}});
                                   auto a = out.mutable_unchecked<2>();
                                   for (std::size_t i = 0; i < mesh.n_triangles(); ++i) {
                                       for (int k = 0; k < 3; ++k) a(i, k) = mesh.triangles()[i][k];
                                   }
                                   return out;
                               })
        .def_property_readonly("boundary_nodes", &Mesh::boundary_nodes)
        .def_property_readonly("interior_nodes", &Mesh::interior_nodes)
        .def_property_readonly("n_vertices", &Mesh::n_vertices)
        .def_property_readonly("n_triangles", &Mesh::n_triangles)
        .def_property_readonly("n_interior", &Mesh::n_interior)
        .def_property_readonly("total_area", &Mesh::total_area)
        .def("__repr__", [](const Mesh& mesh) {
            std::ostringstream os;
            os << "<Mesh vertices=" << mesh.n_vertices() << " triangles=" << mesh.n_triangles() << '>';
            return os.str();
        });

    m.def("load_mesh", [](const std::string& text) { return load_mesh(text); }, py::arg("text"));
    m.def("read_mesh", [](const std::string& path) { return read_mesh_file(path); }, py::arg("path"));
    m.def("format_mesh", &format_mesh, py::arg("mesh"));
    m.def("uniform_refine", py::overload_cast<const Mesh&, int>(&uniform_refine), py::arg("mesh"),
          py::arg("times") = 1);
    m.def(
        "check_acute",
        [](const Mesh& mesh) {
            const auto s = check_acute(mesh);
            py::dict d;
            d["min_angle"] = s.min_angle;
            d["max_angle"] = s.max_angle;
            d["is_strictly_acute"] = s.is_strictly_acute;
            d["n_vertices"] = s.n_vertices;
            d["n_interior"] = s.n_interior;
            d["n_triangles"] = s.n_triangles;
            return d;
        },
        py::arg("mesh"));
    m.def("equilateral_triangle_mesh", &equilateral_triangle_mesh, py::arg("divisions"));
    m.def("lattice_domain", &lattice_domain, py::arg("side_rows") = 10);
    m.def(
        "max_boundary_distance", [](const Mesh& mesh) { return polygon_max_distance(PolygonOracle::from_mesh(mesh)); },
        py::arg("mesh"));
    m.def(
        "min_monotone_diffusion",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> k,
           py::array_t<double, py::array::c_style | py::array::forcecast> b) {
            if (k.ndim() != 2 || b.ndim() != 2 || k.shape(0) != b.shape(0) || k.shape(1) != b.shape(1)) {
                throw InputError("K and B must be matrices of the same shape");
            }
            const auto rows = static_cast<std::size_t>(k.shape(0));
            const auto cols = static_cast<std::size_t>(k.shape(1));
            const auto km = SparseMatrix::from_dense(rows, cols, {k.data(), rows * cols});
            const auto bm = SparseMatrix::from_dense(rows, cols, {b.data(), rows * cols});
            return min_monotone_diffusion(km, bm);
        },
        py::arg("K"), py::arg("B"));
    m.def("solve", &solve, py::arg("problem"), py::arg("mesh") = std::nullopt, py::arg("refine") = 1,
          py::arg("n_beta") = 32, py::arg("dt_ratio") = std::nullopt, py::arg("dt_law") = "linear",
          py::arg("global_diffusion") = false, py::arg("alpha_samples") = 0, py::arg("side_rows") = 10,
          py::arg("threads") = 1u);
    m.def(
        "convergence_study",
        [](int levels, int n_beta, const std::string& law, std::optional<double> ratio, int first_refine) {
            StudyOptions opts;
            opts.law = law == "linear" ? StepLaw::linear : StepLaw::quadratic;
            opts.ratio = ratio;
            opts.first_refine = first_refine;
            StudyResult res;
            {
                py::gil_scoped_release release;
                res = convergence_study(triangle_problem(n_beta), levels, opts);
            }
            py::list reports;
            for (const auto& r : res.reports) reports.append(report_dict(r));
            py::dict out;
            out["reports"] = reports;
            out["ratio"] = res.ratio;
            if (res.rates) out["rates"] = py::make_tuple((*res.rates)[0], (*res.rates)[1], (*res.rates)[2]);
            else out["rates"] = py::none();
            return out;
        },
        py::arg("levels"), py::arg("n_beta") = 32, py::arg("law") = "quadratic", py::arg("ratio") = std::nullopt,
        py::arg("first_refine") = 1);
    m.def(
        "eikonal_study",
        [](const Mesh& coarse, int levels, int n_beta, bool global_diffusion) {
            EikonalStudyOptions opts;
            opts.n_beta = n_beta;
            opts.solve.splitting.explicit_mode = global_diffusion ? DiffusionMode::global : DiffusionMode::local;
            std::vector<EikonalLevel> res;
            {
                py::gil_scoped_release release;
                res = eikonal_study(coarse, levels, opts);
            }
            py::list out;
            for (const auto& l : res) {
                py::dict d;
                d["level"] = l.level;
                d["n_interior"] = l.n_interior;
                d["avg_nu"] = l.avg_nu;
                d["max_nu"] = l.max_nu;
                d["linf_solution"] = l.linf_solution;
                d["oracle_max_distance"] = l.oracle_max_distance;
                out.append(d);
            }
            return out;
        },
        py::arg("coarse"), py::arg("levels"), py::arg("n_beta") = 32, py::arg("global_diffusion") = false);
    m.def(
        "newton_study",
        [](const Mesh& coarse, int levels, int n_beta) {
            NewtonStudyOptions opts;
            opts.n_beta = n_beta;
            std::vector<NewtonLevel> res;
            {
                py::gil_scoped_release release;
                res = newton_study(coarse, levels, opts);
            }
            py::list out;
            for (const auto& l : res) {
                py::dict d;
                d["level"] = l.level;
                d["n_systems"] = l.n_systems;
                d["steps"] = l.steps;
                d["avg_iters"] = l.avg_iters;
                d["std_iters"] = l.std_iters;
                out.append(d);
            }
            return out;
        },
        py::arg("coarse"), py::arg("levels"), py::arg("n_beta") = 32);
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
