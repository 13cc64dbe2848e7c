#include "hjbfem/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"

namespace hjb {

TimeGrid time_grid_for_step(double horizon, double h) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("time horizon must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw InputError("time step must be positive and finite");
    // The 1e-12 slack keeps T / h = 20.000000000000004 at 20 steps.
    const double ratio = horizon / h;
    const auto n = static_cast<int>(std::max(1.0, std::ceil(ratio * (1.0 - 1e-12))));
    return {horizon, horizon / n, n};
}

TimeGrid make_time_grid(double horizon, double dx, double ratio, StepLaw law) {
    if (!(ratio > 0.0)) throw InputError("time step ratio must be positive");
    if (!(dx > 0.0)) throw InputError("mesh size must be positive");
    const double h = law == StepLaw::linear ? ratio * dx : ratio * dx * dx;
    return time_grid_for_step(horizon, h);
}

double cfl_max_step(const SplitOperators& ops) {
    double top = 0.0;
    for (const auto& c : ops.controls) {
        for (std::size_t r = 0; r < c.explicit_op.n_rows(); ++r) top = std::max(top, c.explicit_op.diagonal(r));
    }
    return top > 0.0 ? 1.0 / top : std::numeric_limits<double>::infinity();
}

MonotonicityReport check_monotonicity(const SplitOperators& ops, double h) {
    MonotonicityReport rep;
    rep.explicit_min_entry = std::numeric_limits<double>::infinity();
    rep.implicit_max_offdiag = -std::numeric_limits<double>::infinity();
    for (const auto& c : ops.controls) {
        const auto& ep = c.explicit_op.pattern();
        const auto ev = c.explicit_op.values();
        for (std::size_t r = 0; r < ep.n_rows; ++r) {
            bool diag_seen = false;
            for (std::size_t k = ep.row_offsets[r]; k < ep.row_offsets[r + 1]; ++k) {
                const bool diag = ep.col_indices[k] == ep.row_node[r];
                diag_seen |= diag;
                const double entry = (diag ? 1.0 : 0.0) - h * ev[k];
                rep.explicit_min_entry = std::min(rep.explicit_min_entry, entry);
            }
            if (!diag_seen) rep.explicit_min_entry = std::min(rep.explicit_min_entry, 1.0);
        }
        const auto& ip = c.implicit_op.pattern();
        const auto iv = c.implicit_op.values();
        for (std::size_t r = 0; r < ip.n_rows; ++r) {
            for (std::size_t k = ip.row_offsets[r]; k < ip.row_offsets[r + 1]; ++k) {
                if (ip.col_indices[k] != ip.row_node[r]) {
                    rep.implicit_max_offdiag = std::max(rep.implicit_max_offdiag, iv[k]);
                }
            }
        }
    }
    if (rep.implicit_max_offdiag == -std::numeric_limits<double>::infinity()) rep.implicit_max_offdiag = 0.0;
    return rep;
}

SolveResult backward_solve(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom, const TimeGrid& grid,
                           const SolveOptions& options) {
    if (grid.n_steps < 1 || !(grid.step > 0.0)) throw InputError("time grid has no steps");
    if (std::abs(grid.n_steps * grid.step - grid.horizon) > 1e-12 * grid.horizon) {
        throw InputError("time grid does not cover the horizon");
    }
    SolveResult result;
    result.min_cfl_step = std::numeric_limits<double>::infinity();
    const auto& verts = mesh.vertices();
    const std::size_t nv = mesh.n_vertices();

    std::vector<double> next(nv), current(nv);
    bool negative_final = false;
    for (std::size_t i = 0; i < nv; ++i) {
        next[i] = problem.final_value(verts[i]);
        if (!std::isfinite(next[i])) throw InputError("final-time data is not finite");
        if (next[i] < 0.0) negative_final = true;
    }
    if (negative_final) result.warnings.push_back("final-time data is negative at some nodes");

    const OperatorBuilder builder(problem, mesh, geom, options.splitting);
    std::optional<SplitOperators> cached;
    std::vector<int> counts;
    counts.reserve(static_cast<std::size_t>(grid.n_steps));
    const double h = grid.step;

    for (int k = grid.n_steps - 1; k >= 0; --k) {
        const double t = grid.time(k);
        const double t_next = grid.time(k + 1);
        const bool rebuild = !cached || problem.time_dependent;
        if (rebuild) {
            cached = builder.build(t_next, t);
            if (result.profiles.empty() || options.record_profiles) {
                result.profiles.push_back(aggregate_profile(*cached));
            }
            for (const auto& w : cached->warnings) {
                if (std::find(result.warnings.begin(), result.warnings.end(), w) == result.warnings.end()) {
                    result.warnings.push_back(w);
                }
            }
            const double h_max = cfl_max_step(*cached);
            result.min_cfl_step = std::min(result.min_cfl_step, h_max);
            if (h > h_max) throw CflError(k, h, h_max);
        }
        for (int b : mesh.boundary_nodes()) {
            const auto node = static_cast<std::size_t>(b);
            current[node] = problem.boundary(verts[node], t);
        }
        NewtonResult nr = newton_solve(next, current, *cached, h, options.newton, options.linear, &options.hooks);
        counts.push_back(nr.iterations);
        if (options.on_step) options.on_step({k, t, h, &*cached, &nr, current});
        if (k == 0) result.final_policy = std::move(nr.policy);
        std::swap(next, current);
    }
    result.initial = {0.0, std::move(next)};
    result.newton = NewtonStats::from_counts(std::move(counts), mesh.n_interior());
    return result;
}

double auto_time_step(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom,
                      const SplittingPolicy& splitting, double safety) {
    const OperatorBuilder builder(problem, mesh, geom, splitting);
    double h_max = std::numeric_limits<double>::infinity();
    const int samples = problem.time_dependent ? 16 : 0;
    for (int j = 0; j <= samples; ++j) {
        const double t = samples == 0 ? problem.horizon : problem.horizon * j / samples;
        h_max = std::min(h_max, cfl_max_step(builder.build(t, t)));
    }
    if (!std::isfinite(h_max)) return problem.horizon;
    return std::min(problem.horizon, safety * h_max);
}

void write_snapshot_csv(std::ostream& out, const Mesh& mesh, const Snapshot& snap) {
    out << "node,x,y,value\n";
    for (std::size_t i = 0; i < mesh.n_vertices(); ++i) {
        const Point2 p = mesh.vertices()[i];
        out << i << ',' << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(snap.values[i])
            << '\n';
    }
}

void write_vtk(std::ostream& out, const Mesh& mesh, const Snapshot& snap) {
    out << "# vtk DataFile Version 3.0\n";
    out << "hjbfem solution t=" << format_double(snap.t) << "\n";
    out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_vertices() << " double\n";
    for (const auto& p : mesh.vertices()) out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    out << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles() << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh.n_triangles() << '\n';
    for (std::size_t i = 0; i < mesh.n_triangles(); ++i) out << "5\n";
    out << "POINT_DATA " << mesh.n_vertices() << '\n';
    out << "SCALARS v double 1\nLOOKUP_TABLE default\n";
    for (double v : snap.values) out << format_double(v) << '\n';
}

}  // namespace hjb
