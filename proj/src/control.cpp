#include "hjbfem/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "hjbfem/errors.hpp"
#include "hjbfem/format.hpp"
#include "hjbfem/parallel.hpp"

namespace hjb {

ControlSet::ControlSet(std::vector<Control> controls) : controls_(std::move(controls)) {
    if (controls_.empty()) throw InputError("control set is empty");
    std::set<std::string> labels;
    for (const auto& c : controls_) {
        if (!labels.insert(c.label).second) throw InputError("duplicate control label '" + c.label + "'");
    }
}

ControlSet unit_circle_controls(int n) {
    if (n < 3) throw InputError("unit circle discretization needs at least 3 directions");
    std::vector<Control> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / n;
        out.push_back({"beta" + std::to_string(j), {std::cos(theta), std::sin(theta)}, 0.0, -1});
    }
    return ControlSet(std::move(out));
}

ControlSet diffusion_controls(const std::vector<double>& levels) {
    std::vector<Control> out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] >= 0.0) || !std::isfinite(levels[i])) throw InputError("diffusion level must be >= 0");
        out.push_back({"alpha" + std::to_string(i), {}, levels[i], static_cast<int>(i)});
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
            if (levels[i] == levels[j]) throw InputError("duplicate diffusion level " + format_double(levels[i]));
        }
    }
    return ControlSet(std::move(out));
}

ControlSet bang_bang_controls(double a0, double a1) {
    if (!(a0 >= 0.0)) throw InputError("bang-bang controls need a0 >= 0");
    if (!(a0 < a1)) throw InputError("bang-bang controls need a0 < a1");
    return diffusion_controls({a0, a1});
}

ControlSet product_controls(const ControlSet& diffusion, const ControlSet& directions) {
    std::vector<Control> out;
    out.reserve(diffusion.size() * directions.size());
    for (const auto& a : diffusion) {
        for (const auto& b : directions) {
            out.push_back({a.label + "/" + b.label, b.direction, a.diffusion, a.diffusion_index});
        }
    }
    return ControlSet(std::move(out));
}

SplitOperators SplitOperators::from_matrices(std::vector<SparseMatrix> explicit_ops,
                                             std::vector<SparseMatrix> implicit_ops,
                                             std::vector<std::vector<double>> sources) {
    const std::size_t n = explicit_ops.size();
    if (n == 0 || implicit_ops.size() != n || sources.size() != n) {
        throw InputError("need the same positive number of explicit, implicit and source terms");
    }
    SplitOperators ops;
    ops.controls.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = ops.controls[i];
        c.explicit_op = std::move(explicit_ops[i]);
        c.implicit_op = std::move(implicit_ops[i]);
        c.source = std::move(sources[i]);
        const auto& ref = ops.controls.front().explicit_op;
        if (c.explicit_op.n_rows() != ref.n_rows() || c.implicit_op.n_rows() != ref.n_rows() ||
            c.explicit_op.n_cols() != ref.n_cols() || c.implicit_op.n_cols() != ref.n_cols() ||
            c.source.size() != ref.n_rows()) {
            throw InputError("split operators have inconsistent shapes");
        }
        if (c.explicit_op.pattern().row_node != ref.pattern().row_node ||
            c.implicit_op.pattern().row_node != ref.pattern().row_node) {
            throw InputError("split operators disagree on row nodes");
        }
    }
    return ops;
}

OperatorBuilder::OperatorBuilder(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom,
                                 SplittingPolicy policy)
    : problem_(&problem), mesh_(&mesh), policy_(std::move(policy)),
      assembler_(mesh, geom, policy_.quadrature), stiffness_(assembler_.stiffness()) {
    if (policy_.implicit_nu_floor < 0.0) throw InputError("implicit diffusion floor must be >= 0");
}

SplitOperators OperatorBuilder::build(double t_expl, double t_impl) const {
    const auto& controls = problem_->controls;
    const std::size_t n = controls.size();
    const std::size_t rows = stiffness_.n_rows();
    const auto& qpts = assembler_.quad_points();

    SplitOperators ops;
    ops.controls.resize(n);
    std::vector<SparseMatrix> transport(n);
    std::vector<std::vector<double>> nu(n);
    std::vector<char> negative_reaction(n, 0);

    parallel_for(n, [&](std::size_t i) {
        const Control& ctl = controls[i];
        std::vector<Point2> b(qpts.size());
        std::vector<double> c(qpts.size());
        std::vector<double> d(qpts.size());
        for (std::size_t q = 0; q < qpts.size(); ++q) {
            const Coefficients k = problem_->coeff(ctl, qpts[q], t_expl);
            b[q] = k.b;
            c[q] = k.c;
            d[q] = k.d;
            if (k.c < 0.0) negative_reaction[i] = 1;
        }
        transport[i] = assembler_.advection_reaction(b, c);
        ops.controls[i].source = assembler_.source(d);

        auto& a = ops.controls[i].a_physical;
        a.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const Point2 y = mesh_->vertices()[static_cast<std::size_t>(mesh_->interior_nodes()[r])];
            a[r] = problem_->coeff(ctl, y, t_impl).a;
            if (!(a[r] >= 0.0) || !std::isfinite(a[r])) {
                throw InputError("negative or non-finite physical diffusion for control '" + ctl.label + "' at (" +
                                 format_double(y.x) + ", " + format_double(y.y) + ")");
            }
        }
        nu[i] = min_monotone_diffusion(stiffness_, transport[i]);
    });

    if (policy_.explicit_mode == DiffusionMode::global) {
        double top = 0.0;
        for (const auto& v : nu) {
            for (double x : v) top = std::max(top, x);
        }
        for (auto& v : nu) std::fill(v.begin(), v.end(), top);
    }

    parallel_for(n, [&](std::size_t i) {
        auto& out = ops.controls[i];
        const std::vector<double> zeros(rows, 0.0);
        auto expl = stabilized_operator(stiffness_, transport[i], zeros, nu[i]);
        out.explicit_op = std::move(expl.matrix);
        out.explicit_profile = std::move(expl.profile);

        std::vector<double> a_impl(rows);
        for (std::size_t r = 0; r < rows; ++r) a_impl[r] = std::max(out.a_physical[r] - nu[i][r], 0.0);
        const std::vector<double> floor(rows, policy_.implicit_nu_floor);
        auto impl = stabilized_operator(stiffness_, SparseMatrix{}, a_impl, floor);
        out.implicit_op = std::move(impl.matrix);
        out.implicit_profile = std::move(impl.profile);
    });

    for (std::size_t i = 0; i < n; ++i) {
        if (negative_reaction[i]) {
            ops.warnings.push_back("control '" + controls[i].label +
                                   "' has a negative reaction coefficient; diagonal not stabilized");
        }
    }
    return ops;
}

SplitOperators build_split_operators(const HJBProblem& problem, const Mesh& mesh, const P1Geometry& geom,
                                     double t_expl, double t_impl, const SplittingPolicy& policy) {
    return OperatorBuilder(problem, mesh, geom, policy).build(t_expl, t_impl);
}

DiffusionProfile aggregate_profile(const SplitOperators& ops) {
    DiffusionProfile out;
    const std::size_t rows = ops.n_rows();
    out.nu.assign(rows, 0.0);
    out.a_physical.assign(rows, std::numeric_limits<double>::infinity());
    for (const auto& c : ops.controls) {
        if (c.explicit_profile.nu.size() != rows || c.a_physical.size() != rows) {
            throw InputError("operators carry no diffusion profile");
        }
        for (std::size_t r = 0; r < rows; ++r) {
            out.nu[r] = std::max(out.nu[r], c.explicit_profile.nu[r]);
            out.a_physical[r] = std::min(out.a_physical[r], c.a_physical[r]);
        }
    }
    out.a_eff.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) out.a_eff[r] = std::max(out.a_physical[r], out.nu[r]);
    return out;
}

}  // namespace hjb
